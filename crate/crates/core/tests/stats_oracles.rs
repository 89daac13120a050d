use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use veccause::stats::{
    distance_correlation, distance_correlation_test, fisher_z_decision, partial_correlation,
    residualize,
};
use veccause::synth::example1_sample;
use veccause::DataMatrix;

fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Correlated Gaussian sample: white noise times a random mixing matrix.
fn correlated(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DataMatrix {
    let mix = DMatrix::from_fn(cols, cols, |a, b| {
        if a == b {
            1.0
        } else {
            rng.random_range(-0.8..0.8)
        }
    });
    DataMatrix::unnamed(gaussian(rng, rows, cols) * mix).unwrap()
}

/// Partial correlation from the inverse of the sample covariance of the
/// involved columns.
fn precision_oracle(values: &DMatrix<f64>, i: usize, j: usize, cond: &[usize]) -> f64 {
    let cols: Vec<usize> = [i, j].into_iter().chain(cond.iter().copied()).collect();
    let n = values.nrows() as f64;
    let means: Vec<f64> = cols.iter().map(|&c| values.column(c).mean()).collect();
    let cov = DMatrix::from_fn(cols.len(), cols.len(), |a, b| {
        (0..values.nrows())
            .map(|r| (values[(r, cols[a])] - means[a]) * (values[(r, cols[b])] - means[b]))
            .sum::<f64>()
            / (n - 1.0)
    });
    let p = cov.try_inverse().unwrap();
    -p[(0, 1)] / (p[(0, 0)] * p[(1, 1)]).sqrt()
}

#[test]
fn partial_correlation_matches_precision_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..300 {
        let p = rng.random_range(3..8);
        let rows = rng.random_range(30..200);
        let data = correlated(&mut rng, rows, p);
        let cond: Vec<usize> = (2..p).filter(|_| rng.random_bool(0.6)).collect();
        let r = partial_correlation(&data, 0, 1, &cond).unwrap();
        let oracle = precision_oracle(data.values(), 0, 1, &cond);
        assert!((r - oracle).abs() < 1e-10, "{r} vs {oracle}");
    }
}

#[test]
fn z_equals_x_plus_y_plus_noise() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut values = gaussian(&mut rng, 500, 3);
    for r in 0..500 {
        values[(r, 2)] = values[(r, 0)] + values[(r, 1)] + 0.3 * values[(r, 2)];
    }
    let data = DataMatrix::unnamed(values.clone()).unwrap();
    let r = partial_correlation(&data, 0, 1, &[2]).unwrap();
    assert!((r - precision_oracle(&values, 0, 1, &[2])).abs() < 1e-10);
    assert!(r < -0.5);
}

#[test]
fn residuals_are_orthogonal_to_regressors() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        let data = correlated(&mut rng, 200, 3);
        let res = residualize(&data, &[0], &[1, 2]).unwrap();
        let e = res.data.values().column(0);
        assert!(e.sum().abs() < 1e-8);
        for c in [1, 2] {
            assert!(e.dot(&data.values().column(c)).abs() < 1e-8);
        }
        let again = residualize(
            &DataMatrix::unnamed(DMatrix::from_fn(200, 3, |r, c| {
                if c == 0 {
                    e[r]
                } else {
                    data.values()[(r, c)]
                }
            }))
            .unwrap(),
            &[0],
            &[1, 2],
        )
        .unwrap();
        assert!((again.data.values() - res.data.values()).amax() < 1e-10);
    }
}

/// Two-sided normal tail from the Maclaurin series of erf.
fn erf_series_p(z: f64) -> f64 {
    let x = z / std::f64::consts::SQRT_2;
    let mut term = x;
    let mut sum = x;
    for k in 1..200 {
        term *= -x * x / k as f64;
        sum += term / (2 * k + 1) as f64;
    }
    1.0 - 2.0 / std::f64::consts::PI.sqrt() * sum
}

#[test]
fn fisher_z_reference_values() {
    let zero = fisher_z_decision(0.0, 50, 2, 0.99).unwrap();
    assert_eq!(zero.p_value, 1.0);
    assert!(zero.independent);
    assert!(!fisher_z_decision(0.99, 100, 0, 0.01).unwrap().independent);
    let o = fisher_z_decision(0.2, 100, 5, 0.01).unwrap();
    assert!((o.statistic - 92f64.sqrt() * 0.2f64.atanh()).abs() < 1e-12);
    assert!((o.p_value - erf_series_p(o.statistic)).abs() < 1e-9);
    assert!((o.p_value - 0.051_830_083_963_313_6).abs() < 1e-9);
    assert!(fisher_z_decision(0.1, 10, 7, 0.01).is_err());
}

#[test]
fn distance_correlation_identity_and_power() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let x = gaussian(&mut rng, 100, 1);
    let same = distance_correlation_test(&x, &x, 199, 0.01, &mut rng).unwrap();
    assert!((same.statistic - 1.0).abs() < 1e-12);
    assert!(!same.independent);

    let mut detected = 0;
    for _ in 0..100 {
        let x = gaussian(&mut rng, 200, 1);
        let y = x.map(|v| v * v);
        detected += !distance_correlation_test(&x, &y, 199, 0.01, &mut rng)
            .unwrap()
            .independent as usize;
    }
    assert!(detected >= 95, "{detected}");
}

#[test]
fn distance_correlation_is_calibrated() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut rejected = 0;
    for _ in 0..100 {
        let x = gaussian(&mut rng, 200, 1);
        let y = gaussian(&mut rng, 200, 1);
        rejected += !distance_correlation_test(&x, &y, 199, 0.05, &mut rng)
            .unwrap()
            .independent as usize;
    }
    assert!((1..=12).contains(&rejected), "{rejected}");
}

#[test]
fn example1_cross_correlations() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let n = 4000;
    let bound = 4.0 / (n as f64).sqrt();
    let faithful = example1_sample(0.5, 1.0, 1.0, 0.3, n, &mut rng).unwrap();
    let r = partial_correlation(&faithful, 2, 3, &[]).unwrap();
    assert!((r - 0.4).abs() < bound, "{r}");
    let cancelled = example1_sample(0.5, 1.0, 1.0, -0.5, n, &mut rng).unwrap();
    let r = partial_correlation(&cancelled, 2, 3, &[]).unwrap();
    assert!(r.abs() < bound, "{r}");
    let none = example1_sample(0.5, 0.0, 0.0, 0.3, n, &mut rng).unwrap();
    for (x, y) in [(0, 2), (0, 3), (1, 2), (1, 3)] {
        assert!(partial_correlation(&none, x, y, &[]).unwrap().abs() < bound);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn partial_correlation_symmetric(seed in any::<u64>(), mask in 0u8..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = correlated(&mut rng, 40, 5);
        let cond: Vec<usize> = (2..5).filter(|c| mask >> (c - 2) & 1 == 1).collect();
        let a = partial_correlation(&data, 0, 1, &cond).unwrap();
        let b = partial_correlation(&data, 1, 0, &cond).unwrap();
        prop_assert_eq!(a, b);
        prop_assert!((-1.0..=1.0).contains(&a));
    }

    #[test]
    fn fisher_p_monotone(r1 in 0.0f64..0.95, r2 in 0.0f64..0.95, n1 in 10usize..500, n2 in 10usize..500) {
        let ((rl, rh), (nl, nh)) = ((r1.min(r2), r1.max(r2)), (n1.min(n2), n1.max(n2)));
        let p = |r, n| fisher_z_decision(r, n, 3, 0.01).unwrap().p_value;
        prop_assert!(p(rh, nl) <= p(rl, nl));
        prop_assert!(p(rh.max(0.05), nh) <= p(rh.max(0.05), nl));
    }

    #[test]
    fn distance_correlation_invariances(seed in any::<u64>(), shift in -5.0f64..5.0, scale in 0.1f64..10.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = gaussian(&mut rng, 30, 2);
        let y = gaussian(&mut rng, 30, 1) + x.columns(0, 1);
        let base = distance_correlation(&x, &y).unwrap();
        let moved = distance_correlation(&x.add_scalar(shift), &y.add_scalar(-shift)).unwrap();
        let scaled = distance_correlation(&(&x * scale), &(&y * scale)).unwrap();
        prop_assert!((base - moved).abs() < 1e-10);
        prop_assert!((base - scaled).abs() < 1e-10);
    }
}
