use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;

use super::{StatsError, TestOutcome};

/// Double-centred Euclidean distance matrix, row-major.
fn centred_distances(x: &DMatrix<f64>) -> Vec<f64> {
    let n = x.nrows();
    let mut d = vec![0.0; n * n];
    for a in 0..n {
        for b in a + 1..n {
            let mut s = 0.0;
            for c in 0..x.ncols() {
                let diff = x[(a, c)] - x[(b, c)];
                s += diff * diff;
            }
            let dist = s.sqrt();
            d[a * n + b] = dist;
            d[b * n + a] = dist;
        }
    }
    let row_means: Vec<f64> = (0..n)
        .map(|a| d[a * n..(a + 1) * n].iter().sum::<f64>() / n as f64)
        .collect();
    let grand = row_means.iter().sum::<f64>() / n as f64;
    for a in 0..n {
        for b in 0..n {
            d[a * n + b] -= row_means[a] + row_means[b] - grand;
        }
    }
    d
}

fn mean_product(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() / a.len() as f64
}

fn permuted_mean_product(a: &[f64], b: &[f64], perm: &[usize]) -> f64 {
    let n = perm.len();
    let mut s = 0.0;
    for (k, &pk) in perm.iter().enumerate() {
        let a_row = &a[k * n..(k + 1) * n];
        let b_row = &b[pk * n..(pk + 1) * n];
        for (l, &pl) in perm.iter().enumerate() {
            s += a_row[l] * b_row[pl];
        }
    }
    s / (n * n) as f64
}

fn check_inputs(x: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<(), StatsError> {
    if x.nrows() != y.nrows() {
        return Err(StatsError::InvalidInput("sample counts differ".into()));
    }
    for (name, m) in [("x", x), ("y", y)] {
        if m.ncols() == 0 {
            return Err(StatsError::InvalidInput(format!("{name} has no columns")));
        }
        for (c, col) in m.column_iter().enumerate() {
            let first = col[0];
            if col.iter().all(|&v| v == first) {
                return Err(StatsError::Degenerate(format!(
                    "{name} column {c} is constant"
                )));
            }
        }
    }
    Ok(())
}

/// Empirical (V-statistic) distance correlation of the rows of `x` and `y`.
pub fn distance_correlation(x: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<f64, StatsError> {
    check_inputs(x, y)?;
    let (a, b) = (centred_distances(x), centred_distances(y));
    Ok(dcor_from(&a, &b, mean_product(&a, &b)))
}

fn dcor_from(a: &[f64], b: &[f64], dcov2: f64) -> f64 {
    let denom = (mean_product(a, a) * mean_product(b, b)).sqrt();
    if denom <= 0.0 {
        return 0.0;
    }
    (dcov2.max(0.0) / denom).sqrt().min(1.0)
}

/// Permutation test of independence based on distance correlation. The
/// p-value is `(1 + #{permuted ≥ observed}) / (permutations + 1)`.
pub fn distance_correlation_test<R: Rng + ?Sized>(
    x: &DMatrix<f64>,
    y: &DMatrix<f64>,
    permutations: usize,
    alpha_sig: f64,
    rng: &mut R,
) -> Result<TestOutcome, StatsError> {
    check_inputs(x, y)?;
    if x.nrows() < 10 {
        return Err(StatsError::InsufficientSamples {
            samples: x.nrows(),
            required: 10,
        });
    }
    if permutations < 99 {
        return Err(StatsError::InvalidInput(format!(
            "{permutations} permutations, at least 99 required"
        )));
    }
    let (a, b) = (centred_distances(x), centred_distances(y));
    let observed = mean_product(&a, &b);
    let mut perm: Vec<usize> = (0..x.nrows()).collect();
    let mut exceed = 0usize;
    for _ in 0..permutations {
        perm.shuffle(rng);
        if permuted_mean_product(&a, &b, &perm) >= observed {
            exceed += 1;
        }
    }
    let p_value = (1 + exceed) as f64 / (permutations + 1) as f64;
    Ok(TestOutcome {
        statistic: dcor_from(&a, &b, observed),
        p_value,
        independent: p_value > alpha_sig,
    })
}
