use nalgebra::DMatrix;

use super::StatsError;

/// RBF kernel ridge regression settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelRidge {
    /// Penalty on the mean-squared-error objective; the linear system is
    /// `(K + N·ridge·I) α = y`.
    pub ridge: f64,
    /// Kernel bandwidth on standardized regressors; `None` uses the median
    /// pairwise distance.
    pub bandwidth: Option<f64>,
    /// Choose bandwidth and penalty per target by Gaussian-process
    /// marginal likelihood over a fixed grid; `ridge` and `bandwidth`
    /// are then ignored.
    pub tune: bool,
}

impl Default for KernelRidge {
    fn default() -> Self {
        Self {
            ridge: 1e-3,
            bandwidth: None,
            tune: false,
        }
    }
}

/// Bandwidths tried when tuning, as multiples of the median distance.
pub const TUNE_BANDWIDTHS: [f64; 4] = [0.5, 1.0, 2.0, 4.0];
/// Noise-to-signal ratios tried when tuning.
pub const TUNE_NOISE: [f64; 5] = [0.01, 0.03, 0.1, 0.3, 1.0];

/// Median of the pairwise Euclidean distances between rows.
pub fn median_distance(z: &DMatrix<f64>) -> f64 {
    let sq = squared_distances(z);
    let n = z.nrows();
    let mut d: Vec<f64> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .map(|(a, b)| sq[a * n + b].sqrt())
        .collect();
    if d.is_empty() {
        return 0.0;
    }
    d.sort_by(|a, b| a.total_cmp(b));
    let mid = d.len() / 2;
    if d.len().is_multiple_of(2) {
        0.5 * (d[mid - 1] + d[mid])
    } else {
        d[mid]
    }
}

fn squared_distances(z: &DMatrix<f64>) -> Vec<f64> {
    let n = z.nrows();
    let mut out = vec![0.0; n * n];
    for a in 0..n {
        for b in a + 1..n {
            let mut s = 0.0;
            for c in 0..z.ncols() {
                let d = z[(a, c)] - z[(b, c)];
                s += d * d;
            }
            out[a * n + b] = s;
            out[b * n + a] = s;
        }
    }
    out
}

fn standardize(z: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = z.clone();
    let n = z.nrows() as f64;
    for mut col in out.column_iter_mut() {
        let mean = col.mean();
        col.add_scalar_mut(-mean);
        let sd = (col.norm_squared() / (n - 1.0)).sqrt();
        if sd > 0.0 {
            col /= sd;
        }
    }
    out
}

/// In-sample residuals of centred `targets` after RBF kernel ridge
/// regression on the rows of `regressors`. With no regressors the targets
/// are only centred.
pub fn kernel_ridge_residuals(
    regressors: &DMatrix<f64>,
    targets: &DMatrix<f64>,
    settings: KernelRidge,
) -> Result<DMatrix<f64>, StatsError> {
    let n = targets.nrows();
    if regressors.nrows() != n {
        return Err(StatsError::InvalidInput(
            "regressor and target row counts differ".into(),
        ));
    }
    if !(settings.ridge > 0.0) {
        return Err(StatsError::InvalidInput(
            "ridge penalty must be positive".into(),
        ));
    }
    let mut centred = targets.clone();
    for mut col in centred.column_iter_mut() {
        let mean = col.mean();
        col.add_scalar_mut(-mean);
    }
    if regressors.ncols() == 0 {
        return Ok(centred);
    }
    let z = standardize(regressors);
    let sq = squared_distances(&z);
    if settings.tune {
        return tuned_residuals(&z, &sq, &centred);
    }
    let bandwidth = match settings.bandwidth {
        Some(b) if b > 0.0 => b,
        Some(b) => {
            return Err(StatsError::InvalidInput(format!(
                "bandwidth {b} must be positive"
            )))
        }
        None => {
            let m = median_distance(&z);
            if m > 0.0 {
                m
            } else {
                1.0
            }
        }
    };
    let kernel = rbf(&sq, n, bandwidth);
    let mut system = kernel.clone();
    let shift = n as f64 * settings.ridge;
    for d in 0..n {
        system[(d, d)] += shift;
    }
    let chol = system
        .cholesky()
        .ok_or_else(|| StatsError::Degenerate("kernel system not positive definite".into()))?;
    let coeffs = chol.solve(&centred);
    Ok(&centred - kernel * coeffs)
}

fn rbf(sq: &[f64], n: usize, bandwidth: f64) -> DMatrix<f64> {
    let scale = -0.5 / (bandwidth * bandwidth);
    DMatrix::from_fn(n, n, |a, b| (sq[a * n + b] * scale).exp())
}

/// GP regression `y = f(z) + e` with `f ~ GP(0, s²·k)`, `e ~ N(0, s²·λ)`.
/// The amplitude `s²` is profiled out, leaving the log evidence
/// `-n/2 ln(yᵀ(K+λI)⁻¹y / n) - 1/2 ln|K+λI|`. In-sample residuals are
/// `y - K(K+λI)⁻¹y = λ(K+λI)⁻¹y`.
fn tuned_residuals(
    z: &DMatrix<f64>,
    sq: &[f64],
    centred: &DMatrix<f64>,
) -> Result<DMatrix<f64>, StatsError> {
    let n = z.nrows();
    let median = median_distance(z);
    let median = if median > 0.0 { median } else { 1.0 };
    let mut best = vec![f64::NEG_INFINITY; centred.ncols()];
    let mut out = centred.clone();
    for mult in TUNE_BANDWIDTHS {
        let kernel = rbf(sq, n, mult * median);
        for noise in TUNE_NOISE {
            let mut system = kernel.clone();
            for d in 0..n {
                system[(d, d)] += noise;
            }
            let Some(chol) = system.cholesky() else {
                continue;
            };
            let log_det: f64 = 2.0
                * chol
                    .l_dirty()
                    .diagonal()
                    .iter()
                    .map(|v| v.ln())
                    .sum::<f64>();
            let coeffs = chol.solve(centred);
            #[allow(clippy::needless_range_loop)]
            for c in 0..centred.ncols() {
                let quad = centred.column(c).dot(&coeffs.column(c));
                if !(quad > 0.0) {
                    continue;
                }
                let evidence = -0.5 * n as f64 * (quad / n as f64).ln() - 0.5 * log_det;
                if evidence > best[c] {
                    best[c] = evidence;
                    out.set_column(c, &(coeffs.column(c) * noise));
                }
            }
        }
    }
    if best.iter().any(|b| !b.is_finite()) {
        return Err(StatsError::Degenerate(
            "no kernel system was positive definite".into(),
        ));
    }
    Ok(out)
}
