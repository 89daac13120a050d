use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::Decision;
use crate::stats::{DataMatrix, StatsError};

/// Differences of `|Δ|` below this are ties.
pub const TRACE_TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceReport {
    /// Log trace ratio of the regression of Y on X.
    pub delta_xy: f64,
    /// Log trace ratio of the regression of X on Y.
    pub delta_yx: f64,
    /// `|delta_yx| - |delta_xy|`; positive favours X → Y.
    pub crit: f64,
    pub decision: Decision,
}

/// `log τ(A Σ Aᵀ) - log τ(A Aᵀ) - log τ(Σ)` with the normalized trace
/// `τ(M) = tr(M) / dim(M)`. Near zero when `A` is chosen independently of
/// the input covariance `Σ`.
pub fn trace_delta(a: &DMatrix<f64>, sigma: &DMatrix<f64>) -> Result<f64, StatsError> {
    let (n_out, n_in) = a.shape();
    if sigma.shape() != (n_in, n_in) {
        return Err(StatsError::InvalidInput(
            "covariance does not match the regression matrix".into(),
        ));
    }
    let tau = |m: DMatrix<f64>| m.trace() / m.nrows() as f64;
    let num = tau(a * sigma * a.transpose());
    let gain = tau(a * a.transpose());
    let spread = tau(sigma.clone());
    if !(num > 0.0 && gain > 0.0 && spread > 0.0) {
        return Err(StatsError::Degenerate(format!(
            "vanishing trace in a {n_out}x{n_in} regression"
        )));
    }
    Ok(num.ln() - gain.ln() - spread.ln())
}

/// Trace-condition baseline: regress each group on the other by least
/// squares and pick the direction whose log trace ratio is closer to zero.
pub fn trace_method(
    data: &DataMatrix,
    x: &[usize],
    y: &[usize],
) -> Result<TraceReport, StatsError> {
    if x.is_empty() || y.is_empty() {
        return Err(StatsError::InvalidInput(
            "both groups need at least one column".into(),
        ));
    }
    let cols: Vec<usize> = x.iter().chain(y).copied().collect();
    trace_from_covariance(&covariance_of(data, &cols), x.len())
}

/// [`trace_method`] on a joint covariance whose first `n` rows and columns
/// belong to X.
pub fn trace_from_covariance(cov: &DMatrix<f64>, n: usize) -> Result<TraceReport, StatsError> {
    let p = cov.nrows();
    if cov.ncols() != p || n == 0 || n >= p {
        return Err(StatsError::InvalidInput(
            "covariance shape does not fit the groups".into(),
        ));
    }
    let m = p - n;
    let s_xx = cov.view((0, 0), (n, n)).into_owned();
    let s_yy = cov.view((n, n), (m, m)).into_owned();
    let s_yx = cov.view((n, 0), (m, n)).into_owned();

    let a_xy = regression(&s_yx, &s_xx, "X")?;
    let a_yx = regression(&s_yx.transpose(), &s_yy, "Y")?;
    let delta_xy = trace_delta(&a_xy, &s_xx)?;
    let delta_yx = trace_delta(&a_yx, &s_yy)?;
    let crit = delta_yx.abs() - delta_xy.abs();
    let decision = if crit.abs() <= TRACE_TIE_TOLERANCE {
        Decision::Indeterminate
    } else if crit > 0.0 {
        Decision::XCausesY
    } else {
        Decision::YCausesX
    };
    Ok(TraceReport {
        delta_xy,
        delta_yx,
        crit,
        decision,
    })
}

fn covariance_of(data: &DataMatrix, cols: &[usize]) -> DMatrix<f64> {
    let sub = data.select(cols);
    let n = sub.nrows() as f64;
    let mut centred = sub;
    for mut c in centred.column_iter_mut() {
        let mean = c.mean();
        c.add_scalar_mut(-mean);
    }
    centred.transpose() * &centred / (n - 1.0)
}

/// `cross · input⁻¹`, the least-squares map from the input group.
fn regression(
    cross: &DMatrix<f64>,
    input: &DMatrix<f64>,
    name: &str,
) -> Result<DMatrix<f64>, StatsError> {
    let chol = input
        .clone()
        .cholesky()
        .ok_or_else(|| StatsError::Degenerate(format!("covariance of group {name} is singular")))?;
    // A Σ = C  ⇔  Σ Aᵀ = Cᵀ since Σ is symmetric.
    Ok(chol.solve(&cross.transpose()).transpose())
}
