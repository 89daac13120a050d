use nalgebra::DMatrix;

use super::{DataMatrix, StatsError};

/// Residuals of an ordinary-least-squares fit with intercept.
#[derive(Debug, Clone, PartialEq)]
pub struct Residualized {
    /// `N × |targets|`, columns named after the targets.
    pub data: DataMatrix,
    /// The regressor design was rank deficient and the minimum-norm
    /// pseudo-inverse solution was used.
    pub rank_deficient: bool,
}

/// Regresses every target column on the regressor columns (plus an
/// intercept) and returns the residuals.
pub fn residualize(
    data: &DataMatrix,
    targets: &[usize],
    regressors: &[usize],
) -> Result<Residualized, StatsError> {
    data.check_columns(targets)?;
    data.check_columns(regressors)?;
    if targets.iter().any(|t| regressors.contains(t)) {
        return Err(StatsError::InvalidInput(
            "targets and regressors overlap".into(),
        ));
    }
    let n = data.n_samples();
    if n <= regressors.len() + 1 {
        return Err(StatsError::InsufficientSamples {
            samples: n,
            required: regressors.len() + 2,
        });
    }
    let y = data.select(targets);
    let (residuals, rank_deficient) = ols_residuals(&data.select(regressors), &y);
    let names = targets
        .iter()
        .map(|&t| data.column_names()[t].clone())
        .collect();
    Ok(Residualized {
        data: DataMatrix::new(residuals, names)?,
        rank_deficient,
    })
}

/// Residuals of `y` after a least-squares fit on `[1 | z]`. Returns the
/// residual matrix and whether `[1 | z]` was rank deficient.
pub(crate) fn ols_residuals(z: &DMatrix<f64>, y: &DMatrix<f64>) -> (DMatrix<f64>, bool) {
    let n = y.nrows();
    let y_mean = y.row_mean();
    let mut yc = y.clone();
    for mut row in yc.row_iter_mut() {
        row -= &y_mean;
    }
    if z.ncols() == 0 {
        return (yc, false);
    }
    // Centering both sides absorbs the intercept.
    let z_mean = z.row_mean();
    let mut zc = z.clone();
    for mut row in zc.row_iter_mut() {
        row -= &z_mean;
    }
    let svd = zc.clone().svd(true, true);
    let sigma_max = svd.singular_values.max();
    let tol = sigma_max * (n.max(z.ncols()) as f64) * f64::EPSILON;
    let rank = svd.singular_values.iter().filter(|&&s| s > tol).count();
    let rank_deficient = rank < z.ncols() || sigma_max == 0.0;
    let u = svd.u.expect("requested U");
    // Projection onto the column space spanned by the retained left
    // singular vectors.
    let kept = u.columns(0, rank);
    let fitted = kept * (kept.transpose() * &yc);
    (yc - fitted, rank_deficient)
}
