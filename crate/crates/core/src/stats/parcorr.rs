use nalgebra::{DMatrix, DVector};

use super::regression::ols_residuals;
use super::{DataMatrix, StatsError};

/// Residual variance below this fraction of the raw variance counts as
/// zero.
const DEGENERATE_RATIO: f64 = 1e-12;

/// Pearson correlation of two equally long samples.
pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64, StatsError> {
    if a.len() != b.len() || a.len() < 2 {
        return Err(StatsError::InvalidInput(
            "samples must be equally long with at least two entries".into(),
        ));
    }
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa <= 0.0 || sbb <= 0.0 {
        return Err(StatsError::Degenerate("zero-variance sample".into()));
    }
    Ok((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}

/// Correlation of the OLS residuals of columns `i` and `j` after
/// regressing both on `cond` with an intercept.
pub fn partial_correlation(
    data: &DataMatrix,
    i: usize,
    j: usize,
    cond: &[usize],
) -> Result<f64, StatsError> {
    data.check_columns(&[i, j])?;
    data.check_columns(cond)?;
    check_query(i, j, cond)?;
    let n = data.n_samples();
    if n <= cond.len() + 3 {
        return Err(StatsError::InsufficientSamples {
            samples: n,
            required: cond.len() + 4,
        });
    }
    let targets = data.select(&[i, j]);
    let (res, _) = ols_residuals(&data.select(cond), &targets);
    let raw = data.covariance_of(&[i, j]);
    for (k, col) in res.column_iter().enumerate() {
        let var = col.norm_squared() / (n as f64 - 1.0);
        if !(var > DEGENERATE_RATIO * raw[k]) {
            return Err(StatsError::Degenerate(format!(
                "column {} has no residual variance",
                [i, j][k]
            )));
        }
    }
    let a: Vec<f64> = res.column(0).iter().copied().collect();
    let b: Vec<f64> = res.column(1).iter().copied().collect();
    pearson(&a, &b)
}

fn check_query(i: usize, j: usize, cond: &[usize]) -> Result<(), StatsError> {
    if i == j {
        return Err(StatsError::InvalidInput("i and j coincide".into()));
    }
    if cond.contains(&i) || cond.contains(&j) {
        return Err(StatsError::InvalidInput(
            "conditioning set contains an endpoint".into(),
        ));
    }
    Ok(())
}

impl DataMatrix {
    /// Variances of the listed columns.
    fn covariance_of(&self, columns: &[usize]) -> Vec<f64> {
        let n = self.n_samples() as f64;
        columns
            .iter()
            .map(|&c| {
                let col = self.values().column(c);
                let mean = col.mean();
                col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
            })
            .collect()
    }
}

/// Partial correlations computed from a precomputed covariance matrix.
///
/// `ρ(i, j | S)` is read off the Schur complement
/// `Σ_{ab} − Σ_{aS} Σ_{SS}⁻¹ Σ_{Sb}` for `a, b ∈ {i, j}`, which equals the
/// residual covariance of the OLS route. For "everything else" conditioning
/// use [`PartialCorrelator::given_rest`], which inverts the covariance of
/// the whole set once.
#[derive(Debug, Clone)]
pub struct PartialCorrelator {
    covariance: DMatrix<f64>,
    samples: usize,
}

impl PartialCorrelator {
    pub fn new(data: &DataMatrix) -> Self {
        Self::from_covariance(data.covariance(), data.n_samples())
    }

    pub fn from_covariance(covariance: DMatrix<f64>, samples: usize) -> Self {
        assert_eq!(
            covariance.nrows(),
            covariance.ncols(),
            "covariance must be square"
        );
        Self {
            covariance,
            samples,
        }
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn partial_correlation(
        &self,
        i: usize,
        j: usize,
        cond: &[usize],
    ) -> Result<f64, StatsError> {
        check_query(i, j, cond)?;
        let p = self.covariance.nrows();
        if i >= p || j >= p || cond.iter().any(|&c| c >= p) {
            return Err(StatsError::InvalidInput("column out of range".into()));
        }
        let sigma = &self.covariance;
        let (mut s_ii, mut s_jj, mut s_ij) = (sigma[(i, i)], sigma[(j, j)], sigma[(i, j)]);
        let (raw_ii, raw_jj) = (s_ii, s_jj);
        if !cond.is_empty() {
            let k = cond.len();
            let s_cc = DMatrix::from_fn(k, k, |a, b| sigma[(cond[a], cond[b])]);
            let s_ci = DVector::from_fn(k, |a, _| sigma[(cond[a], i)]);
            let s_cj = DVector::from_fn(k, |a, _| sigma[(cond[a], j)]);
            let (w_i, w_j) = match s_cc.clone().cholesky() {
                Some(ch) => (ch.solve(&s_ci), ch.solve(&s_cj)),
                None => {
                    let pinv = pseudo_inverse(&s_cc);
                    (&pinv * &s_ci, &pinv * &s_cj)
                }
            };
            s_ii -= s_ci.dot(&w_i);
            s_jj -= s_cj.dot(&w_j);
            s_ij -= s_ci.dot(&w_j);
        }
        finish(s_ii, s_jj, s_ij, raw_ii, raw_jj, i, j)
    }

    /// Partial correlation of every pair in `vars` given all other members
    /// of `vars`, as a `|vars| × |vars|` matrix with ones on the diagonal.
    pub fn given_rest(&self, vars: &[usize]) -> Result<DMatrix<f64>, StatsError> {
        let q = vars.len();
        let p = self.covariance.nrows();
        if vars.iter().any(|&v| v >= p) {
            return Err(StatsError::InvalidInput("column out of range".into()));
        }
        let sub = DMatrix::from_fn(q, q, |a, b| self.covariance[(vars[a], vars[b])]);
        let precision = match sub.clone().cholesky() {
            Some(ch) => ch.inverse(),
            None => pseudo_inverse(&sub),
        };
        let mut out = DMatrix::identity(q, q);
        for a in 0..q {
            let (paa, raw) = (precision[(a, a)], sub[(a, a)]);
            // 1 / P_aa is the variance of `a` given the rest.
            if !(paa > 0.0) || !(1.0 / paa > DEGENERATE_RATIO * raw) || !paa.is_finite() {
                return Err(StatsError::Degenerate(format!(
                    "column {} has no residual variance",
                    vars[a]
                )));
            }
        }
        for a in 0..q {
            for b in a + 1..q {
                let r = -precision[(a, b)] / (precision[(a, a)] * precision[(b, b)]).sqrt();
                out[(a, b)] = r.clamp(-1.0, 1.0);
                out[(b, a)] = out[(a, b)];
            }
        }
        Ok(out)
    }
}

fn finish(
    s_ii: f64,
    s_jj: f64,
    s_ij: f64,
    raw_ii: f64,
    raw_jj: f64,
    i: usize,
    j: usize,
) -> Result<f64, StatsError> {
    for (v, raw, c) in [(s_ii, raw_ii, i), (s_jj, raw_jj, j)] {
        if !(v > DEGENERATE_RATIO * raw) {
            return Err(StatsError::Degenerate(format!(
                "column {c} has no residual variance"
            )));
        }
    }
    Ok((s_ij / (s_ii * s_jj).sqrt()).clamp(-1.0, 1.0))
}

pub(crate) fn pseudo_inverse(m: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = m.clone().svd(true, true);
    let tol = svd.singular_values.max() * (m.nrows().max(m.ncols()) as f64) * f64::EPSILON;
    svd.pseudo_inverse(tol).expect("SVD with U and V")
}
