//! Synthetic grouped models with a known direction X → Y.
//!
//! X follows a linear SCM over its own random DAG. The effect noise `η_Y`
//! follows a second linear SCM over a DAG on the Y block, and
//! `Y = A f(X) + η_Y` with `f` the identity or the entrywise square.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::graph::{random_grouped_dag, Dag, Group, GroupedDag};
use crate::stats::DataMatrix;

/// Range of the internal SCM coefficient magnitudes.
pub const INTERNAL_COEFF_RANGE: (f64, f64) = (0.1, 0.7);
/// Range of the per-node noise variances.
pub const NOISE_VARIANCE_RANGE: (f64, f64) = (0.5, 2.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mechanism {
    #[default]
    Linear,
    /// `Y = A (X ∘ X) + η_Y`.
    Quadratic,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SynthError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelParams {
    pub n: usize,
    pub m: usize,
    pub sample_size: usize,
    pub dens_x: f64,
    pub dens_y: f64,
    pub dens_a: f64,
    /// Interaction magnitudes are uniform on this interval with a random sign.
    pub effect_interval: (f64, f64),
    pub mechanism: Mechanism,
    pub seed: u64,
    /// When false, `η_Y` is identically zero.
    pub effect_noise: bool,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            n: 30,
            m: 30,
            sample_size: 100,
            dens_x: 0.1,
            dens_y: 0.1,
            dens_a: 0.5,
            effect_interval: (0.0, 0.7),
            mechanism: Mechanism::Linear,
            seed: 0,
            effect_noise: true,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |msg: String| Err(SynthError::InvalidParameter(msg));
        if self.n == 0 || self.m == 0 {
            return bad("both groups need at least one variable".into());
        }
        if self.sample_size < 2 {
            return bad(format!("sample size {} below 2", self.sample_size));
        }
        for (name, v) in [
            ("dens_x", self.dens_x),
            ("dens_y", self.dens_y),
            ("dens_a", self.dens_a),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return bad(format!("{name} = {v} outside [0, 1]"));
            }
        }
        let (lo, hi) = self.effect_interval;
        if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi) {
            return bad(format!(
                "effect interval [{lo}, {hi}] must satisfy 0 <= lo <= hi"
            ));
        }
        Ok(())
    }
}

/// Linear coefficient of one internal edge, in node indices of the
/// structure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub parent: usize,
    pub child: usize,
    pub weight: f64,
}

/// Ground truth of one synthetic model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearGroupModel {
    /// X edges, the η_Y DAG on the Y block, and the support of `A`.
    pub structure: GroupedDag,
    pub mechanism: Mechanism,
    /// Coefficients of the X SCM and of the η_Y SCM.
    pub internal_coeffs: Vec<Coefficient>,
    /// Nonzero entries of `A`: `parent` is an x-node, `child` a y-node.
    pub interaction: Vec<Coefficient>,
    /// Per node: noise variance of `X_i`, or of the innovation of `η_{Y_k}`.
    pub noise_variances: Vec<f64>,
    pub effect_noise: bool,
}

impl LinearGroupModel {
    pub fn n(&self) -> usize {
        self.structure.n()
    }

    pub fn m(&self) -> usize {
        self.structure.m()
    }

    /// DAG of the η_Y SCM in Y-local indices.
    pub fn eta_y_dag(&self) -> Dag {
        self.structure
            .dag()
            .induced_subgraph(&self.structure.y_nodes())
    }

    /// `A` as an `m × n` matrix.
    pub fn interaction_matrix(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut a = DMatrix::zeros(self.m(), n);
        for c in &self.interaction {
            a[(c.child - n, c.parent)] = c.weight;
        }
        a
    }

    /// Internal coefficient matrix `B` of `group` (`B[child, parent]`, in
    /// group-local indices).
    pub fn internal_matrix(&self, group: Group) -> DMatrix<f64> {
        let n = self.n();
        let (offset, size) = match group {
            Group::X => (0, n),
            Group::Y => (n, self.m()),
        };
        let mut b = DMatrix::zeros(size, size);
        for c in &self.internal_coeffs {
            if self.structure.group_of(c.child) == group {
                b[(c.child - offset, c.parent - offset)] = c.weight;
            }
        }
        b
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    /// Draws `samples` rows; columns are `X1..Xn, Y1..Ym`.
    pub fn sample<R: Rng + ?Sized>(&self, samples: usize, rng: &mut R) -> DataMatrix {
        let (n, m) = (self.n(), self.m());
        let order = self.structure.dag().topological_order();
        let mut parents: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n + m];
        for c in &self.internal_coeffs {
            parents[c.child].push((c.parent, c.weight));
        }
        let sd: Vec<f64> = self.noise_variances.iter().map(|v| v.sqrt()).collect();
        let mut values = DMatrix::zeros(samples, n + m);
        let mut eta = vec![0.0; n + m];
        for r in 0..samples {
            // X by its SCM, η_Y by its own; both follow the joint order.
            for &v in &order {
                let z: f64 = rng.sample(StandardNormal);
                let own = if v < n {
                    parents[v]
                        .iter()
                        .map(|&(p, w)| w * values[(r, p)])
                        .sum::<f64>()
                } else {
                    parents[v].iter().map(|&(p, w)| w * eta[p]).sum::<f64>()
                };
                let value = own + sd[v] * z;
                if v < n {
                    values[(r, v)] = value;
                } else {
                    eta[v] = if self.effect_noise { value } else { 0.0 };
                }
            }
            for k in n..n + m {
                values[(r, k)] = eta[k];
            }
            for c in &self.interaction {
                let x = values[(r, c.parent)];
                let fx = match self.mechanism {
                    Mechanism::Linear => x,
                    Mechanism::Quadratic => x * x,
                };
                values[(r, c.child)] += c.weight * fx;
            }
        }
        DataMatrix::new(values, column_names(n, m)).expect("finite samples with unique names")
    }
}

pub fn column_names(n: usize, m: usize) -> Vec<String> {
    (1..=n)
        .map(|i| format!("X{i}"))
        .chain((1..=m).map(|k| format!("Y{k}")))
        .collect()
}

/// Draws a random model from `params` (ignoring `params.seed`) and samples
/// `params.sample_size` rows from it.
pub fn sample_model<R: Rng + ?Sized>(
    params: &ModelParams,
    rng: &mut R,
) -> Result<(LinearGroupModel, DataMatrix), SynthError> {
    let model = random_model(params, rng)?;
    let data = model.sample(params.sample_size, rng);
    Ok((model, data))
}

/// [`sample_model`] driven by a generator seeded from `params.seed`.
pub fn sample_model_seeded(
    params: &ModelParams,
) -> Result<(LinearGroupModel, DataMatrix), SynthError> {
    sample_model(params, &mut ChaCha8Rng::seed_from_u64(params.seed))
}

/// Draws structure and coefficients without sampling data.
pub fn random_model<R: Rng + ?Sized>(
    params: &ModelParams,
    rng: &mut R,
) -> Result<LinearGroupModel, SynthError> {
    params.validate()?;
    let structure = random_grouped_dag(
        params.n,
        params.m,
        params.dens_x,
        params.dens_y,
        params.dens_a,
        rng,
    );
    Ok(model_on(structure, params, rng))
}

/// Coefficients and variances for a fixed structure.
pub fn model_on<R: Rng + ?Sized>(
    structure: GroupedDag,
    params: &ModelParams,
    rng: &mut R,
) -> LinearGroupModel {
    let mut internal_coeffs = Vec::new();
    let mut interaction = Vec::new();
    for &(parent, child) in structure.dag().edges() {
        if structure.group_of(parent) != structure.group_of(child) {
            let weight = signed_uniform(params.effect_interval, rng);
            interaction.push(Coefficient {
                parent,
                child,
                weight,
            });
        } else {
            let weight = signed_uniform(INTERNAL_COEFF_RANGE, rng);
            internal_coeffs.push(Coefficient {
                parent,
                child,
                weight,
            });
        }
    }
    let (lo, hi) = NOISE_VARIANCE_RANGE;
    let noise_variances = (0..structure.dag().node_count())
        .map(|_| rng.random_range(lo..=hi))
        .collect();
    LinearGroupModel {
        structure,
        mechanism: params.mechanism,
        internal_coeffs,
        interaction,
        noise_variances,
        effect_noise: params.effect_noise,
    }
}

fn signed_uniform<R: Rng + ?Sized>((lo, hi): (f64, f64), rng: &mut R) -> f64 {
    let magnitude = if hi > lo {
        rng.random_range(lo..hi)
    } else {
        lo
    };
    if rng.random_bool(0.5) {
        magnitude
    } else {
        -magnitude
    }
}

/// The two-by-two toy model: `(X1, X2)` standard bivariate normal with
/// correlation `a`, noises `(η1, η2)` likewise with correlation `d`, and
/// `Y1 = b X1 + η1`, `Y2 = c X2 + η2`. Columns are `X1, X2, Y1, Y2`.
pub fn example1_sample<R: Rng + ?Sized>(
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    samples: usize,
    rng: &mut R,
) -> Result<DataMatrix, SynthError> {
    for (name, v) in [("a", a), ("d", d)] {
        if !(v.abs() < 1.0) {
            return Err(SynthError::InvalidParameter(format!(
                "{name} = {v} is not a valid correlation"
            )));
        }
    }
    if !(b.is_finite() && c.is_finite()) {
        return Err(SynthError::InvalidParameter(
            "b and c must be finite".into(),
        ));
    }
    if samples < 10 {
        return Err(SynthError::InvalidParameter(format!(
            "sample size {samples} below 10"
        )));
    }
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let pair = |rho: f64, rng: &mut R| {
        let u = normal.sample(rng);
        let w = normal.sample(rng);
        (u, rho * u + (1.0 - rho * rho).sqrt() * w)
    };
    let mut values = DMatrix::zeros(samples, 4);
    for r in 0..samples {
        let (x1, x2) = pair(a, rng);
        let (e1, e2) = pair(d, rng);
        values[(r, 0)] = x1;
        values[(r, 1)] = x2;
        values[(r, 2)] = b * x1 + e1;
        values[(r, 3)] = c * x2 + e2;
    }
    Ok(DataMatrix::new(values, column_names(2, 2)).expect("finite samples"))
}
