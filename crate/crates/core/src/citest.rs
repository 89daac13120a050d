//! A single conditional-independence interface over three backends: the
//! exact d-separation oracle, partial correlation with a Fisher-z test, and
//! kernel-regression residuals tested with distance correlation.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{d_separated_unchecked, GraphError, Group, GroupedDag};
use crate::seed::mix_seed;
use crate::stats::{
    distance_correlation_test, fisher_z_decision, kernel_ridge_residuals, residualize, DataMatrix,
    KernelRidge, PartialCorrelator, StatsError,
};

/// How conditioning on a whole group is realized by the data backends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConditioningMode {
    /// The group's columns join the conditioning set of every test.
    Explicit,
    /// All other columns are first replaced by their OLS residuals on the
    /// group; tests then run on the residuals.
    #[default]
    Residualize,
}

/// `i ⫫ j | cond` plus, optionally, every member of `extra_group`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CiQuery {
    pub i: usize,
    pub j: usize,
    pub cond: Vec<usize>,
    pub extra_group: Option<Group>,
}

impl CiQuery {
    pub fn new(
        i: usize,
        j: usize,
        cond: impl IntoIterator<Item = usize>,
        extra_group: Option<Group>,
    ) -> Self {
        Self {
            i,
            j,
            cond: cond.into_iter().collect(),
            extra_group,
        }
    }
}

impl fmt::Display for CiQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} _||_ {} | {:?}", self.i, self.j, self.cond)?;
        if let Some(g) = self.extra_group {
            write!(f, " + {g:?}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CiError {
    #[error("invalid query {query}: {reason}")]
    InvalidQuery { query: CiQuery, reason: String },
    #[error("test {query} failed: {source}")]
    Stats {
        query: CiQuery,
        #[source]
        source: StatsError,
    },
    #[error("invalid backend: {0}")]
    Setup(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Data(#[from] StatsError),
}

/// Settings of the nonlinear backend.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonlinearSettings {
    pub alpha_sig: f64,
    pub permutations: usize,
    pub kernel: KernelRidge,
    /// Root of the per-query permutation streams.
    pub seed: u64,
}

impl Default for NonlinearSettings {
    fn default() -> Self {
        Self {
            alpha_sig: 0.01,
            permutations: 199,
            kernel: KernelRidge {
                tune: true,
                ..KernelRidge::default()
            },
            seed: 0,
        }
    }
}

/// A configured conditional-independence decision procedure.
///
/// Variables are node indices for the oracle and column indices for the
/// data backends. The backend is read-only after construction apart from
/// its atomic test counter and an internal precision-matrix cache, so
/// `decide` may be called from several threads.
#[derive(Debug)]
pub struct CiBackend {
    kind: Kind,
    mode: ConditioningMode,
    x: Vec<usize>,
    y: Vec<usize>,
    counter: AtomicU64,
}

#[derive(Debug)]
enum Kind {
    Oracle(GroupedDag),
    ParCorr(Box<ParCorr>),
    Nonlinear(Box<Nonlinear>),
}

/// Group whose within-group partial correlations are cached, and the other
/// group when it is conditioned on as well.
type RestKey = (Group, Option<Group>);

#[derive(Debug)]
struct ParCorr {
    alpha_sig: f64,
    samples: usize,
    full: PartialCorrelator,
    /// Residuals of all non-group columns on X (index 0) or Y (index 1).
    residualized: [ResidualSpace; 2],
    rest_cache: Mutex<HashMap<RestKey, Arc<DMatrix<f64>>>>,
    data: DataMatrix,
}

#[derive(Debug, Default)]
struct ResidualSpace {
    inner: OnceLock<Result<(PartialCorrelator, Vec<usize>), StatsError>>,
}

#[derive(Debug)]
struct Nonlinear {
    data: DataMatrix,
    settings: NonlinearSettings,
}

fn group_slot(g: Group) -> usize {
    match g {
        Group::X => 0,
        Group::Y => 1,
    }
}

impl CiBackend {
    /// Exact d-separation in `dag`.
    pub fn oracle(dag: GroupedDag) -> Self {
        let (x, y) = (dag.x_nodes(), dag.y_nodes());
        Self {
            kind: Kind::Oracle(dag),
            mode: ConditioningMode::Explicit,
            x,
            y,
            counter: AtomicU64::new(0),
        }
    }

    /// Partial-correlation backend with a Fisher-z test at `alpha_sig`.
    pub fn par_corr(
        data: DataMatrix,
        x: Vec<usize>,
        y: Vec<usize>,
        alpha_sig: f64,
        mode: ConditioningMode,
    ) -> Result<Self, CiError> {
        check_groups(&data, &x, &y)?;
        check_alpha(alpha_sig)?;
        let state = ParCorr {
            alpha_sig,
            samples: data.n_samples(),
            full: PartialCorrelator::new(&data),
            residualized: Default::default(),
            rest_cache: Mutex::new(HashMap::new()),
            data,
        };
        Ok(Self {
            kind: Kind::ParCorr(Box::new(state)),
            mode,
            x,
            y,
            counter: AtomicU64::new(0),
        })
    }

    /// Kernel ridge regression on the conditioning variables followed by a
    /// permutation distance-correlation test of the two residuals.
    pub fn nonlinear(
        data: DataMatrix,
        x: Vec<usize>,
        y: Vec<usize>,
        settings: NonlinearSettings,
    ) -> Result<Self, CiError> {
        check_groups(&data, &x, &y)?;
        check_alpha(settings.alpha_sig)?;
        if settings.permutations < 99 {
            return Err(CiError::Setup("at least 99 permutations required".into()));
        }
        Ok(Self {
            kind: Kind::Nonlinear(Box::new(Nonlinear { data, settings })),
            mode: ConditioningMode::Explicit,
            x,
            y,
            counter: AtomicU64::new(0),
        })
    }

    pub fn members(&self, group: Group) -> &[usize] {
        match group {
            Group::X => &self.x,
            Group::Y => &self.y,
        }
    }

    pub fn mode(&self) -> ConditioningMode {
        self.mode
    }

    pub fn is_oracle(&self) -> bool {
        matches!(self.kind, Kind::Oracle(_))
    }

    /// Sample count of the data backends.
    pub fn samples(&self) -> Option<usize> {
        match &self.kind {
            Kind::Oracle(_) => None,
            Kind::ParCorr(p) => Some(p.samples),
            Kind::Nonlinear(n) => Some(n.data.n_samples()),
        }
    }

    /// Largest total conditioning dimension (conditioning set plus extra
    /// group) a test can use; `None` when unbounded.
    pub fn max_conditioning(&self) -> Option<usize> {
        self.samples().map(|n| n.saturating_sub(4))
    }

    /// Number of tests performed so far.
    pub fn tests_performed(&self) -> u64 {
        self.counter.load(Ordering::Relaxed)
    }

    /// `true` means the backend judges `i` and `j` independent.
    pub fn decide(&self, query: &CiQuery) -> Result<bool, CiError> {
        let extra = self.validate(query)?;
        self.counter.fetch_add(1, Ordering::Relaxed);
        match &self.kind {
            Kind::Oracle(dag) => {
                let mut cond = query.cond.clone();
                cond.extend_from_slice(extra);
                Ok(d_separated_unchecked(dag.dag(), query.i, query.j, &cond))
            }
            Kind::ParCorr(state) => self.decide_par_corr(state, query, extra),
            Kind::Nonlinear(state) => decide_nonlinear(state, query, extra),
        }
    }

    fn validate<'a>(&'a self, query: &CiQuery) -> Result<&'a [usize], CiError> {
        let invalid = |reason: &str| CiError::InvalidQuery {
            query: query.clone(),
            reason: reason.into(),
        };
        let universe = self.x.len() + self.y.len();
        let in_universe = |v: &usize| self.x.contains(v) || self.y.contains(v);
        if query.i == query.j {
            return Err(invalid("endpoints coincide"));
        }
        if !in_universe(&query.i) || !in_universe(&query.j) || !query.cond.iter().all(in_universe) {
            return Err(invalid(&format!(
                "variable outside the {universe} grouped variables"
            )));
        }
        if query.cond.contains(&query.i) || query.cond.contains(&query.j) {
            return Err(invalid("endpoint inside conditioning set"));
        }
        let extra: &[usize] = match query.extra_group {
            Some(g) => self.members(g),
            None => &[],
        };
        if extra.contains(&query.i) || extra.contains(&query.j) {
            return Err(invalid("endpoint belongs to the extra group"));
        }
        Ok(extra)
    }

    fn decide_par_corr(
        &self,
        state: &ParCorr,
        query: &CiQuery,
        extra: &[usize],
    ) -> Result<bool, CiError> {
        let stats_err = |source| CiError::Stats {
            query: query.clone(),
            source,
        };
        let cond: Vec<usize> = query
            .cond
            .iter()
            .copied()
            .filter(|c| !extra.contains(c))
            .collect();
        let cond_size = cond.len() + extra.len();
        let whole_group = self.whole_group(query, &cond);
        let r = match (query.extra_group, self.mode) {
            (Some(g), ConditioningMode::Residualize) => {
                let (space, index) = state
                    .residual_space(g, self.members(g))
                    .map_err(stats_err)?;
                match whole_group {
                    Some(own) => {
                        let rest = state.given_rest(own, Some(g), || {
                            let mapped: Vec<usize> =
                                self.members(own).iter().map(|&v| index[v]).collect();
                            space.given_rest(&mapped)
                        });
                        let rest = rest.map_err(stats_err)?;
                        self.lookup(&rest, own, query)
                    }
                    None => {
                        let mapped: Vec<usize> = cond.iter().map(|&v| index[v]).collect();
                        space
                            .partial_correlation(index[query.i], index[query.j], &mapped)
                            .map_err(stats_err)?
                    }
                }
            }
            (extra_group, _) => {
                let mut full_cond = cond.clone();
                full_cond.extend_from_slice(extra);
                match whole_group {
                    Some(own) => {
                        let rest = state.given_rest(own, extra_group, || {
                            let mut vars = self.members(own).to_vec();
                            vars.extend_from_slice(extra);
                            state.full.given_rest(&vars)
                        });
                        let rest = rest.map_err(stats_err)?;
                        self.lookup(&rest, own, query)
                    }
                    None => state
                        .full
                        .partial_correlation(query.i, query.j, &full_cond)
                        .map_err(stats_err)?,
                }
            }
        };
        let outcome =
            fisher_z_decision(r, state.samples, cond_size, state.alpha_sig).map_err(stats_err)?;
        Ok(outcome.independent)
    }

    /// The group whose members are exactly `{i, j} ∪ cond`, if any.
    fn whole_group(&self, query: &CiQuery, cond: &[usize]) -> Option<Group> {
        [Group::X, Group::Y].into_iter().find(|&g| {
            let members = self.members(g);
            members.len() == cond.len() + 2
                && members.contains(&query.i)
                && members.contains(&query.j)
                && cond.iter().all(|c| members.contains(c))
        })
    }

    fn lookup(&self, rest: &DMatrix<f64>, own: Group, query: &CiQuery) -> f64 {
        let members = self.members(own);
        let pos = |v| members.iter().position(|&m| m == v).expect("member");
        rest[(pos(query.i), pos(query.j))]
    }
}

impl ParCorr {
    fn residual_space(
        &self,
        g: Group,
        members: &[usize],
    ) -> Result<(&PartialCorrelator, &[usize]), StatsError> {
        let slot = &self.residualized[group_slot(g)];
        let built = slot.inner.get_or_init(|| {
            let targets: Vec<usize> = (0..self.data.n_columns())
                .filter(|c| !members.contains(c))
                .collect();
            let res = residualize(&self.data, &targets, members)?;
            // Residual degrees of freedom are N - 1 - |group|; the scale
            // cancels in every correlation.
            let correlator = PartialCorrelator::new(&res.data);
            let mut index = vec![usize::MAX; self.data.n_columns()];
            for (k, &t) in targets.iter().enumerate() {
                index[t] = k;
            }
            Ok((correlator, index))
        });
        match built {
            Ok((c, idx)) => Ok((c, idx.as_slice())),
            Err(e) => Err(e.clone()),
        }
    }

    fn given_rest(
        &self,
        own: Group,
        extra: Option<Group>,
        compute: impl FnOnce() -> Result<DMatrix<f64>, StatsError>,
    ) -> Result<Arc<DMatrix<f64>>, StatsError> {
        let key = (own, extra);
        if let Some(hit) = self.rest_cache.lock().expect("cache lock").get(&key) {
            return Ok(Arc::clone(hit));
        }
        let value = Arc::new(compute()?);
        self.rest_cache
            .lock()
            .expect("cache lock")
            .insert(key, Arc::clone(&value));
        Ok(value)
    }
}

fn decide_nonlinear(state: &Nonlinear, query: &CiQuery, extra: &[usize]) -> Result<bool, CiError> {
    let stats_err = |source| CiError::Stats {
        query: query.clone(),
        source,
    };
    let mut regressors: Vec<usize> = query.cond.iter().chain(extra).copied().collect();
    regressors.sort_unstable();
    regressors.dedup();
    let n = state.data.n_samples();
    if n < regressors.len() + 4 {
        return Err(stats_err(StatsError::InsufficientSamples {
            samples: n,
            required: regressors.len() + 4,
        }));
    }
    let z = state.data.select(&regressors);
    let targets = state.data.select(&[query.i, query.j]);
    let residuals =
        kernel_ridge_residuals(&z, &targets, state.settings.kernel).map_err(stats_err)?;
    let (lo, hi) = (query.i.min(query.j), query.i.max(query.j));
    let stream = mix_seed(
        state.settings.seed,
        [lo as u64, hi as u64]
            .into_iter()
            .chain(regressors.iter().map(|&v| v as u64)),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(stream);
    let a = residuals.columns(0, 1).into_owned();
    let b = residuals.columns(1, 1).into_owned();
    let outcome = distance_correlation_test(
        &a,
        &b,
        state.settings.permutations,
        state.settings.alpha_sig,
        &mut rng,
    )
    .map_err(stats_err)?;
    Ok(outcome.independent)
}

fn check_groups(data: &DataMatrix, x: &[usize], y: &[usize]) -> Result<(), CiError> {
    if x.is_empty() || y.is_empty() {
        return Err(CiError::Setup(
            "both groups need at least one column".into(),
        ));
    }
    if x.iter().any(|v| y.contains(v)) {
        return Err(CiError::Setup("groups overlap".into()));
    }
    let mut all: Vec<usize> = x.iter().chain(y).copied().collect();
    all.sort_unstable();
    if all.windows(2).any(|w| w[0] == w[1]) {
        return Err(CiError::Setup("a column is listed twice".into()));
    }
    if all.last().is_some_and(|&v| v >= data.n_columns()) {
        return Err(CiError::Setup("group column out of range".into()));
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<(), CiError> {
    if (0.0..=1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(CiError::Setup(format!(
            "significance level {alpha} outside [0, 1]"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{d_separated, gallery, SeparationQuery};
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn v_structure_data(n: usize, seed: u64) -> DataMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut values = DMatrix::zeros(n, 3);
        for r in 0..n {
            let a: f64 = rng.sample(StandardNormal);
            let b: f64 = rng.sample(StandardNormal);
            let e: f64 = rng.sample(StandardNormal);
            values[(r, 0)] = a;
            values[(r, 1)] = b;
            values[(r, 2)] = 0.8 * a - 0.7 * b + 0.5 * e;
        }
        DataMatrix::unnamed(values).unwrap()
    }

    #[test]
    fn oracle_matches_d_separation() {
        let g = gallery::c1_separated_through_chain();
        let backend = CiBackend::oracle(g.clone());
        for (i, j, cond, extra) in [
            (0, 3, vec![4], None),
            (0, 3, vec![4], Some(Group::Y)),
            (5, 6, vec![], Some(Group::X)),
            (1, 2, vec![], None),
        ] {
            let mut full = cond.clone();
            if let Some(e) = extra {
                full.extend(g.nodes_of(e));
            }
            let expect = d_separated(g.dag(), &SeparationQuery::new(i, j, full)).unwrap();
            assert_eq!(
                backend.decide(&CiQuery::new(i, j, cond, extra)).unwrap(),
                expect
            );
        }
        assert_eq!(backend.tests_performed(), 4);
    }

    #[test]
    fn oracle_v_structure_dependent_given_y() {
        let backend = CiBackend::oracle(gallery::c1_v_structure());
        assert!(backend.decide(&CiQuery::new(0, 1, [], None)).unwrap());
        assert!(!backend
            .decide(&CiQuery::new(0, 1, [], Some(Group::Y)))
            .unwrap());
    }

    #[test]
    fn modes_agree_on_v_structure() {
        let data = v_structure_data(400, 5);
        for mode in [ConditioningMode::Explicit, ConditioningMode::Residualize] {
            let b = CiBackend::par_corr(data.clone(), vec![0, 1], vec![2], 0.01, mode).unwrap();
            assert!(!b.decide(&CiQuery::new(0, 1, [], Some(Group::Y))).unwrap());
        }
    }

    #[test]
    fn rejects_invalid_queries() {
        let data = v_structure_data(50, 1);
        let b = CiBackend::par_corr(
            data,
            vec![0, 1],
            vec![2],
            0.01,
            ConditioningMode::Residualize,
        )
        .unwrap();
        assert!(matches!(
            b.decide(&CiQuery::new(0, 0, [], None)),
            Err(CiError::InvalidQuery { .. })
        ));
        assert!(matches!(
            b.decide(&CiQuery::new(0, 2, [], Some(Group::Y))),
            Err(CiError::InvalidQuery { .. })
        ));
        assert!(matches!(
            b.decide(&CiQuery::new(0, 1, [7], None)),
            Err(CiError::InvalidQuery { .. })
        ));
        assert_eq!(b.tests_performed(), 0);
    }

    #[test]
    fn duplicate_column_is_dependent() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let values = DMatrix::from_fn(60, 3, |_, _| rng.sample::<f64, _>(StandardNormal));
        let mut values = values;
        let noise = DMatrix::from_fn(60, 1, |_, _| 0.1 * rng.sample::<f64, _>(StandardNormal));
        let c0 = values.column(0) + noise.column(0);
        values.set_column(1, &c0);
        let data = DataMatrix::unnamed(values).unwrap();
        let par = CiBackend::par_corr(
            data.clone(),
            vec![0, 1],
            vec![2],
            0.01,
            ConditioningMode::Explicit,
        )
        .unwrap();
        assert!(!par.decide(&CiQuery::new(0, 1, [], None)).unwrap());
        let nl =
            CiBackend::nonlinear(data, vec![0, 1], vec![2], NonlinearSettings::default()).unwrap();
        assert!(!nl.decide(&CiQuery::new(0, 1, [], None)).unwrap());
    }

    #[test]
    fn setup_errors() {
        let data = v_structure_data(20, 0);
        assert!(CiBackend::par_corr(
            data.clone(),
            vec![0],
            vec![0, 1],
            0.01,
            ConditioningMode::Explicit
        )
        .is_err());
        assert!(CiBackend::par_corr(
            data.clone(),
            vec![],
            vec![1],
            0.01,
            ConditioningMode::Explicit
        )
        .is_err());
        assert!(
            CiBackend::par_corr(data, vec![0], vec![5], 0.01, ConditioningMode::Explicit).is_err()
        );
    }
}
