use serde::{Deserialize, Serialize};

use super::{check_alpha, edge_density, AlgorithmError, DirectionReport};
use crate::citest::{CiBackend, CiError, CiQuery};
use crate::graph::{Group, UndirectedGraph};
use crate::pc::skeleton;

/// Densities finished before a failure, in computation order
/// X, X|Y, Y, Y|X.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PartialDensities {
    pub dens_x: Option<f64>,
    pub dens_x_given_y: Option<f64>,
    pub dens_y: Option<f64>,
    pub dens_y_given_x: Option<f64>,
}

impl PartialDensities {
    fn slot(&mut self, group: Group, conditioned: bool) -> &mut Option<f64> {
        match (group, conditioned) {
            (Group::X, false) => &mut self.dens_x,
            (Group::X, true) => &mut self.dens_x_given_y,
            (Group::Y, false) => &mut self.dens_y,
            (Group::Y, true) => &mut self.dens_y_given_x,
        }
    }
}

/// Skeleton-based procedure: PC skeletons of each group with and without
/// the other group in every conditioning set.
pub fn vecci_pc(backend: &CiBackend, alpha: f64) -> Result<DirectionReport, AlgorithmError> {
    vecci_pc_with(backend, alpha, None, None)
}

/// [`vecci_pc`] with a one-sided restriction and a bound on the skeleton's
/// conditioning-set size.
pub fn vecci_pc_with(
    backend: &CiBackend,
    alpha: f64,
    one_sided: Option<Group>,
    max_cond: Option<usize>,
) -> Result<DirectionReport, AlgorithmError> {
    run(alpha, one_sided, |group, conditioned| {
        let extra = conditioned.then(|| group.other());
        let s = skeleton(backend.members(group), backend, extra, max_cond)?;
        Ok((edge_density(&s.graph), s.tests))
    })
}

/// Pairwise procedure: each pair inside a group is tested given all other
/// members of the group, once alone and once with the other group added.
/// Issues exactly `n(n-1) + m(m-1)` tests, or half of that when one-sided.
pub fn vecci_full(
    backend: &CiBackend,
    alpha: f64,
    one_sided: Option<Group>,
) -> Result<DirectionReport, AlgorithmError> {
    run(alpha, one_sided, |group, conditioned| {
        let members = backend.members(group);
        let q = members.len();
        let extra = conditioned.then(|| group.other());
        let mut g = UndirectedGraph::empty(q);
        let mut tests = 0;
        for a in 0..q {
            for b in a + 1..q {
                let rest = members
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != a && k != b)
                    .map(|(_, &v)| v);
                tests += 1;
                if !backend.decide(&CiQuery::new(members[a], members[b], rest, extra))? {
                    g.add_edge(a, b);
                }
            }
        }
        Ok((edge_density(&g), tests))
    })
}

fn run(
    alpha: f64,
    one_sided: Option<Group>,
    mut density: impl FnMut(Group, bool) -> Result<(f64, u64), CiError>,
) -> Result<DirectionReport, AlgorithmError> {
    check_alpha(alpha)?;
    let mut partial = PartialDensities::default();
    let mut tests = 0;
    for group in [Group::X, Group::Y] {
        if one_sided.is_some_and(|side| side != group) {
            *partial.slot(group, false) = Some(0.0);
            *partial.slot(group, true) = Some(0.0);
            continue;
        }
        for conditioned in [false, true] {
            let (d, t) = density(group, conditioned)
                .map_err(|source| AlgorithmError::Test { source, partial })?;
            *partial.slot(group, conditioned) = Some(d);
            tests += t;
        }
    }
    let value = |v: Option<f64>| v.expect("every density computed");
    Ok(DirectionReport::from_densities(
        value(partial.dens_x),
        value(partial.dens_x_given_y),
        value(partial.dens_y),
        value(partial.dens_y_given_x),
        alpha,
        tests,
    ))
}
