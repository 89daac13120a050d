use rand::seq::SliceRandom;
use rand::Rng;

use super::GroupedDag;

/// Draws a grouped DAG: each group gets a uniformly random topological
/// order and every forward pair inside X (resp. Y) becomes an edge with
/// probability `dens_x` (resp. `dens_y`). Every X→Y pair becomes an edge
/// with probability `dens_a`. Densities are clamped to `[0, 1]`.
pub fn random_grouped_dag<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    dens_x: f64,
    dens_y: f64,
    dens_a: f64,
    rng: &mut R,
) -> GroupedDag {
    assert!(n >= 1 && m >= 1, "both groups need at least one node");
    let mut edges = Vec::new();
    block_edges(0, n, dens_x, rng, &mut edges);
    block_edges(n, m, dens_y, rng, &mut edges);
    let dens_a = dens_a.clamp(0.0, 1.0);
    for x in 0..n {
        for y in n..n + m {
            if rng.random_bool(dens_a) {
                edges.push((x, y));
            }
        }
    }
    GroupedDag::new(n, m, edges).expect("forward edges over a permutation are acyclic")
}

fn block_edges<R: Rng + ?Sized>(
    offset: usize,
    size: usize,
    density: f64,
    rng: &mut R,
    out: &mut Vec<(usize, usize)>,
) {
    let density = density.clamp(0.0, 1.0);
    let mut order: Vec<usize> = (offset..offset + size).collect();
    order.shuffle(rng);
    for a in 0..size {
        for b in a + 1..size {
            if rng.random_bool(density) {
                out.push((order[a], order[b]));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_density_is_edgeless() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = random_grouped_dag(4, 5, 0.0, 0.0, 0.0, &mut rng);
        assert_eq!(g.dag().edge_count(), 0);
    }

    #[test]
    fn full_density_is_complete() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (n, m) = (4, 3);
        let g = random_grouped_dag(n, m, 1.0, 1.0, 1.0, &mut rng);
        assert_eq!(
            g.internal_edges(crate::graph::Group::X).len(),
            n * (n - 1) / 2
        );
        assert_eq!(
            g.internal_edges(crate::graph::Group::Y).len(),
            m * (m - 1) / 2
        );
        assert_eq!(g.cross_edges().len(), n * m);
    }

    #[test]
    fn seeded_draws_repeat() {
        let draw = || {
            let mut rng = ChaCha8Rng::seed_from_u64(99);
            random_grouped_dag(4, 4, 0.5, 0.5, 0.5, &mut rng)
        };
        assert_eq!(draw(), draw());
    }
}
