//! Small hand-built grouped DAGs illustrating when (C1) and (C2) hold.
//!
//! Node numbering follows the grouped convention: `X1..Xn` are `0..n`,
//! `Y1..Ym` are `n..n+m`.

use super::GroupedDag;

fn build(n: usize, m: usize, edges: &[(usize, usize)]) -> GroupedDag {
    GroupedDag::new(n, m, edges.iter().copied()).expect("gallery graphs are valid")
}

/// `X1 → Y ← X2`: a cross-regional v-structure. (C1) holds with `S = ∅`.
pub fn c1_v_structure() -> GroupedDag {
    build(2, 1, &[(0, 2), (1, 2)])
}

/// X1..X5, Y1..Y2. `X1 ⫫ X4 | X5` through the chain `X1 → X5 → X4`, but
/// given `X5, Y` the path `X1 → X2 → Y1 ← X3 ← X4` opens. (C1) holds.
pub fn c1_separated_through_chain() -> GroupedDag {
    // X1=0 X2=1 X3=2 X4=3 X5=4 Y1=5 Y2=6
    build(
        5,
        2,
        &[(0, 4), (4, 3), (0, 1), (1, 5), (3, 2), (2, 5), (5, 6)],
    )
}

/// `X1 → X3 → X2`, `X1 → Y1 → Y2 ← X2`. The only path through Y has two
/// adjacent Y-nodes, so conditioning on Y never opens it. (C1) fails.
pub fn c1_fails_adjacent_y() -> GroupedDag {
    // X1=0 X2=1 X3=2 Y1=3 Y2=4
    build(3, 2, &[(0, 2), (2, 1), (0, 3), (3, 4), (1, 4)])
}

/// `X1 → X2 → X3`, `X1 → Y1 ← X2`. Separating X1 from X3 needs X2, which
/// also blocks the only path through Y. (C1) fails.
pub fn c1_fails_blocked_inside_x() -> GroupedDag {
    // X1=0 X2=1 X3=2 Y1=3
    build(3, 1, &[(0, 1), (1, 2), (0, 3), (1, 3)])
}

/// `Y1 ← X1 → Y2` with `Y1 → Y3 → Y2`: `Y1 ⫫̸ Y2 | Y3` through the
/// confounder, `Y1 ⫫ Y2 | Y3, X`. (C2) holds.
pub fn c2_confounded_chain() -> GroupedDag {
    // X1=0 Y1=1 Y2=2 Y3=3
    build(1, 3, &[(0, 1), (0, 2), (1, 3), (3, 2)])
}

/// `Y1 ← X1 → Y2` with a direct edge `Y1 → Y2`: the pair cannot be
/// separated inside Y. (C2) fails.
pub fn c2_fails_adjacent_y() -> GroupedDag {
    // X1=0 Y1=1 Y2=2
    build(1, 2, &[(0, 1), (0, 2), (1, 2)])
}

/// `Y1 ← X1 → X3 ← X2 → Y2` with `Y1 → Y3 → Y2`: the path through X has an
/// unopened collider at X3, so `S = {Y3}` separates Y1 and Y2 with and
/// without X. (C2) fails.
pub fn c2_fails_collider_in_x() -> GroupedDag {
    // X1=0 X2=1 X3=2 Y1=3 Y2=4 Y3=5
    build(3, 3, &[(0, 3), (0, 2), (1, 2), (1, 4), (3, 5), (5, 4)])
}
