//! PC algorithm: order-independent skeleton search with optional
//! whole-group conditioning, and CPDAG orientation.

mod orient;
mod skeleton;

pub use orient::{orient_cpdag, Cpdag};
pub use skeleton::{skeleton, SkeletonResult};

/// Every subset of `pool` of size `k`, in lexicographic order of positions.
pub(crate) fn for_each_subset<E>(
    pool: &[usize],
    k: usize,
    mut f: impl FnMut(&[usize]) -> Result<bool, E>,
) -> Result<bool, E> {
    if k > pool.len() {
        return Ok(false);
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let mut subset = vec![0; k];
    loop {
        for (s, &i) in subset.iter_mut().zip(&idx) {
            *s = pool[i];
        }
        if f(&subset)? {
            return Ok(true);
        }
        // Advance to the next combination.
        let mut pos = k;
        loop {
            if pos == 0 {
                return Ok(false);
            }
            pos -= 1;
            if idx[pos] != pos + pool.len() - k {
                break;
            }
            if pos == 0 {
                return Ok(false);
            }
        }
        idx[pos] += 1;
        for q in pos + 1..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
}
