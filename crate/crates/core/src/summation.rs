//! Deterministic pairwise (tree) reductions.
//!
//! The reduction tree depends only on the input length: leaves are fixed
//! blocks of `LEAF` consecutive terms summed left to right, and interior
//! nodes always split at the same midpoint. Parallel execution only changes
//! who evaluates a node, never the order of the floating point additions, so
//! results are bit-identical for any thread count.

use num_complex::Complex64;
use std::ops::Add;

const LEAF: usize = 256;
/// Subtrees smaller than this are evaluated on the current thread.
const PAR_CUTOFF: usize = 1 << 14;

fn tree_sum<T, F>(lo: usize, hi: usize, zero: T, term: &F) -> T
where
    T: Copy + Send + Sync + Add<Output = T>,
    F: Fn(usize) -> T + Sync,
{
    let len = hi - lo;
    if len <= LEAF {
        let mut acc = zero;
        for i in lo..hi {
            acc = acc + term(i);
        }
        return acc;
    }
    // split on a leaf boundary so the tree shape is a pure function of len
    let leaves = len.div_ceil(LEAF);
    let mid = lo + (leaves / 2) * LEAF;
    if len >= PAR_CUTOFF {
        let (a, b) = rayon::join(|| tree_sum(lo, mid, zero, term), || tree_sum(mid, hi, zero, term));
        a + b
    } else {
        tree_sum(lo, mid, zero, term) + tree_sum(mid, hi, zero, term)
    }
}

/// Pairwise sum of `term(i)` for `i` in `0..len`.
pub fn pairwise_sum_by<F>(len: usize, term: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    tree_sum(0, len, 0.0, &term)
}

/// Complex counterpart of [`pairwise_sum_by`].
pub fn pairwise_sum_complex_by<F>(len: usize, term: F) -> Complex64
where
    F: Fn(usize) -> Complex64 + Sync,
{
    tree_sum(0, len, Complex64::new(0.0, 0.0), &term)
}

pub fn pairwise_sum(values: &[f64]) -> f64 {
    pairwise_sum_by(values.len(), |i| values[i])
}
