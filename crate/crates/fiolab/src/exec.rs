//! Execution strategy helpers.
//!
//! Per-index maps parallelize over independent output slots, so their results
//! are bit-identical in both modes. Scalar reductions are order-sensitive in
//! floating point; [`ReductionMode`] picks between a plain sequential left
//! fold and a fixed-chunk parallel tree. Both are deterministic for a given
//! mode: the parallel tree uses a chunk size that does not depend on thread
//! scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Chunk length for the parallel reduction tree.
const CHUNK: usize = 4096;

/// How scalar reductions (norms, integrals) combine their terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReductionMode {
    /// Sequential left fold in index order.
    #[default]
    Deterministic,
    /// Fixed-chunk tree; parallel when the `parallel` feature is enabled.
    Parallel,
}

/// Map `f` over `0..n`, collecting in index order.
pub fn map_collect<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Sequential variant of [`map_collect`], kept for benchmarking both paths.
pub fn map_collect_seq<T>(n: usize, f: impl Fn(usize) -> T) -> Vec<T> {
    (0..n).map(f).collect()
}

/// Sum `term(i)` for `i` in `0..n` under the given reduction mode.
pub fn sum_with(n: usize, term: impl Fn(usize) -> f64 + Sync + Send, mode: ReductionMode) -> f64 {
    match mode {
        ReductionMode::Deterministic => (0..n).map(term).sum(),
        ReductionMode::Parallel => {
            let chunks = n.div_ceil(CHUNK);
            let partial = map_collect(chunks, |c| {
                let lo = c * CHUNK;
                let hi = (lo + CHUNK).min(n);
                (lo..hi).map(&term).sum::<f64>()
            });
            partial.into_iter().sum()
        }
    }
}
