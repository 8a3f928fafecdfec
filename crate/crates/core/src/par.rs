//! Index-ordered fan-out. With the `parallel` feature chunks run on the
//! current rayon pool; the merge always happens in chunk order.

use alloc::vec::Vec;
use core::ops::Range;

/// Split `0..len` into chunks, fold each chunk independently and return the
/// per-chunk accumulators in index order.
pub(crate) fn fold_chunks<A, F>(len: usize, chunk: usize, fold: F) -> Vec<A>
where
    A: Send,
    F: Fn(Range<usize>) -> A + Sync + Send,
{
    let chunk = chunk.max(1);
    let n_chunks = len.div_ceil(chunk);
    let range = move |c: usize| (c * chunk)..((c + 1) * chunk).min(len);

    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n_chunks).into_par_iter().map(|c| fold(range(c))).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n_chunks).map(|c| fold(range(c))).collect()
    }
}
