//! Row-parallel execution of per-pixel kernels.
//!
//! Every image kernel writes each output row independently, so rows can be
//! farmed out to rayon without changing results: the work split never
//! reorders arithmetic within a row. With the `parallel` feature disabled
//! the same closures run on a plain sequential loop.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Apply `f` to every `width`-sized row of `out`, passing the row index.
/// Rows are cheap (a few hundred samples), so splits are kept to at least
/// 16 rows to keep scheduling overhead below the row work.
#[cfg(feature = "parallel")]
pub(crate) fn process_rows<S, F>(out: &mut [S], width: usize, f: F)
where
    S: Send,
    F: Fn(usize, &mut [S]) + Send + Sync,
{
    out.par_chunks_mut(width)
        .enumerate()
        .with_min_len(16)
        .for_each(|(r, row)| f(r, row));
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn process_rows<S, F>(out: &mut [S], width: usize, f: F)
where
    F: Fn(usize, &mut [S]),
{
    for (r, row) in out.chunks_mut(width).enumerate() {
        f(r, row);
    }
}
