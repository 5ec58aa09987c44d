//! Parallel ensemble execution with stream-indexed reproducibility: path k
//! always uses RNG stream k, and results come back in index order, so the
//! output is bit-for-bit identical for every thread count (the `--threads`
//! knob only changes scheduling).

use rayon::prelude::*;

/// Map `f` over streams `0..n` in parallel, collecting in stream order.
pub fn par_streams<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    (0..n as u64).into_par_iter().map(f).collect()
}
