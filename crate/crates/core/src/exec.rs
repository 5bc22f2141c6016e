//! Deterministic data-parallel helpers.
//!
//! Results are always collected in index order and reduced sequentially, so
//! floating-point sums are bit-identical for any thread count.

/// Evaluates `f(0..n)` (possibly in parallel) and returns results in order.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Splits `total` items into batches of `batch` and maps each `(index, len)`.
pub fn map_batches<T, F>(total: u64, batch: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, u64) -> T + Sync + Send,
{
    let batch = batch.max(1);
    let count = total.div_ceil(batch);
    map_indexed(count as usize, |i| {
        let start = i as u64 * batch;
        f(i as u64, (total - start).min(batch))
    })
}
