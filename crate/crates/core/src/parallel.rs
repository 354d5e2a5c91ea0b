//! Chunked data-parallel map with a fixed, worker-independent chunk layout.
//!
//! Results come back in chunk order, so any reduction the caller performs over
//! them is the same sequence of operations regardless of thread count.

use std::ops::Range;

/// Maps `f` over `0..len` split into chunks of `chunk` indices.
///
/// `workers = None` uses the ambient rayon pool; `Some(n)` runs on a dedicated
/// pool of `n` threads. Without the `parallel` feature the chunks run in order
/// on the calling thread.
pub(crate) fn map_chunks<T, F>(len: u64, chunk: u64, workers: Option<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<u64>) -> T + Sync + Send,
{
    assert!(chunk > 0);
    let n_chunks = len.div_ceil(chunk);
    let range = move |c: u64| c * chunk..((c + 1) * chunk).min(len);
    run(n_chunks, workers, move |c| f(range(c)))
}

#[cfg(feature = "parallel")]
fn run<T, F>(n_chunks: u64, workers: Option<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    use rayon::prelude::*;

    let job = || (0..n_chunks).into_par_iter().map(&f).collect();
    match workers {
        None => job(),
        Some(1) => (0..n_chunks).map(&f).collect(),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(job),
            Err(_) => (0..n_chunks).map(&f).collect(),
        },
    }
}

#[cfg(not(feature = "parallel"))]
fn run<T, F>(n_chunks: u64, _workers: Option<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    (0..n_chunks).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunks_cover_range_in_order() {
        for workers in [None, Some(1), Some(3)] {
            let parts = map_chunks(10, 4, workers, |r| (r.start, r.end));
            assert_eq!(parts, vec![(0, 4), (4, 8), (8, 10)]);
        }
        assert!(map_chunks(0, 4, None, |r| r.end - r.start).is_empty());
    }
}
