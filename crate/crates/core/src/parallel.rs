//! Runs independent trials on a rayon pool of a requested size.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Evaluates `f(0..n)` in parallel and returns the results in index order.
/// `workers = None` uses the global pool.
pub fn map_trials<T, F>(n: usize, workers: Option<usize>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    let run = || (0..n).into_par_iter().map(&f).collect::<Result<Vec<T>>>();
    match workers {
        None => run(),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::Invalid(format!("cannot build worker pool: {e}")))?;
            pool.install(run)
        }
    }
}
