use few_core::ParallelMap;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Fans jobs out over the current rayon pool.
#[derive(Debug, Clone, Copy, Default)]
pub struct RayonMap;

impl ParallelMap for RayonMap {
    fn map_indexed(&self, n: usize, f: &(dyn Fn(usize) -> f64 + Sync)) -> Vec<f64> {
        (0..n).into_par_iter().map(f).collect()
    }
}

/// Runs `f` inside a pool of `jobs` threads, or all cores when `None`.
pub fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::Invalid(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}
