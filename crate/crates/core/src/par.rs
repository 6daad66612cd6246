//! Pluggable data-parallel map.
//!
//! The core stays single-threaded; callers with a thread pool implement
//! [`ParallelMap`] and hand it to the batch entry points. Implementations
//! must return results in index order.

use alloc::vec::Vec;

pub trait ParallelMap: Sync {
    fn map_indexed(&self, n: usize, f: &(dyn Fn(usize) -> f64 + Sync)) -> Vec<f64>;
}

/// Runs every job on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl ParallelMap for Sequential {
    fn map_indexed(&self, n: usize, f: &(dyn Fn(usize) -> f64 + Sync)) -> Vec<f64> {
        (0..n).map(f).collect()
    }
}
