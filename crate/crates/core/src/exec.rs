//! Execution strategy for the data-parallel loops of the pipeline.
//!
//! Every helper preserves input order, so sequential and parallel runs produce
//! identical output.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Selects how batch work (row uplift, join steps, per-device studies) is run.
///
/// `Parallel` silently degrades to sequential execution when the crate is built
/// without the `parallel` feature.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parallelism {
    Sequential,
    Parallel,
}

impl Default for Parallelism {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Parallelism::Parallel
        } else {
            Parallelism::Sequential
        }
    }
}

impl Parallelism {
    /// True when work will actually be spread over the rayon pool.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Parallelism::Parallel
    }

    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    pub fn flat_map<T, R, I, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        I: IntoIterator<Item = R>,
        F: Fn(&T) -> I + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return items.par_iter().flat_map_iter(f).collect();
        }
        items.iter().flat_map(f).collect()
    }

    /// Maps fallibly; on failure returns the error of the lowest-indexed item.
    pub fn try_map<T, R, E, F>(self, items: &[T], f: F) -> Result<Vec<R>, E>
    where
        T: Sync,
        R: Send,
        E: Send,
        F: Fn(&T) -> Result<R, E> + Sync + Send,
    {
        self.map(items, f).into_iter().collect()
    }

    pub fn sort_unstable<T: Ord + Send>(self, items: &mut [T]) {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            items.par_sort_unstable();
            return;
        }
        items.sort_unstable();
    }
}
