//! Data-parallel helpers. With the `parallel` feature disabled every helper
//! runs sequentially and [`Execution::Parallel`] behaves like
//! [`Execution::Sequential`].

use serde::{Deserialize, Serialize};

/// How the kernels distribute independent work items.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// True when this build can actually run work in parallel.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    /// `(0..n).map(f)`, evaluated in parallel when enabled. The output order
    /// is always the index order, and each item is computed by the same code
    /// either way, so results do not depend on the thread count.
    pub fn map_range<R, F>(self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Send + Sync,
    {
        #[cfg(feature = "parallel")]
        if self == Execution::Parallel && n > 1 {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(f).collect();
        }
        (0..n).map(f).collect()
    }

    /// Like [`map_range`](Self::map_range) over a slice.
    pub fn map_slice<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Send + Sync,
    {
        self.map_range(items.len(), |k| f(&items[k]))
    }

    /// Runs two closures, concurrently when enabled.
    pub fn join<A, B, RA, RB>(self, a: A, b: B) -> (RA, RB)
    where
        A: FnOnce() -> RA + Send,
        B: FnOnce() -> RB + Send,
        RA: Send,
        RB: Send,
    {
        #[cfg(feature = "parallel")]
        if self == Execution::Parallel {
            return rayon::join(a, b);
        }
        (a(), b())
    }
}

/// Sizes the global worker pool. Only the first call has an effect; later
/// calls and calls in sequential builds return `false`.
pub fn configure_threads(threads: usize) -> bool {
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build_global()
            .is_ok()
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_modes_agree() {
        let f = |k: usize| k * k + 1;
        let a = Execution::Sequential.map_range(100, f);
        let b = Execution::Parallel.map_range(100, f);
        assert_eq!(a, b);
        assert!(Execution::Parallel.map_range(0, f).is_empty());
        assert_eq!(Execution::Parallel.join(|| 1, || 2), (1, 2));
    }
}
