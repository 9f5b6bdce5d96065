//! Execution-mode switch for the batch verifiers and scan loops.
//!
//! The `parallel` feature pulls in rayon; without it, or with
//! `RunMode::Sequential`, every helper degrades to a plain sequential loop
//! so results are identical either way.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum RunMode {
    Sequential,
    Parallel,
}

impl RunMode {
    /// Parallel when the feature is compiled in, otherwise sequential.
    pub fn auto() -> Self {
        if cfg!(feature = "parallel") {
            RunMode::Parallel
        } else {
            RunMode::Sequential
        }
    }
}

/// Applies `f` to every item, preserving input order in the output.
pub fn map_items<T, U, F>(mode: RunMode, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if mode == RunMode::Parallel {
            use rayon::prelude::*;
            return items.par_iter().map(&f).collect();
        }
    }
    let _ = mode;
    items.iter().map(f).collect()
}

/// True iff `f` holds for every item; short-circuits in sequential mode.
pub fn all_items<T, F>(mode: RunMode, items: &[T], f: F) -> bool
where
    T: Sync,
    F: Fn(&T) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if mode == RunMode::Parallel {
            use rayon::prelude::*;
            return items.par_iter().all(&f);
        }
    }
    let _ = mode;
    items.iter().all(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let items: Vec<i64> = (0..100).collect();
        let seq = map_items(RunMode::Sequential, &items, |x| x * x);
        let par = map_items(RunMode::Parallel, &items, |x| x * x);
        assert_eq!(seq, par);
        assert!(all_items(RunMode::Parallel, &items, |x| *x < 100));
        assert!(!all_items(RunMode::Sequential, &items, |x| *x < 50));
    }
}
