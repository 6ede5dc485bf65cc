//! Data-parallel execution with a sequential fallback.
//!
//! Every batch workload in the crate (sweep cells, Monte Carlo trials,
//! per-instance LP solves) goes through [`Execution::map`]. Results always
//! come back in input order, and each work item derives its randomness from
//! its own index, so parallel and sequential runs produce identical output.

use serde::{Deserialize, Serialize};

/// How batch workloads are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    /// Spread work over the rayon thread pool. Without the `parallel`
    /// feature this behaves exactly like [`Execution::Sequential`].
    #[default]
    Parallel,
    Sequential,
}

impl Execution {
    /// True when work will actually be spread across threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    /// Applies `f` to `0..len` and collects the results in index order.
    pub fn map<R, F>(self, len: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Execution::Parallel {
            use rayon::prelude::*;
            return (0..len).into_par_iter().map(f).collect();
        }
        (0..len).map(f).collect()
    }
}
