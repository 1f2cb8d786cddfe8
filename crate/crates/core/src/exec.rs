//! Execution policy for the data-parallel loops (curves, simulation grids).
//!
//! Every parallel loop in the crate maps over an index range and collects the
//! results in index order, so output never depends on the policy or on the
//! number of worker threads. Without the `parallel` feature every policy runs
//! sequentially.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exec {
    /// Rayon's global pool when the `parallel` feature is enabled.
    #[default]
    Auto,
    Sequential,
    /// A dedicated pool with a fixed number of threads.
    Threads(usize),
}

impl Exec {
    /// Maps a worker count (as given on a command line) to a policy.
    pub fn from_workers(workers: Option<usize>) -> Self {
        match workers {
            None => Exec::Auto,
            Some(0) => Exec::Auto,
            Some(n) => Exec::Threads(n),
        }
    }

    pub fn is_parallel(&self) -> bool {
        cfg!(feature = "parallel") && !matches!(self, Exec::Sequential)
    }

    /// Evaluates `f(0..len)` and returns the results in index order.
    pub fn map<T, F>(&self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            match *self {
                Exec::Sequential => (0..len).map(f).collect(),
                Exec::Auto => (0..len).into_par_iter().map(f).collect(),
                Exec::Threads(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
                    Ok(pool) => pool.install(|| (0..len).into_par_iter().map(&f).collect()),
                    Err(_) => (0..len).map(f).collect(),
                },
            }
        }
        #[cfg(not(feature = "parallel"))]
        {
            (0..len).map(f).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let f = |i: usize| i * i;
        let expect: Vec<usize> = (0..1000).map(f).collect();
        for exec in [Exec::Auto, Exec::Sequential, Exec::Threads(3)] {
            assert_eq!(exec.map(1000, f), expect);
        }
    }

    #[test]
    fn workers_mapping() {
        assert_eq!(Exec::from_workers(None), Exec::Auto);
        assert_eq!(Exec::from_workers(Some(8)), Exec::Threads(8));
    }
}
