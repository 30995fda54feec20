//! Thread-pool trial runner.

use rayon::prelude::*;
use vsperc_core::runner::{chunk_count, run_chunk};
use vsperc_core::{Tally, TrialRunner};

/// Runs chunks on a rayon pool and merges their tallies in chunk order, so the
/// result matches [`vsperc_core::Sequential`] bit for bit.
#[derive(Debug)]
pub struct ParallelRunner {
    pool: rayon::ThreadPool,
}

impl ParallelRunner {
    /// `workers = 0` uses one thread per available core.
    pub fn new(workers: usize) -> Result<Self, rayon::ThreadPoolBuildError> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build()?;
        Ok(Self { pool })
    }

    pub fn workers(&self) -> usize {
        self.pool.current_num_threads()
    }

    /// Runs `f` inside the pool, so rayon iterators in it use these workers.
    pub fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> T {
        self.pool.install(f)
    }
}

impl TrialRunner for ParallelRunner {
    fn run<T, F>(&self, trials: u64, trial: F) -> T
    where
        T: Tally,
        F: Fn(u64, &mut T) + Sync,
    {
        let parts: Vec<T> = self.pool.install(|| {
            (0..chunk_count(trials))
                .into_par_iter()
                .map(|c| run_chunk(c, trials, &trial))
                .collect()
        });
        let mut total = T::default();
        for p in parts {
            total.merge(p);
        }
        total
    }
}
