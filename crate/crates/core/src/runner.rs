//! Trial loops and mergeable tallies.
//!
//! Trials are cut into fixed chunks of [`CHUNK`] consecutive indices. Each
//! chunk folds into a fresh tally and chunk tallies are merged in index
//! order, so any runner that honours this layout produces bit-identical
//! results no matter how chunks are spread over workers.

use core::ops::Range;

pub const CHUNK: u64 = 4096;

pub trait Tally: Default + Send {
    fn merge(&mut self, other: Self);
}

pub trait TrialRunner {
    fn run<T, F>(&self, trials: u64, trial: F) -> T
    where
        T: Tally,
        F: Fn(u64, &mut T) + Sync;
}

/// Chunk `index` of a run with `trials` trials.
pub fn chunk_range(index: u64, trials: u64) -> Range<u64> {
    let start = index * CHUNK;
    start..(start + CHUNK).min(trials)
}

pub fn chunk_count(trials: u64) -> u64 {
    trials.div_ceil(CHUNK)
}

pub fn run_chunk<T, F>(index: u64, trials: u64, trial: &F) -> T
where
    T: Tally,
    F: Fn(u64, &mut T),
{
    let mut tally = T::default();
    for t in chunk_range(index, trials) {
        trial(t, &mut tally);
    }
    tally
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl TrialRunner for Sequential {
    fn run<T, F>(&self, trials: u64, trial: F) -> T
    where
        T: Tally,
        F: Fn(u64, &mut T) + Sync,
    {
        let mut total = T::default();
        for c in 0..chunk_count(trials) {
            total.merge(run_chunk(c, trials, &trial));
        }
        total
    }
}

/// Success/trial counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counts {
    pub successes: u64,
    pub trials: u64,
}

impl Counts {
    pub fn record(&mut self, success: bool) {
        self.trials += 1;
        self.successes += u64::from(success);
    }
}

impl Tally for Counts {
    fn merge(&mut self, other: Self) {
        self.successes += other.successes;
        self.trials += other.trials;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunks_cover_all_trials_once() {
        let trials = 3 * CHUNK + 17;
        assert_eq!(chunk_count(trials), 4);
        let total: u64 = (0..chunk_count(trials))
            .map(|c| chunk_range(c, trials).count() as u64)
            .sum();
        assert_eq!(total, trials);
        assert_eq!(chunk_count(0), 0);
    }

    #[test]
    fn sequential_counts() {
        let c: Counts = Sequential.run(10_000, |t, c: &mut Counts| c.record(t % 3 == 0));
        assert_eq!(c.trials, 10_000);
        assert_eq!(c.successes, 3334);
    }
}
