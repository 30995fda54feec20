//! Lazy depth-first exploration of the cluster of the base point in
//! `V^u ∩ {φ > a}`.
//!
//! Field values and vacancy marks are drawn only for vertices adjacent to the
//! explored cluster, and a branch is pruned at its first vertex that is blocked
//! or has `φ ≤ a`. Memory is `O(n)` per trial.

use super::Seed;
use crate::error::{Error, Result};
use crate::params::{Level, TreeParams, VacancyConstants};
use crate::runner::{Counts, Tally, TrialRunner};
use crate::stats::McEstimate;
use alloc::vec::Vec;
use rand::Rng;
use rand_distr::StandardNormal;

pub const DEFAULT_EXPLORE_CAP: u64 = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExploreOutcome {
    /// Largest distance from the base point reached by the cluster (capped at
    /// `n`); `None` when the base point itself is not in the set.
    pub radius: Option<u32>,
    pub explored: u64,
    /// The vertex budget ran out before the exploration finished.
    pub capped: bool,
}

struct Frame {
    depth: u32,
    phi: f64,
    children_left: u32,
}

/// One trial of the exploration up to depth `n`.
pub fn explore_trial<R: Rng + ?Sized>(
    n: u32,
    a: f64,
    vac: VacancyConstants,
    params: &TreeParams,
    cap: u64,
    rng: &mut R,
) -> ExploreOutcome {
    let c = params.contraction();
    let s = libm::sqrt(params.child_variance());
    let mut explored = 1u64;
    let vacant = rng.random::<f64>() < vac.p0;
    let phi0 = params.sigma() * rng.sample::<f64, _>(StandardNormal);
    if !(vacant && phi0 > a) {
        return ExploreOutcome {
            radius: None,
            explored,
            capped: false,
        };
    }
    if n == 0 {
        return ExploreOutcome {
            radius: Some(0),
            explored,
            capped: false,
        };
    }
    let mut best = 0u32;
    let mut stack: Vec<Frame> = Vec::with_capacity(n as usize + 1);
    stack.push(Frame {
        depth: 0,
        phi: phi0,
        children_left: params.d() + 1,
    });
    while let Some(top) = stack.last_mut() {
        if top.children_left == 0 {
            stack.pop();
            continue;
        }
        top.children_left -= 1;
        let (depth, parent_phi) = (top.depth + 1, top.phi);
        explored += 1;
        if explored > cap {
            return ExploreOutcome {
                radius: Some(best),
                explored,
                capped: true,
            };
        }
        if !(rng.random::<f64>() < vac.p) {
            continue;
        }
        let phi = c * parent_phi + s * rng.sample::<f64, _>(StandardNormal);
        if phi <= a {
            continue;
        }
        best = best.max(depth);
        if depth == n {
            break;
        }
        stack.push(Frame {
            depth,
            phi,
            children_left: params.d(),
        });
    }
    ExploreOutcome {
        radius: Some(best),
        explored,
        capped: false,
    }
}

/// Histogram of per-trial reached radii.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TauTally {
    /// `hist[0]`: base point not in the set; `hist[r + 1]`: radius `r`.
    pub hist: Vec<u64>,
    pub capped: u64,
    pub trials: u64,
}

impl TauTally {
    fn record(&mut self, n: u32, out: &ExploreOutcome) {
        if self.hist.is_empty() {
            self.hist = alloc::vec![0; n as usize + 2];
        }
        let slot = out.radius.map_or(0, |r| r as usize + 1);
        // capped trials count as failures at radii they did not reach
        self.hist[slot] += 1;
        self.capped += u64::from(out.capped);
        self.trials += 1;
    }
}

impl Tally for TauTally {
    fn merge(&mut self, other: Self) {
        if self.hist.len() < other.hist.len() {
            self.hist.resize(other.hist.len(), 0);
        }
        for (a, b) in self.hist.iter_mut().zip(&other.hist) {
            *a += b;
        }
        self.capped += other.capped;
        self.trials += other.trials;
    }
}

/// `τ̂_m` for `m = 0..=n` from the same trials.
#[derive(Debug, Clone, PartialEq)]
pub struct TauProfile {
    pub u: f64,
    pub a: f64,
    pub n: u32,
    pub tally: TauTally,
}

impl TauProfile {
    /// Number of trials whose cluster reached the sphere `S_m`.
    pub fn successes(&self, m: u32) -> u64 {
        self.tally.hist.iter().skip(m as usize + 1).sum()
    }

    pub fn at(&self, m: u32) -> McEstimate {
        assert!(m <= self.n, "radius {m} beyond explored depth {}", self.n);
        McEstimate::new(self.successes(m), self.tally.trials)
    }

    pub fn estimates(&self) -> Vec<McEstimate> {
        (0..=self.n).map(|m| self.at(m)).collect()
    }

    pub fn capped(&self) -> u64 {
        self.tally.capped
    }
}

/// Estimates `τ_m(u,a)`, the probability that the base point is connected to
/// the sphere of radius `m` inside `V^u ∩ {φ > a}`, for all `m ≤ n`.
#[allow(clippy::too_many_arguments)]
pub fn estimate_tau_n<R: TrialRunner>(
    u: Level,
    a: f64,
    n: u32,
    trials: u64,
    params: &TreeParams,
    seed: Seed,
    cap: u64,
    runner: &R,
) -> Result<TauProfile> {
    if trials == 0 {
        return Err(Error::domain("need at least one trial"));
    }
    if a.is_nan() {
        return Err(Error::domain("level a is NaN"));
    }
    let vac = params.vacancy_probs(u);
    let tally: TauTally = runner.run(trials, |t, tally: &mut TauTally| {
        let mut rng = seed.rng(t);
        let out = explore_trial(n, a, vac, params, cap, &mut rng);
        tally.record(n, &out);
    });
    Ok(TauProfile {
        u: u.get(),
        a,
        n,
        tally,
    })
}

/// Probability that the geodesic from the base point to a fixed vertex at
/// distance `n` lies in `V^u ∩ {φ > a}`.
#[allow(clippy::too_many_arguments)]
pub fn estimate_two_point<R: TrialRunner>(
    u: Level,
    a: f64,
    n: u32,
    trials: u64,
    params: &TreeParams,
    seed: Seed,
    runner: &R,
) -> Result<McEstimate> {
    if trials == 0 {
        return Err(Error::domain("need at least one trial"));
    }
    let vac = params.vacancy_probs(u);
    let c = params.contraction();
    let s = libm::sqrt(params.child_variance());
    let sigma = params.sigma();
    let counts: Counts = runner.run(trials, |t, counts: &mut Counts| {
        let mut rng = seed.rng(t);
        let mut phi = sigma * rng.sample::<f64, _>(StandardNormal);
        let mut ok = rng.random::<f64>() < vac.p0 && phi > a;
        let mut k = 0;
        while ok && k < n {
            phi = c * phi + s * rng.sample::<f64, _>(StandardNormal);
            ok = rng.random::<f64>() < vac.p && phi > a;
            k += 1;
        }
        counts.record(ok);
    });
    Ok(McEstimate::from_counts(counts))
}
