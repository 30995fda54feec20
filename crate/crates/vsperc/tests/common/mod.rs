//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

pub mod constants;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;
use vsperc_core::spectral::{discretize, SpectralOptions};
use vsperc_core::{Seed, TreeParams};

/// Largest eigenvalue of the discretized operator from a full dense
/// decomposition at `node_count` nodes.
pub fn dense_lambda(h: f64, params: &TreeParams, node_count: usize) -> f64 {
    let opts = SpectralOptions::default().with_node_count(node_count);
    let op = discretize(h, params, &opts).unwrap();
    let n = op.dim();
    let eig = SymmetricEigen::new(DMatrix::from_row_slice(n, n, &op.matrix));
    eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Root of the dense `λ_h = 1` by bisection on `[lo, hi]`.
pub fn dense_h_star(params: &TreeParams, node_count: usize, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    assert!(dense_lambda(lo, params, node_count) > 1.0 && dense_lambda(hi, params, node_count) < 1.0);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if dense_lambda(mid, params, node_count) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Debug, Clone, Copy)]
pub struct RateEstimate {
    pub rate: f64,
    pub stderr: f64,
}

/// Fleming–Viot estimate of the one-step survival rate of the field along a
/// ray, killed when it drops to `h` or below. The rate is `P[φ > h on n+1
/// ray vertices] / P[φ > h on n]` for large `n`, that is `λ_h/d`.
///
/// Killed particles restart from a uniformly chosen survivor; the error bar
/// comes from 40 batch means after burn-in.
pub fn ray_survival_rate(
    h: f64,
    params: &TreeParams,
    particles: usize,
    steps: usize,
    burn: usize,
    seed: u64,
) -> RateEstimate {
    let mut rng = Seed::new(seed).rng(0);
    let sigma = params.sigma();
    let c = params.contraction();
    let s = params.child_variance().sqrt();
    let mut x: Vec<f64> = Vec::with_capacity(particles);
    while x.len() < particles {
        let v = sigma * rng.sample::<f64, _>(StandardNormal);
        if v > h {
            x.push(v);
        }
    }
    let mut alive = Vec::with_capacity(particles);
    let mut fractions = Vec::with_capacity(steps);
    for _ in 0..burn + steps {
        alive.clear();
        for v in x.iter_mut() {
            *v = c * *v + s * rng.sample::<f64, _>(StandardNormal);
            if *v > h {
                alive.push(*v);
            }
        }
        assert!(!alive.is_empty(), "all particles died");
        fractions.push(alive.len() as f64 / particles as f64);
        for v in x.iter_mut() {
            if *v <= h {
                *v = alive[rng.random_range(0..alive.len())];
            }
        }
    }
    let kept = &fractions[burn..];
    let batches = 40;
    let size = kept.len() / batches;
    let means: Vec<f64> = kept.chunks_exact(size).map(|b| b.iter().sum::<f64>() / size as f64).collect();
    let m = means.iter().sum::<f64>() / means.len() as f64;
    let var = means.iter().map(|b| (b - m).powi(2)).sum::<f64>() / (means.len() - 1) as f64;
    RateEstimate {
        rate: m,
        stderr: (var / means.len() as f64).sqrt(),
    }
}

/// Relative error of the least-squares slope of `ln τ_n`, `n ∈ lo..=hi`,
/// against `ln λ` for the Galton–Watson cluster with root offspring
/// `Bin(d+1, λ/d)` and `Bin(d, λ/d)` below. This is the `a → −∞` limit of the
/// exploration and isolates the finite-`n` bias of the fit.
pub fn galton_watson_slope_error(lambda: f64, d: u32, lo: u32, hi: u32) -> f64 {
    let q = lambda / f64::from(d);
    // r[m]: a non-root vertex's subtree reaches m further levels
    let mut r = vec![1.0f64];
    for m in 1..hi {
        r.push(1.0 - (1.0 - q * r[m as usize - 1]).powi(d as i32));
    }
    let tau = |n: u32| 1.0 - (1.0 - q * r[n as usize - 1]).powi(d as i32 + 1);
    let xs: Vec<f64> = (lo..=hi).map(f64::from).collect();
    let ys: Vec<f64> = (lo..=hi).map(|n| tau(n).ln()).collect();
    let slope = vsperc_core::stats::ls_slope(&xs, &ys);
    ((slope - lambda.ln()) / lambda.ln()).abs()
}
