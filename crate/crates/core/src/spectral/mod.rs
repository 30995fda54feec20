//! Spectral side: the truncated operator `L_h`, its top eigenvalue `λ_h`, and
//! the quantities derived from it.
//!
//! `h ↦ λ_h` decreases from `d` (as `h → −∞`) to `0`; `h_*` solves `λ_{h_*} = 1`
//! and the critical line is `λ(u,a) = λ_a e^{−u(d−1)²/d} = 1`.

mod eigen;
mod operator;
mod vfunc;

pub use eigen::{top_eigenpair, top_eigenpair_from, SpectralPair, DEFAULT_MAX_ITER, RESIDUAL_TOL};
pub use operator::DiscreteOperator;
pub use vfunc::{lambda_tilde, v_function, v_values};

use crate::error::{Error, Result};
use crate::params::{Level, TreeParams};
use crate::quadrature::GridOptions;
use crate::roots::bisect;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralOptions {
    pub grid: GridOptions,
    /// Power-iteration stopping tolerance on successive Rayleigh quotients.
    pub eig_tol: f64,
    pub max_iter: usize,
    /// Grid doubling stops once `|λ_{2N} − λ_N|` falls below this.
    pub refine_tol: f64,
    pub max_refinements: u32,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self {
            grid: GridOptions::default(),
            eig_tol: 1e-12,
            max_iter: DEFAULT_MAX_ITER,
            refine_tol: 1e-8,
            max_refinements: 3,
        }
    }
}

impl SpectralOptions {
    pub fn with_node_count(self, node_count: usize) -> Self {
        Self {
            grid: self.grid.with_node_count(node_count),
            ..self
        }
    }

    /// The height standing in for `h → −∞`: the grid covers all of `[−Mσ, Mσ]`.
    pub fn untruncated_height(&self, params: &TreeParams) -> f64 {
        -self.grid.m * params.sigma()
    }
}

/// Discretized `L_h` at the base resolution of `opts`.
pub fn discretize(h: f64, params: &TreeParams, opts: &SpectralOptions) -> Result<DiscreteOperator> {
    DiscreteOperator::build(h, params, &opts.grid)
}

/// Perron pair of `L_h` at the base resolution.
pub fn eigenpair(h: f64, params: &TreeParams, opts: &SpectralOptions) -> Result<SpectralPair> {
    let op = discretize(h, params, opts)?;
    top_eigenpair_from(&op, opts.eig_tol, &op.sqrt_weights, opts.max_iter)
}

/// `λ_h`, doubling the node count until two successive resolutions agree to
/// `opts.refine_tol`. Returns the finest value.
pub fn lambda_h(h: f64, params: &TreeParams, opts: &SpectralOptions) -> Result<f64> {
    let mut nodes = opts.grid.node_count;
    let mut prev = eigenpair(h, params, opts)?.lambda;
    let mut delta = f64::INFINITY;
    for _ in 0..opts.max_refinements {
        nodes *= 2;
        let next = eigenpair(h, params, &opts.with_node_count(nodes))?.lambda;
        delta = (next - prev).abs();
        prev = next;
        if delta < opts.refine_tol {
            return Ok(next);
        }
    }
    Err(Error::Refinement {
        node_count: nodes,
        delta,
    })
}

/// `λ(u,a) = λ_a e^{−u(d−1)²/d}`.
pub fn lambda_ua(u: Level, a: f64, params: &TreeParams, opts: &SpectralOptions) -> Result<f64> {
    Ok(lambda_h(a, params, opts)? * libm::exp(-u.get() * params.decay_exponent()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalHeight {
    pub h_star: f64,
    /// Final bracket on which `λ_h − 1` changes sign.
    pub bracket: (f64, f64),
    /// `|λ_{h_*} − 1|`.
    pub residual: f64,
}

/// Solves `λ_h = 1` by bisection, starting from `[0, √(2u_*)]` and widening
/// the bracket if it carries no sign change.
pub fn solve_h_star(params: &TreeParams, opts: &SpectralOptions, tol: f64) -> Result<CriticalHeight> {
    if !(tol > 0.0) {
        return Err(Error::domain("tolerance must be positive"));
    }
    let f = |h: f64| Ok(lambda_h(h, params, opts)? - 1.0);
    let limit = opts.grid.m * params.sigma();
    let (mut lo, mut hi) = (0.0, libm::sqrt(2.0 * params.u_star()));
    let width = hi - lo;
    let mut f_lo = f(lo)?;
    while f_lo < 0.0 && lo - width > -limit {
        lo -= width;
        f_lo = f(lo)?;
    }
    let mut f_hi = f(hi)?;
    while f_hi > 0.0 && hi + width < limit {
        hi += width;
        f_hi = f(hi)?;
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Bracket { lo, hi, f_lo, f_hi });
    }
    let root = bisect(f, lo, hi, tol, 1e-15)?;
    Ok(CriticalHeight {
        h_star: root.x,
        bracket: root.bracket,
        residual: root.fx.abs(),
    })
}

/// The `a` solving `λ(u,a) = 1`, or `None` when no solution exists in the
/// search window (always the case for `u ≥ u_*`, since `λ_a < d`).
pub fn critical_a(
    u: Level,
    params: &TreeParams,
    opts: &SpectralOptions,
    tol: f64,
) -> Result<Option<f64>> {
    let target = libm::exp(u.get() * params.decay_exponent());
    if target >= params.df() {
        return Ok(None);
    }
    let sigma = params.sigma();
    let lo = -(opts.grid.m - 1.0) * sigma;
    let hi = (opts.grid.m - 1.0) * sigma;
    let f = |a: f64| Ok(lambda_h(a, params, opts)? - target);
    if f(lo)? <= 0.0 {
        return Ok(None);
    }
    let root = bisect(f, lo, hi, tol * target, 1e-15)?;
    Ok(Some(root.x))
}

/// `u₀`, where the critical line crosses `a = 0`: `ln(λ_0) d/(d−1)²`.
pub fn critical_u_at(a: f64, params: &TreeParams, opts: &SpectralOptions) -> Result<Option<f64>> {
    let lam = lambda_h(a, params, opts)?;
    if lam < 1.0 {
        return Ok(None);
    }
    Ok(Some(libm::log(lam) / params.decay_exponent()))
}

/// `⟨1, (L_a/d)^n 1⟩_ν`, the probability that the field stays above `a`
/// along a geodesic with `n` edges.
pub fn two_point_prediction(
    a: f64,
    n: u32,
    params: &TreeParams,
    opts: &SpectralOptions,
) -> Result<f64> {
    let op = discretize(a, params, opts)?;
    Ok(two_point_on(&op, n, params))
}

pub(crate) fn two_point_on(op: &DiscreteOperator, n: u32, params: &TreeParams) -> f64 {
    let df = params.df();
    let mut y = op.sqrt_weights.clone();
    let mut z = alloc::vec![0.0; y.len()];
    for _ in 0..n {
        op.apply_into(&y, &mut z);
        for (a, b) in y.iter_mut().zip(&z) {
            *a = b / df;
        }
    }
    op.sqrt_weights.iter().zip(&y).map(|(s, v)| s * v).sum()
}

/// `λ_a e^{−(aρ+ρ²/2)(d−1)²/d} − λ_{a+ρ}`; positive when the strict
/// inequality between the two eigenvalues holds.
pub fn check_thm21(a: f64, rho: f64, params: &TreeParams, opts: &SpectralOptions) -> Result<f64> {
    check_height_pair(a, rho)?;
    let shift = a * rho + 0.5 * rho * rho;
    let bound = lambda_h(a, params, opts)? * libm::exp(-shift * params.decay_exponent());
    Ok(bound - lambda_h(a + rho, params, opts)?)
}

pub(crate) fn check_height_pair(a: f64, rho: f64) -> Result<()> {
    if !(a >= 0.0) {
        return Err(Error::domain(alloc::format!("a must be non-negative, got {a}")));
    }
    if !(rho > 0.0) {
        return Err(Error::domain(alloc::format!("rho must be positive, got {rho}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcPoint {
    pub u: f64,
    pub a: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParabolaScan {
    pub h: f64,
    pub points: Vec<ArcPoint>,
}

impl ParabolaScan {
    /// Smallest increment between consecutive samples (negative if the scan
    /// ever decreases).
    pub fn min_step(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| w[1].lambda - w[0].lambda)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn strictly_increasing(&self, margin: f64) -> bool {
        self.min_step() > margin
    }
}

/// Samples `u ↦ λ(u, √(h² − 2u))` at `u_k = k h²/(2K)`, `k = 0..=K`.
pub fn parabola_scan(h: f64, k: u32, params: &TreeParams, opts: &SpectralOptions) -> Result<ParabolaScan> {
    if !(h > 0.0) {
        return Err(Error::domain(alloc::format!("arc parameter h must be positive, got {h}")));
    }
    if k < 2 {
        return Err(Error::domain(alloc::format!("need K >= 2 arc samples, got {k}")));
    }
    let h2 = h * h;
    let mut points = Vec::with_capacity(k as usize + 1);
    for i in 0..=k {
        let u = if i == k { 0.5 * h2 } else { f64::from(i) * h2 / (2.0 * f64::from(k)) };
        let a = if i == k { 0.0 } else { libm::sqrt((h2 - 2.0 * u).max(0.0)) };
        let lambda = lambda_ua(Level::new(u)?, a, params, opts)?;
        points.push(ArcPoint { u, a, lambda });
    }
    Ok(ParabolaScan { h, points })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondMoment {
    /// `((d+1)/d) p0 ⟨1, χ_a⟩_ν`.
    pub a_const: f64,
    /// `((d+1)/d) p0 ‖χ_a²‖ λ/(λ−1)`.
    pub b_const: f64,
    /// `A²/B`, a lower bound on the percolation probability.
    pub bound: f64,
    pub lambda_ua: f64,
}

/// Second-moment lower bound on `τ(u,a)`; requires `λ(u,a) > 1` for the
/// geometric series in `B` to converge.
pub fn second_moment_bound(
    u: Level,
    a: f64,
    params: &TreeParams,
    opts: &SpectralOptions,
) -> Result<SecondMoment> {
    let lam = lambda_ua(u, a, params, opts)?;
    if !(lam > 1.0) {
        return Err(Error::precondition(alloc::format!(
            "second-moment bound needs λ(u,a) > 1 so that Σ λ^-k converges; got λ({}, {a}) = {lam}",
            u.get()
        )));
    }
    let op = discretize(a, params, opts)?;
    let pair = top_eigenpair_from(&op, opts.eig_tol, &op.sqrt_weights, opts.max_iter)?;
    let ones = alloc::vec![1.0; pair.chi.len()];
    let mean = op.grid.inner(&ones, &pair.chi);
    let chi2: Vec<f64> = pair.chi.iter().map(|c| c * c).collect();
    let chi2_norm = libm::sqrt(op.grid.inner(&chi2, &chi2));
    let p0 = params.vacancy_probs(u).p0;
    let pref = (params.df() + 1.0) / params.df() * p0;
    let a_const = pref * mean;
    let b_const = pref * chi2_norm * lam / (lam - 1.0);
    Ok(SecondMoment {
        a_const,
        b_const,
        bound: a_const * a_const / b_const,
        lambda_ua: lam,
    })
}
