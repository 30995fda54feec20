//! Composite Gauss–Legendre quadrature for `L²(ν)` on a truncated interval.
//!
//! Weights already contain the density of `ν`, so `Σ wᵢ f(xᵢ) ≈ ∫ f dν`
//! over `[lower, upper]`. The lower end sits exactly at the truncation height,
//! which keeps the indicator of `[h, ∞)` out of the integrand.

use crate::error::{Error, Result};
use crate::params::TreeParams;
use alloc::vec::Vec;
use core::f64::consts::PI;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = alloc::vec![0.0; n];
    let mut weights = alloc::vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = libm::cos(PI * (i as f64 + 0.75) / (nf + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let dp = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridOptions {
    /// Requested number of nodes; rounded up to whole panels.
    pub node_count: usize,
    /// Half-width of the interval in units of `σ`.
    pub m: f64,
    /// Nodes per Gauss–Legendre panel.
    pub order: usize,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self {
            node_count: 400,
            m: 8.0,
            order: 8,
        }
    }
}

impl GridOptions {
    pub fn with_node_count(self, node_count: usize) -> Self {
        Self { node_count, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.node_count < 16 {
            return Err(Error::domain(alloc::format!(
                "node_count must be at least 16, got {}",
                self.node_count
            )));
        }
        // the Gaussian weight underflows near 38σ
        if !(6.0..=30.0).contains(&self.m) {
            return Err(Error::domain(alloc::format!(
                "M must lie in [6, 30], got {}",
                self.m
            )));
        }
        if self.order == 0 {
            return Err(Error::domain("panel order must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    pub lower: f64,
    pub upper: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureGrid {
    /// Grid on `[max(h, −Mσ), Mσ]`.
    pub fn build(h: f64, params: &TreeParams, opts: &GridOptions) -> Result<Self> {
        opts.validate()?;
        if h.is_nan() {
            return Err(Error::domain("truncation height is NaN"));
        }
        let sigma = params.sigma();
        let upper = opts.m * sigma;
        if h >= upper {
            return Err(Error::domain(alloc::format!(
                "truncation height {h} is at or above M·σ = {upper}; the operator is empty"
            )));
        }
        let lower = h.max(-upper);
        let panels = opts.node_count.div_ceil(opts.order);
        let (gl_x, gl_w) = gauss_legendre(opts.order);
        let width = (upper - lower) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * opts.order);
        let mut weights = Vec::with_capacity(panels * opts.order);
        for k in 0..panels {
            let a = lower + width * k as f64;
            let b = if k + 1 == panels { upper } else { a + width };
            let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
            for (x, w) in gl_x.iter().zip(&gl_w) {
                let node = mid + half * x;
                nodes.push(node);
                weights.push(half * w * params.nu_density(node));
            }
        }
        Ok(Self {
            lower,
            upper,
            nodes,
            weights,
        })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `Σ wᵢ f(xᵢ) g(xᵢ)` for vectors of node values.
    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(f.iter().zip(g))
            .map(|(w, (a, b))| w * a * b)
            .sum()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_integrates_polynomials_exactly() {
        for n in [1usize, 2, 5, 8, 13] {
            let (x, w) = gauss_legendre(n);
            for deg in 0..(2 * n) {
                let q: f64 = x
                    .iter()
                    .zip(&w)
                    .map(|(x, w)| w * libm::pow(*x, deg as f64))
                    .sum();
                let exact = if deg % 2 == 1 {
                    0.0
                } else {
                    2.0 / (deg as f64 + 1.0)
                };
                assert!((q - exact).abs() < 1e-14, "n={n} deg={deg}: {q} vs {exact}");
            }
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn full_mass_grid() {
        let p = TreeParams::new(2).unwrap();
        let h = -8.0 * p.sigma();
        let g = QuadratureGrid::build(h, &p, &GridOptions::default()).unwrap();
        assert_eq!(g.node_count(), 400);
        assert!((g.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn half_mass_at_zero_and_refinement() {
        let p = TreeParams::new(2).unwrap();
        let opts = GridOptions::default();
        let g = QuadratureGrid::build(0.0, &p, &opts).unwrap();
        assert!((g.total_mass() - 0.5).abs() < 1e-10);
        let g2 = QuadratureGrid::build(0.0, &p, &opts.with_node_count(800)).unwrap();
        assert!((g.total_mass() - g2.total_mass()).abs() < 1e-12);
    }

    #[test]
    fn nodes_increasing_inside_bounds_and_mass_consistent() {
        let p = TreeParams::new(3).unwrap();
        for &h in &[-10.0, -0.4, 0.0, 1.3, 4.0] {
            let g = QuadratureGrid::build(h, &p, &GridOptions::default()).unwrap();
            assert!(g.nodes.windows(2).all(|w| w[0] < w[1]));
            assert!(g.nodes.iter().all(|&x| x >= g.lower && x <= g.upper));
            assert!(g.weights.iter().all(|&w| w > 0.0));
            let mass = g.total_mass();
            assert!(mass <= 1.0);
            assert!(mass >= p.nu_mass(g.lower, g.upper) - 1e-12);
            assert_eq!(g.lower, h.max(-8.0 * p.sigma()));
        }
    }

    #[test]
    fn density_normalization() {
        let p = TreeParams::new(2).unwrap();
        let g = QuadratureGrid::build(-8.0 * p.sigma(), &p, &GridOptions::default()).unwrap();
        // ∫ x² dν = σ²
        assert!((g.integrate(|x| x * x) - p.sigma2()).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = TreeParams::new(2).unwrap();
        let opts = GridOptions::default();
        assert!(QuadratureGrid::build(8.0 * p.sigma(), &p, &opts).is_err());
        assert!(QuadratureGrid::build(f64::NAN, &p, &opts).is_err());
        assert!(QuadratureGrid::build(0.0, &p, &opts.with_node_count(8)).is_err());
        let bad_m = GridOptions { m: 5.0, ..opts };
        assert!(QuadratureGrid::build(0.0, &p, &bad_m).is_err());
    }
}
