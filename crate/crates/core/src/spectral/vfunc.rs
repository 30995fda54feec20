//! The damping function `V` and the conjugated operator `√V L_a √V`.

use super::eigen::{top_eigenpair_from, SpectralPair};
use super::{check_height_pair, discretize, SpectralOptions};
use crate::error::Result;
use crate::math::{ln_std_normal_sf, pos, std_normal_cdf};
use crate::params::{Level, TreeParams};
use alloc::vec::Vec;

/// `V(b) = p + (1−p)·E[exp(−2(b/d + sZ − a)⁺ (b−a)⁺)]` with `Z` standard
/// normal, `s² = σ²(1−1/d²)` and `p` the vacancy constant at level `aρ+ρ²/2`.
///
/// The Gaussian expectation splits at the kink `z₀ = (a − b/d)/s`: below it the
/// integrand is `1`, above it an exponential in `z`, so both pieces are
/// evaluated exactly through the normal distribution function.
pub fn v_function(b: f64, a: f64, rho: f64, params: &TreeParams) -> Result<f64> {
    check_height_pair(a, rho)?;
    let p = params.vacancy_probs(Level::new(a * rho + 0.5 * rho * rho)?).p;
    Ok(v_with_p(b, a, p, params))
}

fn v_with_p(b: f64, a: f64, p: f64, params: &TreeParams) -> f64 {
    let beta = pos(b - a);
    if beta == 0.0 {
        return 1.0;
    }
    let s = libm::sqrt(params.child_variance());
    let shift = b * params.contraction() - a;
    let z0 = -shift / s;
    let below = std_normal_cdf(z0);
    let ln_above =
        -2.0 * beta * shift + 2.0 * beta * beta * s * s + ln_std_normal_sf(z0 + 2.0 * beta * s);
    let expectation = below + libm::exp(ln_above);
    p + (1.0 - p) * expectation
}

/// `V` at every node of the grid for height `a`.
pub fn v_values(a: f64, rho: f64, params: &TreeParams, opts: &SpectralOptions) -> Result<Vec<f64>> {
    check_height_pair(a, rho)?;
    let p = params.vacancy_probs(Level::new(a * rho + 0.5 * rho * rho)?).p;
    let grid = crate::quadrature::QuadratureGrid::build(a, params, &opts.grid)?;
    Ok(grid.nodes.iter().map(|&b| v_with_p(b, a, p, params)).collect())
}

/// Top eigenpair of the discretized `√V·L_a·√V`.
pub fn lambda_tilde(
    a: f64,
    rho: f64,
    params: &TreeParams,
    opts: &SpectralOptions,
) -> Result<SpectralPair> {
    check_height_pair(a, rho)?;
    let p = params.vacancy_probs(Level::new(a * rho + 0.5 * rho * rho)?).p;
    let op = discretize(a, params, opts)?;
    let scale: Vec<f64> = op
        .grid
        .nodes
        .iter()
        .map(|&b| libm::sqrt(v_with_p(b, a, p, params)))
        .collect();
    let tilde = op.conjugated(&scale);
    top_eigenpair_from(&tilde, opts.eig_tol, &tilde.sqrt_weights, opts.max_iter)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gauss_legendre;

    /// Direct Gauss–Legendre integration of the defining expectation.
    fn v_by_quadrature(b: f64, a: f64, rho: f64, params: &TreeParams) -> f64 {
        let p = params.vacancy_probs(Level::new(a * rho + 0.5 * rho * rho).unwrap()).p;
        let s = libm::sqrt(params.child_variance());
        let beta = pos(b - a);
        let (x, w) = gauss_legendre(16);
        let (lo, hi, panels) = (-12.0, 12.0, 480);
        let width = (hi - lo) / panels as f64;
        let mut e = 0.0;
        for k in 0..panels {
            let mid = lo + width * (k as f64 + 0.5);
            for (xi, wi) in x.iter().zip(&w) {
                let z = mid + 0.5 * width * xi;
                let f = libm::exp(-2.0 * pos(b / params.df() + s * z - a) * beta);
                e += 0.5 * width * wi * crate::math::std_normal_pdf(z) * f;
            }
        }
        p + (1.0 - p) * e
    }

    #[test]
    fn closed_form_matches_quadrature() {
        let p = TreeParams::new(2).unwrap();
        for &(b, a, rho) in &[(0.3, 0.0, 1.0), (1.5, 0.5, 0.5), (4.0, 1.0, 0.5), (0.9, 0.2, 2.0)] {
            let exact = v_function(b, a, rho, &p).unwrap();
            let quad = v_by_quadrature(b, a, rho, &p);
            assert!((exact - quad).abs() < 1e-7, "b={b}: {exact} vs {quad}");
        }
    }

    #[test]
    fn equals_one_below_a_and_bounded() {
        let p = TreeParams::new(2).unwrap();
        let (a, rho) = (0.5, 0.5);
        let pv = p.vacancy_probs(Level::new(a * rho + 0.5 * rho * rho).unwrap()).p;
        for i in 0..60 {
            let b = -3.0 + 0.15 * f64::from(i);
            let v = v_function(b, a, rho, &p).unwrap();
            if b <= a {
                assert_eq!(v, 1.0);
            }
            assert!(v > pv && v <= 1.0, "b={b}: {v}");
        }
    }

    #[test]
    fn decreasing_above_a() {
        let p = TreeParams::new(2).unwrap();
        let mut prev = 1.0;
        for i in 1..80 {
            let b = 0.05 * f64::from(i);
            let v = v_function(b, 0.0, 1.0, &p).unwrap();
            assert!(v < prev, "b={b}");
            prev = v;
        }
    }
}
