use super::operator::DiscreteOperator;
use crate::error::{Error, Result};
use alloc::vec::Vec;

/// Residual level that must be reached in addition to the eigenvalue tolerance.
pub const RESIDUAL_TOL: f64 = 1e-11;
pub const DEFAULT_MAX_ITER: usize = 100_000;

/// Perron eigenpair of a discretized operator.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPair {
    pub lambda: f64,
    /// Eigenfunction values at the grid nodes; nonnegative with unit norm under
    /// the grid weights.
    pub chi: Vec<f64>,
    /// `‖Aχ − λχ‖` in the weighted norm.
    pub residual: f64,
    pub iterations: usize,
    pub node_count: usize,
    pub lower: f64,
    pub upper: f64,
}

fn norm(v: &[f64]) -> f64 {
    libm::sqrt(v.iter().map(|x| x * x).sum())
}

/// Power iteration from the embedded constant function.
pub fn top_eigenpair(op: &DiscreteOperator, tol: f64) -> Result<SpectralPair> {
    let start = op.sqrt_weights.clone();
    top_eigenpair_from(op, tol, &start, DEFAULT_MAX_ITER)
}

/// Power iteration with a Rayleigh-quotient stopping rule: stops once
/// successive quotients differ by at most `tol` and the residual is below
/// [`RESIDUAL_TOL`].
pub fn top_eigenpair_from(
    op: &DiscreteOperator,
    tol: f64,
    start: &[f64],
    max_iter: usize,
) -> Result<SpectralPair> {
    if !(tol > 0.0) {
        return Err(Error::domain("eigenvalue tolerance must be positive"));
    }
    let n = op.dim();
    if start.len() != n {
        return Err(Error::domain(alloc::format!(
            "start vector has length {}, operator has dimension {n}",
            start.len()
        )));
    }
    let mut y = start.to_vec();
    let s = norm(&y);
    if !(s > 0.0) || y.iter().any(|v| *v < 0.0) {
        return Err(Error::domain("start vector must be nonnegative and nonzero"));
    }
    y.iter_mut().for_each(|v| *v /= s);

    let mut z = alloc::vec![0.0; n];
    let mut prev = f64::NAN;
    let mut lambda = 0.0;
    let mut residual = f64::INFINITY;
    for it in 1..=max_iter {
        op.apply_into(&y, &mut z);
        lambda = y.iter().zip(&z).map(|(a, b)| a * b).sum();
        residual = libm::sqrt(
            y.iter()
                .zip(&z)
                .map(|(a, b)| {
                    let r = b - lambda * a;
                    r * r
                })
                .sum(),
        );
        if (lambda - prev).abs() <= tol && residual <= RESIDUAL_TOL {
            let chi = op.function_values(&y);
            return Ok(SpectralPair {
                lambda,
                chi,
                residual,
                iterations: it,
                node_count: n,
                lower: op.grid.lower,
                upper: op.grid.upper,
            });
        }
        prev = lambda;
        let zn = norm(&z);
        if !(zn > 0.0 && zn.is_finite()) {
            return Err(Error::NoConvergence {
                iterations: it,
                lambda,
                residual,
                vector: op.function_values(&y),
            });
        }
        for (a, b) in y.iter_mut().zip(&z) {
            *a = b / zn;
        }
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        lambda,
        residual,
        vector: op.function_values(&y),
    })
}
