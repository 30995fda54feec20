use crate::error::Result;
use crate::params::TreeParams;
use crate::quadrature::QuadratureGrid;
use alloc::vec::Vec;

/// Symmetrized Nyström matrix of `L_h = π_h L π_h`.
///
/// Entries are `A_ij = d·k(x_i, x_j)·√(w_i w_j)`. A vector `y` represents the
/// function with node values `y_i / √w_i`, so the Euclidean norm of `y` is the
/// `L²(ν)` norm of the function under the grid weights.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteOperator {
    pub grid: QuadratureGrid,
    pub h: f64,
    /// Row-major `n × n`.
    pub matrix: Vec<f64>,
    pub sqrt_weights: Vec<f64>,
}

impl DiscreteOperator {
    pub fn new(h: f64, grid: QuadratureGrid, params: &TreeParams) -> Self {
        let n = grid.node_count();
        let df = params.df();
        let sqrt_weights: Vec<f64> = grid.weights.iter().map(|w| libm::sqrt(*w)).collect();
        let mut matrix = alloc::vec![0.0; n * n];
        for i in 0..n {
            let xi = grid.nodes[i];
            for j in i..n {
                let v = df * params.mehler_kernel(xi, grid.nodes[j]) * sqrt_weights[i] * sqrt_weights[j];
                matrix[i * n + j] = v;
                matrix[j * n + i] = v;
            }
        }
        Self {
            grid,
            h,
            matrix,
            sqrt_weights,
        }
    }

    /// Builds the grid for `h` and the operator on it.
    pub fn build(
        h: f64,
        params: &TreeParams,
        opts: &crate::quadrature::GridOptions,
    ) -> Result<Self> {
        let grid = QuadratureGrid::build(h, params, opts)?;
        Ok(Self::new(h, grid, params))
    }

    pub fn dim(&self) -> usize {
        self.sqrt_weights.len()
    }

    pub fn apply_into(&self, y: &[f64], out: &mut [f64]) {
        let n = self.dim();
        for (row, o) in self.matrix.chunks_exact(n).zip(out.iter_mut()) {
            *o = row.iter().zip(y).map(|(a, b)| a * b).sum();
        }
    }

    pub fn apply(&self, y: &[f64]) -> Vec<f64> {
        let mut out = alloc::vec![0.0; self.dim()];
        self.apply_into(y, &mut out);
        out
    }

    /// `D·A·D` for the diagonal `D = diag(scale)`.
    pub fn conjugated(&self, scale: &[f64]) -> Self {
        let n = self.dim();
        let mut matrix = self.matrix.clone();
        for i in 0..n {
            for j in 0..n {
                matrix[i * n + j] *= scale[i] * scale[j];
            }
        }
        Self {
            grid: self.grid.clone(),
            h: self.h,
            matrix,
            sqrt_weights: self.sqrt_weights.clone(),
        }
    }

    /// Vector representing the function `f` (node values) in the symmetric basis.
    pub fn embed(&self, f: &[f64]) -> Vec<f64> {
        f.iter().zip(&self.sqrt_weights).map(|(f, s)| f * s).collect()
    }

    /// Node values of the function represented by `y`.
    pub fn function_values(&self, y: &[f64]) -> Vec<f64> {
        y.iter().zip(&self.sqrt_weights).map(|(y, s)| y / s).collect()
    }

    pub fn max_asymmetry(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max((self.matrix[i * n + j] - self.matrix[j * n + i]).abs());
            }
        }
        worst
    }
}
