//! The `(u, a)` percolation diagram.
//!
//! Since `λ(u,a) = λ_a e^{−u(d−1)²/d}`, every row only needs `λ_a` at its
//! height. The critical line is traced in the height: `u = ln(λ_a)·d/(d−1)²`
//! for each `a` with `λ_a ≥ 1`.

use crate::error::{Error, Result};
use crate::params::TreeParams;
use crate::spectral::{lambda_h, solve_h_star, SpectralOptions};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    Supercritical,
    Subcritical,
    CriticalBand,
}

impl Region {
    pub fn classify(lambda: f64, eps: f64) -> Self {
        if lambda > 1.0 + eps {
            Region::Supercritical
        } else if lambda < 1.0 - eps {
            Region::Subcritical
        } else {
            Region::CriticalBand
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Region::Supercritical => "supercritical",
            Region::Subcritical => "subcritical",
            Region::CriticalBand => "critical-band",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Source {
    CriticalLine,
    ArcHstar,
    ArcSqrt2Ustar,
    Grid,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::CriticalLine => "critical_line",
            Source::ArcHstar => "arc_hstar",
            Source::ArcSqrt2Ustar => "arc_sqrt2ustar",
            Source::Grid => "grid",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagramRow {
    pub source: Source,
    pub u: f64,
    pub a: f64,
    pub lambda: f64,
    pub region: Region,
}

/// A sample point whose `λ` could not be computed.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub source: Source,
    pub u: f64,
    pub a: f64,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagramOptions {
    pub spectral: SpectralOptions,
    /// Samples on each arc, excluding the `u = 0` end.
    pub arc_samples: u32,
    /// Heights used to trace the critical line, spread over
    /// `[line_floor·σ, h_*]`.
    pub line_points: u32,
    pub line_floor: f64,
    pub root_tol: f64,
}

impl Default for DiagramOptions {
    fn default() -> Self {
        Self {
            spectral: SpectralOptions::default(),
            arc_samples: 16,
            line_points: 33,
            line_floor: -4.0,
            root_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagramSummary {
    pub h_star: f64,
    pub u_star: f64,
    /// Where the critical line crosses `a = 0`.
    pub u0: f64,
    pub eps: f64,
    /// `(0, h_*)` lies on the traced line and in the critical band.
    pub line_through_hstar: bool,
    /// `λ > 1` at every `h_*`-arc sample with `u > 0`.
    pub hstar_arc_supercritical: bool,
    /// Every `√(2u_*)`-arc sample is classified subcritical.
    pub sqrt2ustar_arc_subcritical: bool,
    /// `a_c` strictly decreases along the traced line.
    pub critical_line_decreasing: bool,
}

impl DiagramSummary {
    pub fn all_passed(&self) -> bool {
        self.line_through_hstar
            && self.hstar_arc_supercritical
            && self.sqrt2ustar_arc_subcritical
            && self.critical_line_decreasing
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagram {
    pub rows: Vec<DiagramRow>,
    pub failures: Vec<Failure>,
    pub summary: DiagramSummary,
}

/// Heights at which the critical line is traced, ascending and ending at `h_*`.
pub fn critical_line_heights(h_star: f64, params: &TreeParams, opts: &DiagramOptions) -> Vec<f64> {
    let lo = opts.line_floor * params.sigma();
    let last = opts.line_points.max(2) - 1;
    (0..=last)
        .map(|i| {
            if i == last {
                h_star
            } else {
                lo + (h_star - lo) * f64::from(i) / f64::from(last)
            }
        })
        .collect()
}

/// Critical-line rows from `λ_a` at the traced heights; heights with `λ_a < 1`
/// are dropped, save for `h_*` itself within the root tolerance.
pub fn critical_line_rows(
    heights: &[f64],
    values: &[Result<f64>],
    params: &TreeParams,
    opts: &DiagramOptions,
) -> (Vec<DiagramRow>, Vec<Failure>) {
    let kappa = params.decay_exponent();
    let mut rows = Vec::with_capacity(heights.len());
    let mut failures = Vec::new();
    for (&a, value) in heights.iter().zip(values) {
        let u = match value {
            Ok(lam_a) if *lam_a >= 1.0 => libm::log(*lam_a) / kappa,
            Ok(lam_a) if (lam_a - 1.0).abs() <= 10.0 * opts.root_tol => 0.0,
            Ok(_) => continue,
            Err(e) => {
                failures.push(Failure {
                    source: Source::CriticalLine,
                    u: f64::NAN,
                    a,
                    message: e.to_string(),
                });
                continue;
            }
        };
        rows.push(DiagramRow {
            source: Source::CriticalLine,
            u,
            a,
            lambda: 1.0,
            region: Region::CriticalBand,
        });
    }
    (rows, failures)
}

/// Builds the diagram, evaluating `λ_a` sequentially.
pub fn build_diagram(
    params: &TreeParams,
    u_grid: &[f64],
    a_grid: &[f64],
    eps: f64,
    opts: &DiagramOptions,
) -> Result<Diagram> {
    build_diagram_with(params, u_grid, a_grid, eps, opts, |heights| {
        heights.iter().map(|&a| lambda_h(a, params, &opts.spectral)).collect()
    })
}

/// Builds the diagram with a caller-supplied batch evaluator of `λ_a`, which
/// must return one result per height in order.
pub fn build_diagram_with<F>(
    params: &TreeParams,
    u_grid: &[f64],
    a_grid: &[f64],
    eps: f64,
    opts: &DiagramOptions,
    eval: F,
) -> Result<Diagram>
where
    F: FnOnce(&[f64]) -> Vec<Result<f64>>,
{
    if u_grid.is_empty() || a_grid.is_empty() {
        return Err(Error::domain("diagram grids must be nonempty"));
    }
    if !(eps > 0.0) {
        return Err(Error::domain(alloc::format!("eps must be positive, got {eps}")));
    }
    if opts.arc_samples < 2 || opts.line_points < 2 {
        return Err(Error::domain("need at least two arc and line samples"));
    }
    let kappa = params.decay_exponent();
    let h_star = solve_h_star(params, &opts.spectral, opts.root_tol)?.h_star;
    let u_star = params.u_star();

    let mut points: Vec<(Source, f64, f64)> = Vec::new();
    for &a in a_grid {
        for &u in u_grid {
            points.push((Source::Grid, u, a));
        }
    }
    let arc = |h: f64, u_end: f64, source: Source, points: &mut Vec<(Source, f64, f64)>| {
        let k = opts.arc_samples;
        for i in 0..=k {
            let (u, a) = if i == k {
                (u_end, 0.0)
            } else {
                let u = f64::from(i) * u_end / f64::from(k);
                (u, libm::sqrt((h * h - 2.0 * u).max(0.0)))
            };
            points.push((source, u, a));
        }
    };
    arc(h_star, 0.5 * h_star * h_star, Source::ArcHstar, &mut points);
    arc(libm::sqrt(2.0 * u_star), u_star, Source::ArcSqrt2Ustar, &mut points);
    let line_heights = critical_line_heights(h_star, params, opts);

    let mut heights: Vec<f64> = points.iter().map(|p| p.2).chain(line_heights.iter().copied()).collect();
    heights.push(0.0);
    heights.sort_by(f64::total_cmp);
    heights.dedup();
    let values = eval(&heights);
    if values.len() != heights.len() {
        return Err(Error::precondition("evaluator returned the wrong number of values"));
    }
    let lookup = |a: f64| -> &Result<f64> {
        let i = heights.binary_search_by(|h| h.total_cmp(&a)).expect("height was registered");
        &values[i]
    };

    let mut rows = Vec::with_capacity(points.len() + line_heights.len());
    let mut failures = Vec::new();
    for (source, u, a) in points {
        if !(u >= 0.0) {
            failures.push(Failure {
                source,
                u,
                a,
                message: alloc::format!("level u must be non-negative, got {u}"),
            });
            continue;
        }
        match lookup(a) {
            Ok(lam_a) => {
                let lambda = lam_a * libm::exp(-u * kappa);
                rows.push(DiagramRow {
                    source,
                    u,
                    a,
                    lambda,
                    region: Region::classify(lambda, eps),
                });
            }
            Err(e) => failures.push(Failure {
                source,
                u,
                a,
                message: e.to_string(),
            }),
        }
    }
    let line_values: Vec<Result<f64>> = line_heights.iter().map(|&a| lookup(a).clone()).collect();
    let (mut line, line_failures) = critical_line_rows(&line_heights, &line_values, params, opts);
    failures.extend(line_failures);

    let lam0 = lookup(0.0).as_ref().map_err(Clone::clone)?;
    let u0 = libm::log(*lam0) / kappa;
    let lam_hstar = *lookup(h_star).as_ref().map_err(Clone::clone)?;
    let line_through_hstar = (lam_hstar - 1.0).abs() <= eps
        && line.last().is_some_and(|r| r.a == h_star && r.u.abs() <= eps);
    let hstar_arc_supercritical = rows
        .iter()
        .filter(|r| r.source == Source::ArcHstar && r.u > 0.0)
        .all(|r| r.lambda > 1.0);
    let sqrt2ustar_arc_subcritical = rows
        .iter()
        .filter(|r| r.source == Source::ArcSqrt2Ustar)
        .all(|r| r.region == Region::Subcritical);
    // heights ascend, so u must strictly descend
    let critical_line_decreasing = line.len() >= 2 && line.windows(2).all(|w| w[1].u < w[0].u);
    let arcs_complete = !failures
        .iter()
        .any(|f| matches!(f.source, Source::ArcHstar | Source::ArcSqrt2Ustar | Source::CriticalLine));
    line.reverse();
    rows.extend(line);
    Ok(Diagram {
        rows,
        failures,
        summary: DiagramSummary {
            h_star,
            u_star,
            u0,
            eps,
            line_through_hstar,
            hstar_arc_supercritical: hstar_arc_supercritical && arcs_complete,
            sqrt2ustar_arc_subcritical: sqrt2ustar_arc_subcritical && arcs_complete,
            critical_line_decreasing: critical_line_decreasing && arcs_complete,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification_is_a_function_of_lambda() {
        assert_eq!(Region::classify(1.0, 1e-3), Region::CriticalBand);
        assert_eq!(Region::classify(1.0011, 1e-3), Region::Supercritical);
        assert_eq!(Region::classify(0.9989, 1e-3), Region::Subcritical);
        assert_eq!(Region::classify(1.001, 1e-3), Region::CriticalBand);
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = TreeParams::new(2).unwrap();
        let o = DiagramOptions::default();
        assert!(build_diagram(&p, &[], &[0.0], 1e-3, &o).is_err());
        assert!(build_diagram(&p, &[0.0], &[0.0], 0.0, &o).is_err());
    }

    #[test]
    fn failed_cells_are_reported() {
        let p = TreeParams::new(2).unwrap();
        let o = DiagramOptions::default();
        let dg = build_diagram(&p, &[-0.1, 0.1], &[0.5], 1e-3, &o).unwrap();
        assert_eq!(dg.failures.len(), 1);
        assert_eq!(dg.failures[0].u, -0.1);
        assert!(dg.summary.all_passed(), "{:?}", dg.summary);
    }
}
