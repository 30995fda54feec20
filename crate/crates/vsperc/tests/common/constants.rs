//! Frozen reference values.
//!
//! Each value was accepted only after two independent oracles agreed with it:
//! a full dense eigendecomposition at twice the default node count, and the
//! Fleming–Viot ray-survival estimate in `common::ray_survival_rate`. The
//! agreement is re-checked by `tests/oracles.rs`; the figures recorded below
//! are from the run that froze the values (FV with 20 000 particles and 4000
//! steps, seed 1).

/// `λ_0` for `d = 2`. Dense 800-node solve: 1.384475 (|Δ| < 1e−12).
/// FV: 1.384627 ± 0.000104.
pub const LAMBDA_0_D2: f64 = 1.384_475_074_263_690_9;

/// `h_*` for `d = 2`. Dense 800-node root: 0.588612065 (|Δ| < 1e−9).
/// FV at this height: λ = 1.000085 ± 0.000109.
pub const H_STAR_D2: f64 = 0.588_612_065_474_855_7;

/// `h_*` for `d = 3`, same protocol.
pub const H_STAR_D3: f64 = 0.572_188_446_573_140_5;

/// `u₀ = ln(λ_0)·d/(d−1)²` for `d = 2`, where the critical line meets `a = 0`.
pub const U0_D2: f64 = 0.650_642_120_091_726_4;

/// `λ_a e^{−(aρ+ρ²/2)(d−1)²/d} − λ_{a+ρ}` for `d = 2` at `(a, ρ)`. The 400-
/// and 800-node values agree to 1e−14.
pub const THM21_GAPS_D2: [(f64, f64, f64); 2] = [
    (0.0, 1.0, 0.342_641_657_971_227_7),
    (0.5, 0.5, 0.142_361_134_137_625_3),
];
