//! Closed-form constants of the (d+1)-regular tree with unit weights.
//!
//! The free field has variance `σ² = d/(d²−1)` at every vertex and its
//! correlation decays by the factor `1/d` per edge, so along any geodesic it is
//! the stationary Gaussian AR(1) chain `Y = X/d + √(σ²(1−1/d²))·Z`. The chain's
//! transition density with respect to `ν = N(0, σ²)` is the Mehler kernel
//! returned by [`TreeParams::mehler_kernel`].

use crate::error::{Error, Result};
use core::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeParams {
    d: u32,
    sigma2: f64,
    contraction: f64,
    decay_exponent: f64,
    point_capacity: f64,
}

impl TreeParams {
    /// Constants for the tree in which every vertex has `d + 1` neighbours.
    pub fn new(d: u32) -> Result<Self> {
        if d < 2 {
            return Err(Error::domain(alloc::format!(
                "branching number d must be at least 2, got {d}"
            )));
        }
        let df = f64::from(d);
        let dm1 = df - 1.0;
        Ok(Self {
            d,
            sigma2: df / (df * df - 1.0),
            contraction: 1.0 / df,
            decay_exponent: dm1 * dm1 / df,
            point_capacity: (df * df - 1.0) / df,
        })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn df(&self) -> f64 {
        f64::from(self.d)
    }

    /// `σ² = d/(d²−1)`, the on-site Green function.
    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn sigma(&self) -> f64 {
        libm::sqrt(self.sigma2)
    }

    /// One-step correlation `1/d` of the field along an edge.
    pub fn contraction(&self) -> f64 {
        self.contraction
    }

    /// `(d−1)²/d`: the per-vertex exponent of `p` and the rate in `λ(u,a)`.
    pub fn decay_exponent(&self) -> f64 {
        self.decay_exponent
    }

    /// `σ^{-2} = (d²−1)/d`, the capacity of a single vertex.
    pub fn point_capacity(&self) -> f64 {
        self.point_capacity
    }

    /// Conditional variance of a child given its parent, `σ²(1 − 1/d²)`.
    pub fn child_variance(&self) -> f64 {
        let c = self.contraction;
        self.sigma2 * (1.0 - c * c)
    }

    /// Density of `ν = N(0, σ²)` at `x`.
    pub fn nu_density(&self, x: f64) -> f64 {
        libm::exp(-0.5 * x * x / self.sigma2) / libm::sqrt(2.0 * PI * self.sigma2)
    }

    /// `ν([lo, hi])`.
    pub fn nu_mass(&self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        let s = self.sigma();
        crate::math::std_normal_cdf(hi / s) - crate::math::std_normal_cdf(lo / s)
    }

    /// `ν([h, ∞))`.
    pub fn nu_tail(&self, h: f64) -> f64 {
        crate::math::std_normal_sf(h / self.sigma())
    }

    /// Transition density of the one-step chain with respect to `ν(dy)`:
    ///
    /// `k(x,y) = (1−c²)^{-1/2} exp((2cxy − c²(x²+y²)) / (2σ²(1−c²)))`, `c = 1/d`.
    ///
    /// `L` acts as `(Lf)(x) = d ∫ k(x,y) f(y) ν(dy)`.
    pub fn mehler_kernel(&self, x: f64, y: f64) -> f64 {
        let c = self.contraction;
        let one_m = 1.0 - c * c;
        let expo = (2.0 * c * x * y - c * c * (x * x + y * y)) / (2.0 * self.sigma2 * one_m);
        libm::exp(expo) / libm::sqrt(one_m)
    }

    /// Vacancy constants of the interlacement at level `v`.
    pub fn vacancy_probs(&self, v: Level) -> VacancyConstants {
        VacancyConstants {
            p0: libm::exp(-v.0 * self.point_capacity),
            p: libm::exp(-v.0 * self.decay_exponent),
        }
    }

    /// Critical interlacement level `u_* = d ln d / (d−1)²`, the root of
    /// `d·exp(−u (d−1)²/d) = 1`.
    pub fn u_star(&self) -> f64 {
        libm::log(self.df()) / self.decay_exponent
    }

    /// Capacity of the ball `B_n` around the base point.
    ///
    /// Every sphere vertex escapes through one of its `d` outward edges and then
    /// never returns with probability `1 − 1/d`, so its equilibrium mass is `d − 1`.
    pub fn ball_capacity(&self, n: u32) -> f64 {
        if n == 0 {
            return self.point_capacity;
        }
        let df = self.df();
        (df + 1.0) * libm::pow(df, f64::from(n - 1)) * (df - 1.0)
    }

    /// Number of vertices at distance exactly `n` from the base point.
    pub fn sphere_size(&self, n: u32) -> u64 {
        if n == 0 {
            1
        } else {
            u64::from(self.d + 1) * u64::from(self.d).pow(n - 1)
        }
    }

    /// Number of vertices of `B_n`.
    pub fn ball_size(&self, n: u32) -> u64 {
        (0..=n).map(|k| self.sphere_size(k)).sum()
    }
}

/// An interlacement level `v ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Level(f64);

impl Level {
    pub fn new(v: f64) -> Result<Self> {
        if v.is_nan() || v < 0.0 {
            return Err(Error::domain(alloc::format!(
                "interlacement level must be non-negative, got {v}"
            )));
        }
        Ok(Level(v))
    }

    pub const ZERO: Level = Level(0.0);

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Probabilities that no trajectory of the interlacement has a given vertex as
/// its closest point to the base point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VacancyConstants {
    /// The base point itself is vacant.
    pub p0: f64,
    /// A vertex other than the base point is not "blocked".
    pub p: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn rejects_small_d() {
        assert!(matches!(TreeParams::new(1), Err(Error::Domain(_))));
        assert!(matches!(TreeParams::new(0), Err(Error::Domain(_))));
    }

    #[test]
    fn constants_for_d2_and_d3() {
        let p = TreeParams::new(2).unwrap();
        assert!(close(p.sigma2(), 2.0 / 3.0, 1e-15));
        assert!(close(p.decay_exponent(), 0.5, 1e-15));
        assert!(close(p.point_capacity(), 1.5, 1e-15));
        assert!(close(p.contraction(), 0.5, 0.0));
        assert!(close(p.child_variance(), 0.5, 1e-15));

        let p = TreeParams::new(3).unwrap();
        assert!(close(p.sigma2(), 3.0 / 8.0, 1e-15));
        assert!(close(p.decay_exponent(), 4.0 / 3.0, 1e-15));
        for d in 2..=12 {
            let p = TreeParams::new(d).unwrap();
            assert!(close(p.sigma2() * p.point_capacity(), 1.0, 1e-15));
        }
    }

    #[test]
    fn nu_density_values() {
        let p = TreeParams::new(2).unwrap();
        assert!(close(p.nu_density(0.0), 0.488_602_511_902_919_9, 1e-12));
        for &x in &[0.1, 0.8, 2.3] {
            assert_eq!(p.nu_density(x), p.nu_density(-x));
        }
    }

    #[test]
    fn mehler_kernel_at_origin_and_symmetry() {
        let p = TreeParams::new(2).unwrap();
        assert!(close(p.mehler_kernel(0.0, 0.0), 2.0 / libm::sqrt(3.0), 1e-15));
        for &(x, y) in &[(0.3, -1.2), (2.0, 0.5), (-0.7, -0.7)] {
            assert!((p.mehler_kernel(x, y) - p.mehler_kernel(y, x)).abs() <= 1e-14);
        }
    }

    #[test]
    fn vacancy_probabilities() {
        let p = TreeParams::new(2).unwrap();
        let v0 = p.vacancy_probs(Level::ZERO);
        assert_eq!((v0.p0, v0.p), (1.0, 1.0));
        let v1 = p.vacancy_probs(Level::new(1.0).unwrap());
        assert!(close(v1.p0, libm::exp(-1.5), 1e-15));
        assert!(close(v1.p, libm::exp(-0.5), 1e-15));
        assert!(close(v1.p0, 0.223_130, 1e-6));
        assert!(close(v1.p, 0.606_531, 1e-6));
        assert!(v1.p0 <= v1.p);
        assert!(Level::new(-0.1).is_err());
        assert!(Level::new(f64::NAN).is_err());
    }

    #[test]
    fn u_star_closed_forms() {
        let p2 = TreeParams::new(2).unwrap();
        assert!(close(p2.u_star(), 2.0 * core::f64::consts::LN_2, 1e-15));
        let p3 = TreeParams::new(3).unwrap();
        assert!(close(p3.u_star(), 0.75 * libm::log(3.0), 1e-15));
        assert!(close(p3.u_star(), 0.823_959, 1e-6));
        for d in 2..=6 {
            let p = TreeParams::new(d).unwrap();
            let lhs = p.df() * libm::exp(-p.u_star() * p.decay_exponent());
            assert!(close(lhs, 1.0, 1e-14), "d={d}: {lhs}");
        }
    }

    #[test]
    fn ball_capacity_values_and_ladder() {
        let p = TreeParams::new(2).unwrap();
        assert_eq!(p.ball_capacity(0), 1.5);
        assert_eq!(p.ball_capacity(1), 3.0);
        assert_eq!(p.ball_capacity(2), 6.0);
        for d in 2..=5 {
            let p = TreeParams::new(d).unwrap();
            for n in 0..=20 {
                // base point plus |B_n|−1 non-base vertices with their own exponents
                let decomposed =
                    p.point_capacity() + (p.ball_size(n) - 1) as f64 * p.decay_exponent();
                let cap = p.ball_capacity(n);
                assert!((decomposed - cap).abs() <= 1e-12 * cap, "d={d} n={n}");
                if n >= 1 {
                    assert_eq!(p.ball_capacity(n + 1), p.df() * cap);
                }
            }
        }
    }

    /// Green function oracle: expected visits to the base point of a simple
    /// random walk started there, divided by the degree.
    #[test]
    fn sigma2_matches_simulated_green_function() {
        let p = TreeParams::new(2).unwrap();
        let d = p.d();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let trials = 200_000;
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..trials {
            // the distance to the base point is a birth-death chain
            let mut dist = 0u32;
            let mut visits = 0.0;
            while dist < 40 {
                if dist == 0 {
                    visits += 1.0;
                    dist = 1;
                } else if rng.random_range(0..=d) == 0 {
                    dist -= 1;
                } else {
                    dist += 1;
                }
            }
            s += visits;
            s2 += visits * visits;
        }
        let n = f64::from(trials);
        let mean = s / n;
        let se = libm::sqrt((s2 / n - mean * mean) / n);
        let g = mean / f64::from(d + 1);
        let se_g = se / f64::from(d + 1);
        assert!((g - p.sigma2()).abs() < 3.0 * se_g, "g={g} se={se_g}");
    }
}
