//! Small scalar helpers on top of `libm`.

use core::f64::consts::{PI, SQRT_2};

/// Standard normal density.
pub fn std_normal_pdf(z: f64) -> f64 {
    libm::exp(-0.5 * z * z) / libm::sqrt(2.0 * PI)
}

/// `P[Z <= z]` for a standard normal `Z`.
pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / SQRT_2)
}

/// `P[Z > z]` for a standard normal `Z`, accurate in the upper tail.
pub fn std_normal_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z / SQRT_2)
}

/// `ln P[Z > z]`, finite for every finite `z`.
pub fn ln_std_normal_sf(z: f64) -> f64 {
    if z < 30.0 {
        libm::log(std_normal_sf(z))
    } else {
        // Mills-ratio expansion; erfc underflows past this point.
        let z2 = z * z;
        -0.5 * z2 - libm::log(z * libm::sqrt(2.0 * PI)) + libm::log1p(-1.0 / z2 + 3.0 / (z2 * z2))
    }
}

/// `x⁺ = max(x, 0)`.
#[inline]
pub fn pos(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}
