//! Bisection for monotone scalar functions.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub fx: f64,
    /// Final bracket; `f` changes sign between its ends.
    pub bracket: (f64, f64),
    pub iterations: usize,
}

/// Finds `x` in `[lo, hi]` with `|f(x)| <= ftol`, or stops once the bracket is
/// narrower than `xtol`.
///
/// `f(lo)` and `f(hi)` must have opposite signs (a zero at an end is accepted).
pub fn bisect<F>(mut f: F, lo: f64, hi: f64, ftol: f64, xtol: f64) -> Result<Root>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut lo, mut hi) = (lo, hi);
    let mut f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo.abs() <= ftol {
        return Ok(Root {
            x: lo,
            fx: f_lo,
            bracket: (lo, hi),
            iterations: 0,
        });
    }
    if f_hi.abs() <= ftol {
        return Ok(Root {
            x: hi,
            fx: f_hi,
            bracket: (lo, hi),
            iterations: 0,
        });
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::Bracket { lo, hi, f_lo, f_hi });
    }
    let mut best = if f_lo.abs() < f_hi.abs() {
        (lo, f_lo)
    } else {
        (hi, f_hi)
    };
    for it in 1..=200 {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid)?;
        if f_mid.abs() < best.1.abs() {
            best = (mid, f_mid);
        }
        if f_mid.abs() <= ftol || (hi - lo) < xtol {
            return Ok(Root {
                x: best.0,
                fx: best.1,
                bracket: (lo, hi),
                iterations: it,
            });
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(Root {
        x: best.0,
        fx: best.1,
        bracket: (lo, hi),
        iterations: 200,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let r = bisect(|x| Ok(x * x - 2.0), 0.0, 2.0, 1e-13, 0.0).unwrap();
        assert!((r.x - core::f64::consts::SQRT_2).abs() < 1e-13);
        assert!(r.bracket.0 <= r.x && r.x <= r.bracket.1);
    }

    #[test]
    fn decreasing_function() {
        let r = bisect(|x| Ok(1.0 - x), -3.0, 5.0, 1e-12, 0.0).unwrap();
        assert!((r.x - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reports_missing_sign_change() {
        let err = bisect(|x| Ok(x * x + 1.0), -1.0, 1.0, 1e-12, 0.0).unwrap_err();
        match err {
            Error::Bracket { lo, hi, f_lo, f_hi } => {
                assert_eq!((lo, hi), (-1.0, 1.0));
                assert_eq!((f_lo, f_hi), (2.0, 2.0));
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
