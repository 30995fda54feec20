//! CSV artifacts.

use std::io::Write;
use vsperc_core::diagram::DiagramRow;
use vsperc_core::sim::TauProfile;

pub const DIAGRAM_HEADER: [&str; 5] = ["source", "u", "a", "lambda", "region"];
pub const TAU_HEADER: [&str; 5] = ["n", "successes", "trials", "estimate", "stderr"];

/// `x` with 12 significant digits, in the shorter of fixed and scientific
/// notation, trailing zeros dropped.
pub fn sig12(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    let s = if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let s = format!("{x:.11e}");
        let (mantissa, e) = s.split_once('e').expect("scientific format");
        format!("{}e{e}", trim_zeros(mantissa.to_string()))
    };
    // rounding can carry into a new digit, e.g. 9.9999999999996
    if s.parse::<f64>().map(|y| (y - x).abs() <= x.abs() * 1e-11).unwrap_or(false) {
        s
    } else {
        format!("{x:.11e}")
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

pub fn write_diagram_csv<W: Write>(out: W, rows: &[DiagramRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(DIAGRAM_HEADER)?;
    for r in rows {
        w.write_record([
            r.source.as_str().to_string(),
            sig12(r.u),
            sig12(r.a),
            sig12(r.lambda),
            r.region.as_str().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_tau_csv<W: Write>(out: W, profile: &TauProfile) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TAU_HEADER)?;
    for (m, e) in profile.estimates().iter().enumerate() {
        w.write_record([
            m.to_string(),
            e.successes.to_string(),
            e.trials.to_string(),
            sig12(e.estimate),
            sig12(e.stderr),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sig12(1.0), "1");
        assert_eq!(sig12(0.1), "0.1");
        assert_eq!(sig12(std::f64::consts::PI), "3.14159265359");
        assert_eq!(sig12(-2.0 / 3.0), "-0.666666666667");
        assert_eq!(sig12(1.23456789012345e-9), "1.23456789012e-9");
        assert_eq!(sig12(6.02214076e23), "6.02214076e23");
        assert_eq!(sig12(0.0), "0");
        for &x in &[1e-300, 12345.678901234567, 9.99999999999999, 0.000123456789012345] {
            let back: f64 = sig12(x).parse().unwrap();
            assert!((back - x).abs() <= x.abs() * 5e-12, "{x} {}", sig12(x));
        }
    }
}
