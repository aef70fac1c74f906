use std::fmt;

use crate::error::{invalid, Result};

/// Expected `(T2,DQ/T2,SQ)^n` when only magnetic noise is present.
pub const MAGNETIC_ONLY_RATIO: f64 = 0.25;
pub const DEFAULT_RATIO_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatioVerdict {
    PureMagnetic,
    CommonModePresent,
    /// Below the magnetic-only value by more than the tolerance.
    BelowMagneticLimit,
}

impl fmt::Display for RatioVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RatioVerdict::PureMagnetic => "pure-magnetic-consistent",
            RatioVerdict::CommonModePresent => "common-mode noise present",
            RatioVerdict::BelowMagneticLimit => "below magnetic-only limit",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioTest {
    pub ratio: f64,
    pub verdict: RatioVerdict,
}

pub fn dq_sq_ratio(t2_sq: f64, t2_dq: f64, n: f64) -> Result<RatioTest> {
    dq_sq_ratio_with_tolerance(t2_sq, t2_dq, n, DEFAULT_RATIO_TOLERANCE)
}

pub fn dq_sq_ratio_with_tolerance(t2_sq: f64, t2_dq: f64, n: f64, tol: f64) -> Result<RatioTest> {
    if !(t2_sq > 0.0 && t2_dq > 0.0 && n > 0.0 && tol >= 0.0) {
        return invalid("DQ/SQ ratio needs positive inputs");
    }
    let ratio = (t2_dq / t2_sq).powf(n);
    let verdict = if (ratio - MAGNETIC_ONLY_RATIO).abs() <= tol {
        RatioVerdict::PureMagnetic
    } else if ratio > MAGNETIC_ONLY_RATIO {
        RatioVerdict::CommonModePresent
    } else {
        RatioVerdict::BelowMagneticLimit
    };
    Ok(RatioTest { ratio, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn measured_values() {
        let r = dq_sq_ratio(65.0, 41.0, 1.6).unwrap();
        assert!((r.ratio - 0.478).abs() < 1e-3);
        assert_eq!(r.verdict, RatioVerdict::CommonModePresent);
    }

    #[test]
    fn inversion_is_exact() {
        let n = 1.6;
        let r = dq_sq_ratio(65.0, 65.0 * 0.25f64.powf(1.0 / n), n).unwrap();
        assert!((r.ratio - 0.25).abs() < 1e-14);
        assert_eq!(r.verdict, RatioVerdict::PureMagnetic);
    }

    #[test]
    fn verdict_text() {
        assert_eq!(RatioVerdict::CommonModePresent.to_string(), "common-mode noise present");
    }
}
