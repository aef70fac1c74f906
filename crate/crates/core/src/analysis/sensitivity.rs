use crate::error::{invalid, Result};

/// Fitted decay used to build a sensitivity curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub t2: f64,
    pub n: f64,
    /// 1 for SQ, 2 for DQ.
    pub gamma_mult: f64,
}

impl DecayFit {
    pub fn new(t2: f64, n: f64, gamma_mult: f64) -> Result<Self> {
        if !(t2 > 0.0) || !(0.5..=3.5).contains(&n) || !(gamma_mult > 0.0) {
            return invalid(format!(
                "sensitivity needs T2 > 0, n in [0.5, 3.5], gamma_mult > 0; got {t2}, {n}, {gamma_mult}"
            ));
        }
        Ok(DecayFit { t2, n, gamma_mult })
    }

    /// Relative inverse sensitivity `γ²·exp(-(T/T2)^n)·T^{3/2}`.
    pub fn value(&self, t: f64) -> f64 {
        self.gamma_mult.powi(2) * (-(t / self.t2).powf(self.n)).exp() * t.powf(1.5)
    }

    /// `T* = T2·(3/(2n))^{1/n}`.
    pub fn peak_time(&self) -> f64 {
        self.t2 * (1.5 / self.n).powf(1.0 / self.n)
    }

    pub fn peak_value(&self) -> f64 {
        self.value(self.peak_time())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityCurve {
    pub t: Vec<f64>,
    pub value: Vec<f64>,
    pub peak_time: f64,
    pub peak_value: f64,
}

/// Samples the curve at `points` times spanning `(0, t_max]`.
pub fn sensitivity_curve(fit: DecayFit, t_max: f64, points: usize) -> Result<SensitivityCurve> {
    if !(t_max > 0.0) || points < 2 {
        return invalid("sensitivity curve needs t_max > 0 and at least 2 points");
    }
    let t: Vec<f64> = (1..=points).map(|i| t_max * i as f64 / points as f64).collect();
    let value = t.iter().map(|&x| fit.value(x)).collect();
    Ok(SensitivityCurve {
        t,
        value,
        peak_time: fit.peak_time(),
        peak_value: fit.peak_value(),
    })
}

/// Peak-to-peak ratio of two configurations.
pub fn enhancement(config: DecayFit, reference: DecayFit) -> f64 {
    config.peak_value() / reference.peak_value()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fit(t2: f64, g: f64) -> DecayFit {
        DecayFit::new(t2, 1.6, g).unwrap()
    }

    #[test]
    fn enhancement_ratios() {
        let sq = fit(65.0, 1.0);
        let closed = 4.0 * (75.0f64 / 65.0).powf(1.5);
        assert!((enhancement(fit(75.0, 2.0), sq) - closed).abs() < 1e-12);
        assert!((enhancement(fit(75.0, 2.0), sq) - 4.96).abs() < 0.01);
        assert!((enhancement(fit(94.0, 1.0), sq) - 1.74).abs() < 0.01);
        assert!((enhancement(fit(41.0, 2.0), sq) - 2.00).abs() < 0.01);
        assert_eq!(enhancement(sq, sq), 1.0);
    }

    #[test]
    fn peak_is_stationary() {
        let f = fit(65.0, 1.0);
        let t = f.peak_time();
        let h = 1e-4 * t;
        let d = (f.value(t + h) - f.value(t - h)) / (2.0 * h);
        assert!((d * t / f.peak_value()).abs() < 1e-6);
    }

    #[test]
    fn curve_peak_not_exceeded() {
        let c = sensitivity_curve(fit(65.0, 1.0), 300.0, 600).unwrap();
        assert!(c.value.iter().all(|&v| v <= c.peak_value * (1.0 + 1e-12)));
    }

    #[test]
    fn rejects_bad_stretch() {
        assert!(DecayFit::new(65.0, 4.0, 1.0).is_err());
    }
}
