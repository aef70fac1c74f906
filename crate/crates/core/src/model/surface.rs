use crate::error::{invalid, Result};

pub const GAMMA_ELECTRON_MHZ_PER_G: f64 = 2.8025;

/// Surface electron-spin bath parameters. `t2_rabi` and `tau_c` in microseconds,
/// `density` in spins per nm^2. `tau_c` may be infinite for a static bath.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceSpinParams {
    pub gamma_ss: f64,
    pub t2_rabi: f64,
    pub tau_c: f64,
    pub density: f64,
}

impl Default for SurfaceSpinParams {
    fn default() -> Self {
        SurfaceSpinParams {
            gamma_ss: GAMMA_ELECTRON_MHZ_PER_G,
            t2_rabi: 0.2,
            tau_c: 50.0,
            density: 0.04,
        }
    }
}

impl SurfaceSpinParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_ss > 0.0) || !self.gamma_ss.is_finite() {
            return invalid(format!("gamma_ss must be positive, got {}", self.gamma_ss));
        }
        if !(self.t2_rabi > 0.0) {
            return invalid(format!("t2_rabi must be positive, got {}", self.t2_rabi));
        }
        if !(self.tau_c > 0.0) {
            return invalid(format!("tau_c must be positive, got {}", self.tau_c));
        }
        if !(self.density >= 0.0) || !self.density.is_finite() {
            return invalid(format!("density must be non-negative, got {}", self.density));
        }
        Ok(())
    }

    /// Telegraph flip rate in 1/us; zero for a static bath.
    pub fn flip_rate(&self) -> f64 {
        if self.tau_c.is_finite() {
            0.5 / self.tau_c
        } else {
            0.0
        }
    }

    /// Lindblad rate of the `sigma_z` dephaser giving a Rabi envelope `exp(-t / t2_rabi)`.
    pub fn dephasing_rate(&self) -> f64 {
        1.0 / self.t2_rabi
    }
}

/// Larmor frequency in MHz of a surface spin in field `b0` gauss.
pub fn surface_spin_larmor(b0: f64, gamma_ss: f64) -> Result<f64> {
    if !(b0 >= 0.0) || !b0.is_finite() {
        return invalid(format!("field must be non-negative, got {b0}"));
    }
    if !(gamma_ss > 0.0) {
        return invalid(format!("gamma_ss must be positive, got {gamma_ss}"));
    }
    Ok(gamma_ss * b0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn larmor_values() {
        let g = GAMMA_ELECTRON_MHZ_PER_G;
        assert!((surface_spin_larmor(382.0, g).unwrap() - 1070.56).abs() < 0.01);
        assert!((surface_spin_larmor(281.0, g).unwrap() - 787.5).abs() < 0.01);
        assert!(surface_spin_larmor(-1.0, g).is_err());
    }

    #[test]
    fn static_bath_has_no_flips() {
        let p = SurfaceSpinParams {
            tau_c: f64::INFINITY,
            ..Default::default()
        };
        assert!(p.validate().is_ok());
        assert_eq!(p.flip_rate(), 0.0);
    }
}
