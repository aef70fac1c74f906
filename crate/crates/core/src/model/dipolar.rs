use crate::error::{invalid, Result};

/// Smallest NV to surface-spin distance accepted, in nm.
pub const MIN_DISTANCE_NM: f64 = 0.1;

const MU0_OVER_4PI: f64 = 1e-7;
const BOHR_MAGNETON: f64 = 9.274_010_078_3e-24;
const G_ELECTRON: f64 = 2.002_319_304_36;
const PLANCK: f64 = 6.626_070_15e-34;

/// Electron-electron dipolar constant `(mu0 / 4 pi) (g mu_B)^2 / h` in MHz nm^3.
pub fn dipolar_constant() -> f64 {
    let gm = G_ELECTRON * BOHR_MAGNETON;
    MU0_OVER_4PI * gm * gm / PLANCK * 1e27 * 1e-6
}

/// Secular coupling in kHz between the NV and a surface spin separated by `r`
/// (nm), for an NV quantization axis `axis` (normalized internally).
pub fn dipolar_coupling(r: [f64; 3], axis: [f64; 3]) -> Result<f64> {
    let rn = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
    if !(rn >= MIN_DISTANCE_NM) {
        return invalid(format!("separation {rn} nm below {MIN_DISTANCE_NM} nm"));
    }
    let an = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    if !(an > 0.0) || !an.is_finite() {
        return invalid("NV axis must be a non-zero vector");
    }
    let cos = (r[0] * axis[0] + r[1] * axis[1] + r[2] * axis[2]) / (rn * an);
    Ok(dipolar_constant() * (1.0 - 3.0 * cos * cos) / rn.powi(3) * 1e3)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_from_gyromagnetic_ratio() {
        let gamma_e = 1.760_859_630_23e11;
        let hbar = 1.054_571_817e-34;
        let k = 1e-7 * gamma_e * gamma_e * hbar / (2.0 * std::f64::consts::PI) * 1e21;
        assert!((dipolar_constant() - k).abs() / k < 1e-6);
        assert!((dipolar_constant() - 52.04).abs() < 0.01);
    }

    #[test]
    fn coupling_along_axis_and_at_magic_angle() {
        let b = dipolar_coupling([0.0, 0.0, 5.0], [0.0, 0.0, 1.0]).unwrap();
        assert!((b + 2.0 * dipolar_constant() / 125.0 * 1e3).abs() < 1e-9);
        let t = (1.0f64 / 3.0).sqrt().acos();
        let b = dipolar_coupling([5.0 * t.sin(), 0.0, 5.0 * t.cos()], [0.0, 0.0, 1.0]).unwrap();
        assert!(b.abs() < 1e-9);
    }

    #[test]
    fn rejects_coincident_positions() {
        assert!(dipolar_coupling([0.05, 0.0, 0.0], [0.0, 0.0, 1.0]).is_err());
        assert!(dipolar_coupling([1.0, 0.0, 0.0], [0.0, 0.0, 0.0]).is_err());
    }
}
