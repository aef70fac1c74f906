use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::model::MAGIC_ANGLE;

/// Dipolar second-moment prefactor, MHz·nm³.
pub const SECOND_MOMENT_PREFACTOR: f64 = 39.0;
/// Prefactor of the density upper bound, MHz at 1 nm⁻².
pub const UPPER_BOUND_PREFACTOR: f64 = 125.0;

/// `Γ_decoupled = 1/T2 - 1/T2,drive` in ms⁻¹ from µs inputs.
pub fn decoupled_rate(t2: f64, t2_drive: f64) -> Result<f64> {
    if !(t2 > 0.0 && t2_drive > 0.0) {
        return invalid("decoupled rate needs positive T2 values");
    }
    Ok(1000.0 * (1.0 / t2 - 1.0 / t2_drive))
}

/// Rms dipolar linewidth of a square surface lattice, MHz.
///
/// Sums the first `shells` neighbor distances; `tilt` is the angle between the
/// quantization axis and the surface normal, in the plane of one lattice vector.
pub fn second_moment(density: f64, shells: usize, tilt: f64) -> Result<f64> {
    if !(density > 0.0) || shells == 0 {
        return invalid("second moment needs density > 0 and at least one shell");
    }
    let a = density.powf(-0.5);
    let axis = [tilt.sin(), 0.0, tilt.cos()];
    let reach = shells as i64 + 1;
    let mut r2: Vec<i64> = Vec::new();
    for i in -reach..=reach {
        for j in -reach..=reach {
            if i != 0 || j != 0 {
                r2.push(i * i + j * j);
            }
        }
    }
    r2.sort_unstable();
    r2.dedup();
    let cutoff = r2[shells - 1];
    let mut sum = 0.0;
    for i in -reach..=reach {
        for j in -reach..=reach {
            let d2 = i * i + j * j;
            if d2 == 0 || d2 > cutoff {
                continue;
            }
            let r = (d2 as f64).sqrt();
            let cos = (i as f64 * axis[0] + j as f64 * axis[1]) / r;
            let ang = 1.0 - 3.0 * cos * cos;
            sum += ang * ang / (r * a).powi(6);
        }
    }
    Ok(SECOND_MOMENT_PREFACTOR * sum.sqrt())
}

/// Nearest-neighbor second moment at the magic tilt.
pub fn second_moment_default(density: f64) -> Result<f64> {
    second_moment(density, 1, MAGIC_ANGLE)
}

/// Upper bound `σ = (Δf_rms/125)^{2/3}` in nm⁻².
pub fn density_upper_bound(delta_f_rms: f64) -> Result<f64> {
    if !(delta_f_rms > 0.0) {
        return invalid("linewidth must be positive");
    }
    Ok((delta_f_rms / UPPER_BOUND_PREFACTOR).powf(2.0 / 3.0))
}

/// Inverse of [`density_upper_bound`]: `Δf_rms = 125·σ^{3/2}`.
pub fn linewidth_rms_from_density(density: f64) -> f64 {
    UPPER_BOUND_PREFACTOR * density.powf(1.5)
}

/// FWHM taken as twice the rms linewidth.
pub fn linewidth_fwhm_from_density(density: f64) -> f64 {
    2.0 * linewidth_rms_from_density(density)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityEstimate {
    pub mean: f64,
    pub std: f64,
    /// std/mean.
    pub ratio: f64,
    /// Effective number of spins, `1/ratio²`.
    pub n_spins: f64,
    /// nm⁻².
    pub density: f64,
}

/// Lower bound from the spread of decoupled rates over several NVs.
pub fn density_lower_bound(gammas: &[f64], mean_depth: f64) -> Result<DensityEstimate> {
    if gammas.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "density estimate needs at least 3 rates, got {}",
            gammas.len()
        )));
    }
    let n = gammas.len() as f64;
    let mean = gammas.iter().sum::<f64>() / n;
    let var = gammas.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / (n - 1.0);
    density_from_stats(mean, var.sqrt(), mean_depth)
}

/// Same estimator from a precomputed mean and standard deviation.
pub fn density_from_stats(mean: f64, std: f64, mean_depth: f64) -> Result<DensityEstimate> {
    if !(mean_depth > 0.0) {
        return invalid("mean depth must be positive");
    }
    if mean == 0.0 || !mean.is_finite() {
        return invalid("decoupled rates have zero mean");
    }
    let ratio = std / mean;
    if ratio == 0.0 {
        return Err(Error::Unbounded(
            "rates have zero spread, effective spin number is infinite".into(),
        ));
    }
    let n_spins = 1.0 / (ratio * ratio);
    Ok(DensityEstimate {
        mean,
        std,
        ratio,
        n_spins,
        density: n_spins / (PI * mean_depth * mean_depth),
    })
}
