use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use super::dipolar::dipolar_coupling;
use crate::error::{invalid, Result};

/// Angle between the NV axis and a (001) surface normal, `acos(1/sqrt(3))`.
pub const MAGIC_ANGLE: f64 = 0.955_316_618_124_509_3;

/// NV axis tilted from the surface normal by the tetrahedral angle, in the xz-plane.
pub fn default_nv_axis() -> [f64; 3] {
    [MAGIC_ANGLE.sin(), 0.0, MAGIC_ANGLE.cos()]
}

/// Surface spins on the plane `z = 0` above an NV at `(0, 0, -depth)`.
/// Couplings are in kHz and always recomputable from the positions.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinBathSample {
    pub positions: Vec<[f64; 2]>,
    pub depth: f64,
    pub axis: [f64; 3],
    pub couplings: Vec<f64>,
    pub seed: Option<u64>,
}

impl SpinBathSample {
    pub fn from_positions(positions: Vec<[f64; 2]>, depth: f64, axis: [f64; 3]) -> Result<Self> {
        if !(depth > 0.0) || !depth.is_finite() {
            return invalid(format!("depth must be positive, got {depth}"));
        }
        let couplings = positions
            .iter()
            .map(|p| dipolar_coupling([p[0], p[1], depth], axis))
            .collect::<Result<Vec<_>>>()?;
        Ok(SpinBathSample {
            positions,
            depth,
            axis,
            couplings,
            seed: None,
        })
    }

    /// Bath given directly by couplings in kHz; positions are not tracked.
    pub fn from_couplings(couplings: Vec<f64>, depth: f64) -> Result<Self> {
        if couplings.iter().any(|b| !b.is_finite()) {
            return invalid("couplings must be finite");
        }
        Ok(SpinBathSample {
            positions: Vec::new(),
            depth,
            axis: default_nv_axis(),
            couplings,
            seed: None,
        })
    }

    pub fn empty(depth: f64) -> Self {
        SpinBathSample {
            positions: Vec::new(),
            depth,
            axis: default_nv_axis(),
            couplings: Vec::new(),
            seed: None,
        }
    }

    pub fn len(&self) -> usize {
        self.couplings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.couplings.is_empty()
    }

    /// Sum of squared couplings in kHz^2.
    pub fn coupling_sum_sq(&self) -> f64 {
        self.couplings.iter().map(|b| b * b).sum()
    }

    /// RMS of the bath frequency noise `sum_i b_i s_i` seen by the NV, in MHz.
    pub fn field_rms(&self) -> f64 {
        0.5 * self.coupling_sum_sq().sqrt() * 1e-3
    }

    pub fn recomputed_couplings(&self) -> Result<Vec<f64>> {
        self.positions
            .iter()
            .map(|p| dipolar_coupling([p[0], p[1], self.depth], self.axis))
            .collect()
    }

    /// Keeps the `n` most strongly coupled spins.
    pub fn strongest(&self, n: usize) -> SpinBathSample {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|&a, &b| self.couplings[b].abs().total_cmp(&self.couplings[a].abs()));
        idx.truncate(n);
        idx.sort_unstable();
        SpinBathSample {
            positions: idx.iter().filter_map(|&i| self.positions.get(i).copied()).collect(),
            depth: self.depth,
            axis: self.axis,
            couplings: idx.iter().map(|&i| self.couplings[i]).collect(),
            seed: self.seed,
        }
    }
}

/// Poisson sample of surface spins in a square of side `extent` nm centred above the NV.
pub fn sample_bath(
    density: f64,
    depth: f64,
    extent: f64,
    axis: [f64; 3],
    seed: u64,
) -> Result<SpinBathSample> {
    if !(density >= 0.0) || !density.is_finite() {
        return invalid(format!("density must be non-negative, got {density}"));
    }
    if !(depth > 0.0) || !depth.is_finite() {
        return invalid(format!("depth must be positive, got {depth}"));
    }
    if !(extent >= 10.0 * depth) || !extent.is_finite() {
        return invalid(format!(
            "extent {extent} nm truncates the bath; need at least 10 x depth = {} nm",
            10.0 * depth
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mean = density * extent * extent;
    let n = if mean > 0.0 {
        Poisson::new(mean)
            .map_err(|e| crate::Error::InvalidInput(e.to_string()))?
            .sample(&mut rng) as usize
    } else {
        0
    };
    let half = extent / 2.0;
    let mut positions = Vec::with_capacity(n);
    while positions.len() < n {
        let p = [rng.random_range(-half..half), rng.random_range(-half..half)];
        // a spin exactly above the NV closer than the cutoff is physically excluded
        if (p[0] * p[0] + p[1] * p[1] + depth * depth).sqrt() >= super::MIN_DISTANCE_NM {
            positions.push(p);
        }
    }
    let mut s = SpinBathSample::from_positions(positions, depth, axis)?;
    s.seed = Some(seed);
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible_for_seed() {
        let a = sample_bath(0.04, 7.5, 100.0, default_nv_axis(), 3).unwrap();
        let b = sample_bath(0.04, 7.5, 100.0, default_nv_axis(), 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.recomputed_couplings().unwrap(), a.couplings);
    }

    #[test]
    fn rejects_truncating_extent() {
        assert!(sample_bath(0.04, 10.0, 90.0, default_nv_axis(), 1).is_err());
        assert!(sample_bath(-1.0, 10.0, 100.0, default_nv_axis(), 1).is_err());
    }

    #[test]
    fn zero_density_is_empty() {
        assert!(sample_bath(0.0, 5.0, 50.0, default_nv_axis(), 1).unwrap().is_empty());
    }

    #[test]
    fn strongest_keeps_largest() {
        let s = sample_bath(0.04, 5.0, 50.0, default_nv_axis(), 9).unwrap();
        let top = s.strongest(3);
        let mut all: Vec<f64> = s.couplings.iter().map(|b| b.abs()).collect();
        all.sort_by(|a, b| b.total_cmp(a));
        let mut got: Vec<f64> = top.couplings.iter().map(|b| b.abs()).collect();
        got.sort_by(|a, b| b.total_cmp(a));
        assert_eq!(got, all[..3].to_vec());
    }
}
