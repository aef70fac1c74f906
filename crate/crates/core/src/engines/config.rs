use std::fmt;
use std::str::FromStr;

use super::semiclassical::Ou;
use crate::error::{invalid, Error, Result};
use crate::pulses::DEFAULT_CONTRAST;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineKind {
    Quantum,
    Semiclassical,
    Analytic,
}

impl fmt::Display for EngineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EngineKind::Quantum => "quantum",
            EngineKind::Semiclassical => "semiclassical",
            EngineKind::Analytic => "analytic",
        })
    }
}

impl FromStr for EngineKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quantum" => Ok(EngineKind::Quantum),
            "semiclassical" => Ok(EngineKind::Semiclassical),
            "analytic" => Ok(EngineKind::Analytic),
            _ => Err(Error::Config(format!("unknown engine `{s}`"))),
        }
    }
}

/// How the semiclassical engine represents the surface-spin bath.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BathModel {
    /// Telegraph when the expected number of flip events is modest, Gaussian otherwise.
    Auto,
    /// Individual spins with exact telegraph switching.
    Telegraph,
    /// Aggregate Gaussian field with the same variance and correlation time.
    Gaussian,
}

impl FromStr for BathModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(BathModel::Auto),
            "telegraph" => Ok(BathModel::Telegraph),
            "gaussian" => Ok(BathModel::Gaussian),
            _ => Err(Error::Config(format!("unknown bath model `{s}`"))),
        }
    }
}

impl fmt::Display for BathModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BathModel::Auto => "auto",
            BathModel::Telegraph => "telegraph",
            BathModel::Gaussian => "gaussian",
        })
    }
}

/// Background noise besides the surface-spin bath. `magnetic` shifts the
/// `+-1` levels oppositely, `common_mode` shifts both equally (axial electric
/// and strain), `transverse` fluctuates the transverse electric coupling in MHz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseChannels {
    pub magnetic: Ou,
    pub common_mode: Ou,
    pub transverse: Ou,
}

impl NoiseChannels {
    pub fn none() -> Self {
        let off = Ou {
            rms: 0.0,
            tau_c: 1.0,
        };
        NoiseChannels {
            magnetic: off,
            common_mode: off,
            transverse: off,
        }
    }

    fn validate(&self) -> Result<()> {
        for (name, c) in [
            ("magnetic", self.magnetic),
            ("common_mode", self.common_mode),
            ("transverse", self.transverse),
        ] {
            if !(c.rms >= 0.0) || !c.rms.is_finite() {
                return invalid(format!("{name} noise rms must be non-negative"));
            }
            if !(c.tau_c > 0.0) {
                return invalid(format!("{name} noise correlation time must be positive"));
            }
        }
        Ok(())
    }
}

impl Default for NoiseChannels {
    fn default() -> Self {
        Self::none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EngineConfig {
    pub kind: EngineKind,
    pub n_trajectories: usize,
    pub seed: u64,
    pub bath_model: BathModel,
    pub noise: NoiseChannels,
    pub contrast: f64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            kind: EngineKind::Semiclassical,
            n_trajectories: 2000,
            seed: 0,
            bath_model: BathModel::Auto,
            noise: NoiseChannels::none(),
            contrast: DEFAULT_CONTRAST,
        }
    }
}

impl EngineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_trajectories == 0 {
            return invalid("n_trajectories must be at least 1");
        }
        if !(self.contrast > 0.0 && self.contrast <= 1.0) {
            return invalid(format!("contrast must lie in (0, 1], got {}", self.contrast));
        }
        self.noise.validate()
    }
}
