use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use toml::Value;

use crate::engines::{BathModel, EngineConfig, EngineKind};
use crate::error::{Error, Result};
use crate::model::{NvParams, SurfaceSpinParams};
use crate::pulses::{Basis, DecouplingKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    DeerSpectrum,
    DeerRabi,
    HahnT2,
    DriveResonance,
    DepthScan,
    Sensitivity,
    Stark,
    Density,
    RatioTest,
}

impl Experiment {
    pub const ALL: [Experiment; 9] = [
        Experiment::DeerSpectrum,
        Experiment::DeerRabi,
        Experiment::HahnT2,
        Experiment::DriveResonance,
        Experiment::DepthScan,
        Experiment::Sensitivity,
        Experiment::Stark,
        Experiment::Density,
        Experiment::RatioTest,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::DeerSpectrum => "deer-spectrum",
            Experiment::DeerRabi => "deer-rabi",
            Experiment::HahnT2 => "hahn-t2",
            Experiment::DriveResonance => "drive-resonance",
            Experiment::DepthScan => "depth-scan",
            Experiment::Sensitivity => "sensitivity",
            Experiment::Stark => "stark",
            Experiment::Density => "density",
            Experiment::RatioTest => "ratio-test",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

/// Sweep axis; `start`/`stop` left unset take experiment-specific defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub points: usize,
    pub spacing: Option<Spacing>,
    /// Widen a decay sweep until it spans >0.85 to <0.25.
    pub auto_extend: bool,
}

impl SweepSpec {
    pub fn values(&self, start: f64, stop: f64, spacing: Spacing) -> Result<Vec<f64>> {
        let n = self.points;
        if n < 2 {
            return Err(Error::Config(format!("sweep.points must be at least 2, got {n}")));
        }
        if !(stop > start) {
            return Err(Error::Config(format!(
                "sweep.stop ({stop}) must exceed sweep.start ({start})"
            )));
        }
        let frac = |i: usize| i as f64 / (n - 1) as f64;
        match spacing {
            Spacing::Linear => Ok((0..n).map(|i| start + (stop - start) * frac(i)).collect()),
            Spacing::Log => {
                if !(start > 0.0) {
                    return Err(Error::Config("log sweep needs sweep.start > 0".into()));
                }
                let r = (stop / start).ln();
                Ok((0..n).map(|i| start * (r * frac(i)).exp()).collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BathSpec {
    /// Sampling square side as a multiple of depth.
    pub extent_factor: f64,
    /// Defaults to the run seed.
    pub seed: Option<u64>,
    pub max_spins: Option<usize>,
    /// Explicit couplings in kHz instead of a sampled bath.
    pub couplings_khz: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceSpec {
    pub kind: DecouplingKind,
    pub bases: Vec<Basis>,
    /// Half of the total free evolution, µs.
    pub tau: f64,
    pub nv_rabi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriveSpec {
    /// Surface-spin Rabi frequencies, MHz; 0 means undriven.
    pub rabi: Vec<f64>,
    /// Carrier, MHz; defaults to the surface-spin Larmor frequency.
    pub f_ss: Option<f64>,
    /// Surface-spin pulse length for DEER, µs.
    pub t_ss: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivitySpec {
    pub labels: Vec<String>,
    pub t2: Vec<f64>,
    pub n: Vec<f64>,
    pub bases: Vec<Basis>,
    pub t_max: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StarkSpec {
    pub omega_ss: f64,
    pub delta_m1: f64,
    pub delta_p1: f64,
    pub omega: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensitySpec {
    pub gammas: Option<Vec<f64>>,
    pub mean: Option<f64>,
    pub std: Option<f64>,
    pub mean_depth: f64,
    pub delta_f_rms: f64,
    pub shells: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioSpec {
    pub t2_sq: Option<f64>,
    pub t2_dq: Option<f64>,
    pub n: Option<f64>,
    pub tolerance: f64,
    pub simulate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitSpec {
    pub stark_correction: bool,
    pub full_cosine: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub nv: NvParams,
    pub ss: SurfaceSpinParams,
    pub bath: BathSpec,
    pub engine: EngineConfig,
    pub sequence: SequenceSpec,
    pub drive: DriveSpec,
    pub sweep: SweepSpec,
    pub depths: Vec<f64>,
    pub fit: FitSpec,
    pub sensitivity: SensitivitySpec,
    pub stark: StarkSpec,
    pub density: DensitySpec,
    pub ratio: RatioSpec,
}

impl ExperimentConfig {
    /// Defaults for every key; bath parameters come from [`SurfaceSpinParams::default`].
    pub fn new(experiment: Experiment) -> Self {
        ExperimentConfig {
            experiment,
            seed: 1,
            output: None,
            nv: NvParams::default(),
            ss: SurfaceSpinParams::default(),
            bath: BathSpec {
                extent_factor: 10.0,
                seed: None,
                max_spins: None,
                couplings_khz: None,
            },
            engine: EngineConfig::default(),
            sequence: SequenceSpec {
                kind: DecouplingKind::Hahn,
                bases: vec![Basis::Sq],
                tau: 10.0,
                nv_rabi: 13.7,
            },
            drive: DriveSpec {
                rabi: vec![0.0],
                f_ss: None,
                t_ss: 0.108,
            },
            sweep: SweepSpec {
                start: None,
                stop: None,
                points: 24,
                spacing: None,
                auto_extend: true,
            },
            depths: vec![4.0, 5.5, 7.5, 9.0, 10.5, 12.0, 14.5, 17.0],
            fit: FitSpec {
                stark_correction: false,
                full_cosine: false,
            },
            sensitivity: SensitivitySpec {
                labels: Vec::new(),
                t2: Vec::new(),
                n: Vec::new(),
                bases: Vec::new(),
                t_max: 300.0,
                points: 300,
            },
            stark: StarkSpec {
                omega_ss: 13.7,
                delta_m1: 1292.0,
                delta_p1: 2866.0,
                omega: 790.0,
            },
            density: DensitySpec {
                gammas: None,
                mean: None,
                std: None,
                mean_depth: 10.0,
                delta_f_rms: 5.0,
                shells: 1,
            },
            ratio: RatioSpec {
                t2_sq: None,
                t2_dq: None,
                n: None,
                tolerance: crate::analysis::DEFAULT_RATIO_TOLERANCE,
                simulate: false,
            },
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let table: toml::Table =
            toml::from_str(text).map_err(|e| Error::Config(format!("parse error: {e}")))?;
        let mut flat = Vec::new();
        flatten("", &table, &mut flat);
        let experiment = match flat.iter().find(|(k, _)| k == "experiment") {
            Some((_, v)) => as_str("experiment", v)?.parse()?,
            None => return Err(Error::Config("missing key `experiment`".into())),
        };
        let mut cfg = ExperimentConfig::new(experiment);
        for (key, value) in &flat {
            cfg.apply(key, value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn apply(&mut self, key: &str, v: &Value) -> Result<()> {
        let f = || as_f64(key, v);
        match key {
            "experiment" => {}
            "seed" => self.seed = as_u64(key, v)?,
            "output" => self.output = Some(PathBuf::from(as_str(key, v)?)),

            "nv.d" => self.nv.d = f()?,
            "nv.gamma" => self.nv.gamma = f()?,
            "nv.d_par" => self.nv.d_par = f()?,
            "nv.d_perp" => self.nv.d_perp = f()?,
            "nv.Bz" | "nv.bz" => self.nv.bz = f()?,
            "nv.pi_par" => self.nv.pi_par = f()?,
            "nv.pi_perp" => self.nv.pi_perp = f()?,
            "nv.depth" => self.nv.depth = f()?,

            "ss.gamma_ss" => self.ss.gamma_ss = f()?,
            "ss.t2_rabi" => self.ss.t2_rabi = f()?,
            "ss.tau_c" => self.ss.tau_c = f()?,
            "ss.density" => self.ss.density = f()?,

            "bath.extent_factor" => self.bath.extent_factor = f()?,
            "bath.seed" => self.bath.seed = Some(as_u64(key, v)?),
            "bath.max_spins" => self.bath.max_spins = Some(as_u64(key, v)? as usize),
            "bath.couplings_khz" => self.bath.couplings_khz = Some(as_f64_list(key, v)?),
            "bath.model" => self.engine.bath_model = as_str(key, v)?.parse::<BathModel>()?,

            "engine.kind" => self.engine.kind = as_str(key, v)?.parse::<EngineKind>()?,
            "engine.n_trajectories" => self.engine.n_trajectories = as_u64(key, v)? as usize,
            "engine.contrast" => self.engine.contrast = f()?,

            "noise.magnetic_rms" => self.engine.noise.magnetic.rms = f()? * 1e-3,
            "noise.magnetic_tau_c" => self.engine.noise.magnetic.tau_c = f()?,
            "noise.common_mode_rms" => self.engine.noise.common_mode.rms = f()? * 1e-3,
            "noise.common_mode_tau_c" => self.engine.noise.common_mode.tau_c = f()?,
            "noise.transverse_rms" => self.engine.noise.transverse.rms = f()? * 1e-3,
            "noise.transverse_tau_c" => self.engine.noise.transverse.tau_c = f()?,

            "sequence.kind" => self.sequence.kind = parse_kind(key, as_str(key, v)?)?,
            "sequence.pulses" => {
                let n = as_u64(key, v)? as usize;
                self.sequence.kind = match self.sequence.kind {
                    DecouplingKind::Cpmg(_) => DecouplingKind::Cpmg(n),
                    k => {
                        if n != pulses_of(k) {
                            return Err(Error::Config(format!(
                                "`{key}` = {n} conflicts with sequence.kind"
                            )));
                        }
                        k
                    }
                };
            }
            "sequence.basis" => {
                self.sequence.bases = as_str_list(key, v)?
                    .iter()
                    .map(|s| s.parse::<Basis>().map_err(|_| bad(key, s)))
                    .collect::<Result<_>>()?
            }
            "sequence.tau" => self.sequence.tau = f()?,
            "sequence.nv_rabi" => self.sequence.nv_rabi = f()?,

            "drive.rabi" => self.drive.rabi = as_f64_list(key, v)?,
            "drive.f_ss" => self.drive.f_ss = Some(f()?),
            "drive.t_ss" => self.drive.t_ss = f()?,

            "sweep.start" => self.sweep.start = Some(f()?),
            "sweep.stop" => self.sweep.stop = Some(f()?),
            "sweep.points" => self.sweep.points = as_u64(key, v)? as usize,
            "sweep.spacing" => {
                self.sweep.spacing = Some(match as_str(key, v)? {
                    "linear" => Spacing::Linear,
                    "log" => Spacing::Log,
                    s => return Err(bad(key, s)),
                })
            }
            "sweep.auto_extend" => self.sweep.auto_extend = as_bool(key, v)?,

            "depth_scan.depths" => self.depths = as_f64_list(key, v)?,

            "fit.stark_correction" => self.fit.stark_correction = as_bool(key, v)?,
            "fit.full_cosine" => self.fit.full_cosine = as_bool(key, v)?,

            "sensitivity.labels" => self.sensitivity.labels = as_str_list(key, v)?,
            "sensitivity.t2" => self.sensitivity.t2 = as_f64_list(key, v)?,
            "sensitivity.n" => self.sensitivity.n = as_f64_list(key, v)?,
            "sensitivity.basis" => {
                self.sensitivity.bases = as_str_list(key, v)?
                    .iter()
                    .map(|s| s.parse::<Basis>().map_err(|_| bad(key, s)))
                    .collect::<Result<_>>()?
            }
            "sensitivity.t_max" => self.sensitivity.t_max = f()?,
            "sensitivity.points" => self.sensitivity.points = as_u64(key, v)? as usize,

            "stark.omega_ss" => self.stark.omega_ss = f()?,
            "stark.delta_m1" => self.stark.delta_m1 = f()?,
            "stark.delta_p1" => self.stark.delta_p1 = f()?,
            "stark.omega" => self.stark.omega = f()?,

            "density.gammas" => self.density.gammas = Some(as_f64_list(key, v)?),
            "density.mean" => self.density.mean = Some(f()?),
            "density.std" => self.density.std = Some(f()?),
            "density.mean_depth" => self.density.mean_depth = f()?,
            "density.delta_f_rms" => self.density.delta_f_rms = f()?,
            "density.shells" => self.density.shells = as_u64(key, v)? as usize,

            "ratio.t2_sq" => self.ratio.t2_sq = Some(f()?),
            "ratio.t2_dq" => self.ratio.t2_dq = Some(f()?),
            "ratio.n" => self.ratio.n = Some(f()?),
            "ratio.tolerance" => self.ratio.tolerance = f()?,
            "ratio.simulate" => self.ratio.simulate = as_bool(key, v)?,

            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let cfg_err = |e: Error| Error::Config(e.to_string());
        self.nv.validate().map_err(cfg_err)?;
        self.ss.validate().map_err(cfg_err)?;
        self.engine.validate().map_err(cfg_err)?;
        if self.sweep.points < 2 {
            return Err(Error::Config(format!(
                "`sweep.points` must be at least 2, got {}",
                self.sweep.points
            )));
        }
        if self.sequence.bases.is_empty() {
            return Err(Error::Config("`sequence.basis` is empty".into()));
        }
        if self.drive.rabi.is_empty() || self.drive.rabi.iter().any(|r| !(*r >= 0.0)) {
            return Err(Error::Config("`drive.rabi` needs non-negative values".into()));
        }
        if !(self.bath.extent_factor >= 10.0) {
            return Err(Error::Config("`bath.extent_factor` must be at least 10".into()));
        }
        if !(self.sequence.nv_rabi > 0.0) {
            return Err(Error::Config("`sequence.nv_rabi` must be positive".into()));
        }
        let s = &self.sensitivity;
        if self.experiment == Experiment::Sensitivity {
            let n = s.t2.len();
            if n == 0 || s.n.len() != n || s.bases.len() != n || s.labels.len() != n {
                return Err(Error::Config(
                    "`sensitivity.labels`, `t2`, `n` and `basis` need equal non-zero lengths".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn bath_seed(&self) -> u64 {
        self.bath.seed.unwrap_or(self.seed)
    }

    /// Engine settings with the run seed applied.
    pub fn engine_config(&self) -> EngineConfig {
        EngineConfig {
            seed: self.seed,
            ..self.engine.clone()
        }
    }
}

fn pulses_of(k: DecouplingKind) -> usize {
    match k {
        DecouplingKind::Ramsey => 0,
        DecouplingKind::Hahn => 1,
        DecouplingKind::Cpmg(n) => n,
    }
}

fn parse_kind(key: &str, s: &str) -> Result<DecouplingKind> {
    match s {
        "ramsey" => Ok(DecouplingKind::Ramsey),
        "hahn" => Ok(DecouplingKind::Hahn),
        "cpmg" => Ok(DecouplingKind::Cpmg(8)),
        _ => Err(bad(key, s)),
    }
}

fn flatten(prefix: &str, table: &toml::Table, out: &mut Vec<(String, Value)>) {
    for (k, v) in table {
        let key = if prefix.is_empty() {
            k.clone()
        } else {
            format!("{prefix}.{k}")
        };
        match v {
            Value::Table(t) => flatten(&key, t, out),
            _ => out.push((key, v.clone())),
        }
    }
}

fn bad(key: &str, v: &str) -> Error {
    Error::Config(format!("invalid value `{v}` for `{key}`"))
}

fn type_err(key: &str, want: &str) -> Error {
    Error::Config(format!("`{key}` must be {want}"))
}

fn as_f64(key: &str, v: &Value) -> Result<f64> {
    match v {
        Value::Float(x) => Ok(*x),
        Value::Integer(i) => Ok(*i as f64),
        _ => Err(type_err(key, "a number")),
    }
}

fn as_u64(key: &str, v: &Value) -> Result<u64> {
    match v {
        Value::Integer(i) if *i >= 0 => Ok(*i as u64),
        _ => Err(type_err(key, "a non-negative integer")),
    }
}

fn as_bool(key: &str, v: &Value) -> Result<bool> {
    v.as_bool().ok_or_else(|| type_err(key, "a boolean"))
}

fn as_str<'a>(key: &str, v: &'a Value) -> Result<&'a str> {
    v.as_str().ok_or_else(|| type_err(key, "a string"))
}

fn as_f64_list(key: &str, v: &Value) -> Result<Vec<f64>> {
    match v {
        Value::Array(a) => a.iter().map(|x| as_f64(key, x)).collect(),
        _ => Ok(vec![as_f64(key, v)?]),
    }
}

fn as_str_list(key: &str, v: &Value) -> Result<Vec<String>> {
    match v {
        Value::Array(a) => a.iter().map(|x| as_str(key, x).map(String::from)).collect(),
        _ => Ok(vec![as_str(key, v)?.to_string()]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_dotted_keys() {
        let cfg = ExperimentConfig::parse(
            "experiment = \"deer-spectrum\"\nnv.Bz = 382.0\n[ss]\ntau_c = 20\n[sequence]\nbasis = [\"sq\", \"dq\"]\n",
        )
        .unwrap();
        assert_eq!(cfg.experiment, Experiment::DeerSpectrum);
        assert_eq!(cfg.nv.bz, 382.0);
        assert_eq!(cfg.ss.tau_c, 20.0);
        assert_eq!(cfg.sequence.bases, vec![Basis::Sq, Basis::Dq]);
    }

    #[test]
    fn unknown_key_is_named() {
        let err = ExperimentConfig::parse("experiment = \"hahn-t2\"\nss.taoc = 5\n").unwrap_err();
        assert!(matches!(&err, Error::Config(m) if m.contains("ss.taoc")), "{err}");
    }

    #[test]
    fn noise_amplitudes_in_khz() {
        let cfg = ExperimentConfig::parse(
            "experiment = \"hahn-t2\"\nnoise.magnetic_rms = 4.2\nnoise.magnetic_tau_c = 100\n",
        )
        .unwrap();
        assert!((cfg.engine.noise.magnetic.rms - 0.0042).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(ExperimentConfig::parse("experiment = \"nope\"").is_err());
        assert!(ExperimentConfig::parse("experiment = \"hahn-t2\"\nsweep.points = 1").is_err());
        assert!(ExperimentConfig::parse("experiment = \"hahn-t2\"\nnv.Bz = \"x\"").is_err());
        assert!(ExperimentConfig::parse("nv.Bz = 1.0").is_err());
    }

    #[test]
    fn cpmg_pulse_count() {
        let cfg = ExperimentConfig::parse(
            "experiment = \"hahn-t2\"\nsequence.kind = \"cpmg\"\nsequence.pulses = 4\n",
        )
        .unwrap();
        assert_eq!(cfg.sequence.kind, DecouplingKind::Cpmg(4));
    }
}
