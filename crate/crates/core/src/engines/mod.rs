//! Coherence engines: exact quantum, Monte-Carlo semiclassical and closed-form analytic.

mod analytic;
mod config;
mod quantum;
pub mod semiclassical;
mod trace;

pub use analytic::{flip_probability, flip_probability_damped, hahn_echo_ou_analytic, ou_chi, run_analytic};
pub use config::{BathModel, EngineConfig, EngineKind, NoiseChannels};
pub use quantum::{run_quantum, MAX_QUANTUM_SPINS};
pub use semiclassical::{run_semiclassical, semiclassical_phases, Ou};
pub use trace::{CoherencePoint, CoherenceTrace};

use crate::error::Result;
use crate::model::{NvParams, SpinBathSample, SurfaceSpinParams};
use crate::pulses::PulseSequence;

/// Runs the engine selected in `cfg` for one sequence.
pub fn run_engine(
    seq: &PulseSequence,
    nv: &NvParams,
    bath: &SpinBathSample,
    ss: &SurfaceSpinParams,
    cfg: &EngineConfig,
) -> Result<CoherencePoint> {
    match cfg.kind {
        EngineKind::Quantum => run_quantum(seq, nv, bath, ss, cfg),
        EngineKind::Semiclassical => run_semiclassical(seq, nv, bath, ss, cfg),
        EngineKind::Analytic => run_analytic(seq, bath, ss, cfg),
    }
}

/// Evaluates `build(x)` at every axis value with a shared seed.
pub fn sweep<F>(
    axis_name: &str,
    axis: &[f64],
    build: F,
    nv: &NvParams,
    bath: &SpinBathSample,
    ss: &SurfaceSpinParams,
    cfg: &EngineConfig,
    descriptor: &str,
) -> Result<CoherenceTrace>
where
    F: Fn(f64) -> Result<PulseSequence>,
{
    let points = axis
        .iter()
        .map(|&x| run_engine(&build(x)?, nv, bath, ss, cfg))
        .collect::<Result<Vec<_>>>()?;
    CoherenceTrace::new(
        axis_name,
        axis.to_vec(),
        points,
        cfg.kind,
        cfg.seed,
        cfg.n_trajectories,
        descriptor,
    )
}
