//! Surface-spin Rabi oscillation read out through DEER on one strongly coupled
//! spin with the exact quantum engine, then fitted with a damped cosine.

use spinbath::analysis::fit_damped_rabi;
use spinbath::engines::{sweep, EngineConfig, EngineKind};
use spinbath::model::{surface_spin_larmor, NvParams, SpinBathSample, SurfaceSpinParams};
use spinbath::pulses::{build_deer, PulseCalibration};

fn main() -> spinbath::error::Result<()> {
    let nv = NvParams::with_field(382.0);
    let ss = SurfaceSpinParams {
        t2_rabi: 0.2,
        ..Default::default()
    };
    let cal = PulseCalibration::resonant(&nv, 13.7)?;
    let bath = SpinBathSample::from_couplings(vec![50.0], nv.depth)?;
    let f_ss = surface_spin_larmor(nv.bz, ss.gamma_ss)?;
    let cfg = EngineConfig {
        kind: EngineKind::Quantum,
        ..Default::default()
    };
    let times: Vec<f64> = (0..60).map(|i| 0.01 + 0.01 * i as f64).collect();
    let trace = sweep("t_ss_us", &times, |t| build_deer(10.0, f_ss, t, 13.7, &cal), &nv, &bath, &ss, &cfg, "deer-rabi")?;
    let fit = fit_damped_rabi(&trace, false)?;
    print!("{}", fit.report());
    Ok(())
}
