//! DEER frequency sweep at 382 G: the surface-spin line sits at the g = 2
//! Larmor frequency and is located with a Lorentzian fit.

use spinbath::analysis::fit_lorentzian;
use spinbath::engines::{sweep, EngineConfig};
use spinbath::model::{default_nv_axis, sample_bath, surface_spin_larmor, NvParams, SurfaceSpinParams};
use spinbath::pulses::{build_deer, PulseCalibration};

fn main() -> spinbath::error::Result<()> {
    let nv = NvParams::with_field(382.0);
    let ss = SurfaceSpinParams::default();
    let cal = PulseCalibration::resonant(&nv, 13.7)?;
    let bath = sample_bath(ss.density, nv.depth, 10.0 * nv.depth, default_nv_axis(), 1)?;
    let larmor = surface_spin_larmor(nv.bz, ss.gamma_ss)?;
    let rabi = 1.0 / (2.0 * 0.108);
    let freqs: Vec<f64> = (0..36).map(|i| larmor - 70.0 + 140.0 * i as f64 / 35.0).collect();
    let cfg = EngineConfig {
        seed: 1,
        ..Default::default()
    };
    let trace = sweep("f_ss_mhz", &freqs, |f| build_deer(10.0, f, 0.108, rabi, &cal), &nv, &bath, &ss, &cfg, "deer")?;
    for (f, c) in trace.axis.iter().zip(&trace.coherence).step_by(5) {
        println!("{f:8.1} MHz  {c:.3}");
    }
    let fit = fit_lorentzian(&trace)?;
    println!("expected {larmor:.1} MHz, fitted {:.1} ± {:.1} MHz", fit.value("center"), fit.stderr("center"));
    Ok(())
}
