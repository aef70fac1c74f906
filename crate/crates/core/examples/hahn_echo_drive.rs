//! Hahn-echo decay of a 10 nm NV with and without a continuous drive on the
//! surface spins, simulated with the semiclassical engine and fitted to a
//! stretched exponential.

use spinbath::analysis::fit_stretched_exp;
use spinbath::engines::{sweep, EngineConfig};
use spinbath::model::{default_nv_axis, sample_bath, surface_spin_larmor, NvParams, SurfaceSpinParams};
use spinbath::pulses::{build_decoupling, with_continuous_drive, Basis, DecouplingKind, PulseCalibration};

fn main() -> spinbath::error::Result<()> {
    let nv = NvParams::with_field(281.0);
    let ss = SurfaceSpinParams::default();
    let cal = PulseCalibration::resonant(&nv, 13.7)?;
    let bath = sample_bath(ss.density, nv.depth, 10.0 * nv.depth, default_nv_axis(), 1)?;
    let f_ss = surface_spin_larmor(nv.bz, ss.gamma_ss)?;
    let cfg = EngineConfig {
        seed: 1,
        ..Default::default()
    };

    for rabi in [0.0f64, 2.0, 5.0] {
        let span = 400.0 * (1.0 + rabi * rabi);
        let grid: Vec<f64> = (0..24).map(|i| 2.0 * span.powf(i as f64 / 23.0)).collect();
        let trace = sweep(
            "two_tau_us",
            &grid,
            |two_tau| {
                let seq = build_decoupling(DecouplingKind::Hahn, Basis::Sq, two_tau / 2.0, &cal)?;
                if rabi > 0.0 {
                    with_continuous_drive(&seq, f_ss, rabi)
                } else {
                    Ok(seq)
                }
            },
            &nv,
            &bath,
            &ss,
            &cfg,
            "hahn",
        )?;
        let fit = fit_stretched_exp(&trace)?;
        println!(
            "drive {rabi:4.1} MHz: T2 = {:8.1} ± {:.1} us, n = {:.2}",
            fit.value("T2"),
            fit.stderr("T2"),
            fit.value("n")
        );
    }
    Ok(())
}
