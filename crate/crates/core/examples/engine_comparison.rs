//! The three engines on one problem: a static three-spin bath under Hahn echo
//! (quantum vs semiclassical) and a dense bath against the closed-form
//! Ornstein-Uhlenbeck echo (semiclassical vs analytic).

use spinbath::engines::{hahn_echo_ou_analytic, run_quantum, run_semiclassical, EngineConfig, EngineKind};
use spinbath::model::{NvParams, SpinBathSample, SurfaceSpinParams};
use spinbath::pulses::{build_decoupling, Basis, DecouplingKind, PulseCalibration};

fn main() -> spinbath::error::Result<()> {
    let nv = NvParams::with_field(382.0);
    let cal = PulseCalibration::resonant(&nv, 100.0)?;
    let frozen = SurfaceSpinParams {
        tau_c: f64::INFINITY,
        ..Default::default()
    };
    let bath = SpinBathSample::from_couplings(vec![35.0, -20.0, 12.0], 10.0)?;
    let quantum = EngineConfig {
        kind: EngineKind::Quantum,
        ..Default::default()
    };
    let mc = EngineConfig {
        n_trajectories: 20000,
        seed: 3,
        ..Default::default()
    };
    println!("Ramsey, static 3-spin bath");
    for two_tau in [4.0, 12.0, 20.0, 28.0] {
        let seq = build_decoupling(DecouplingKind::Ramsey, Basis::Sq, two_tau / 2.0, &cal)?;
        let q = run_quantum(&seq, &nv, &bath, &frozen, &quantum)?;
        let s = run_semiclassical(&seq, &nv, &bath, &frozen, &mc)?;
        println!("  2tau {two_tau:5.1}: quantum {:.4}  semiclassical {:.4} ± {:.4}", q.coherence, s.coherence, s.stderr);
    }

    let ss = SurfaceSpinParams::default();
    let n = 400;
    let dense = SpinBathSample::from_couplings(vec![60.0 / (n as f64).sqrt(); n], 10.0)?;
    println!("Hahn echo, 30 kHz rms bath, tau_c = {} us", ss.tau_c);
    for two_tau in [10.0, 40.0, 100.0, 200.0] {
        let seq = build_decoupling(DecouplingKind::Hahn, Basis::Sq, two_tau / 2.0, &cal)?;
        let s = run_semiclassical(&seq, &nv, &dense, &ss, &mc)?;
        let exact = hahn_echo_ou_analytic(30.0, ss.tau_c, two_tau / 2.0, 1.0)?;
        println!("  2tau {two_tau:5.1}: semiclassical {:.4} ± {:.4}  analytic {exact:.4}", s.coherence, s.stderr);
    }
    Ok(())
}
