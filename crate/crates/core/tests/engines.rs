use std::f64::consts::PI;

use spinbath::engines::{
    flip_probability_damped, hahn_echo_ou_analytic, run_analytic, run_quantum, run_semiclassical,
    semiclassical_phases, BathModel, EngineConfig, EngineKind, Ou,
};
use spinbath::model::{sample_bath, default_nv_axis, surface_spin_larmor, NvParams, SpinBathSample, SurfaceSpinParams};
use spinbath::pulses::{build_decoupling, build_deer, Basis, DecouplingKind, PulseCalibration};

fn setup(bz: f64, nv_rabi: f64) -> (NvParams, PulseCalibration) {
    let nv = NvParams::with_field(bz);
    let cal = PulseCalibration::resonant(&nv, nv_rabi).unwrap();
    (nv, cal)
}

fn static_ss() -> SurfaceSpinParams {
    SurfaceSpinParams {
        tau_c: f64::INFINITY,
        ..Default::default()
    }
}

fn quantum() -> EngineConfig {
    EngineConfig {
        kind: EngineKind::Quantum,
        ..Default::default()
    }
}

#[test]
fn quantum_empty_bath_echo_is_one() {
    let (nv, cal) = setup(382.0, 13.7);
    let seq = build_decoupling(DecouplingKind::Hahn, Basis::Sq, 10.0, &cal).unwrap();
    let c = run_quantum(&seq, &nv, &SpinBathSample::empty(10.0), &static_ss(), &quantum()).unwrap();
    assert!((c.coherence - 1.0).abs() < 1e-6);
}

#[test]
fn quantum_single_spin_deer_phase() {
    // bath orientations give phases ±2π·b·τ, so C = cos(2π·b·τ) up to the pulse offset
    let (nv, cal) = setup(382.0, 100.0);
    let ss = SurfaceSpinParams {
        t2_rabi: 1e9,
        ..static_ss()
    };
    let f = surface_spin_larmor(382.0, ss.gamma_ss).unwrap();
    let ss_rabi = 50.0;
    let t_ss = 1.0 / (2.0 * ss_rabi);
    for (b_khz, expect) in [(100.0, 1.0), (50.0, -1.0), (25.0, 0.0)] {
        let bath = SpinBathSample::from_couplings(vec![b_khz], 10.0).unwrap();
        let seq = build_deer(10.0, f, t_ss, ss_rabi, &cal).unwrap();
        let c = run_quantum(&seq, &nv, &bath, &ss, &quantum()).unwrap().coherence;
        // brute force over both bath states, flip at the pulse centre
        let flip_at = seq.ss_pulses().next().unwrap();
        let mid = flip_at.start + flip_at.duration / 2.0 - seq.pulses[1].end();
        let b = b_khz * 1e-3;
        let oracle: f64 = [0.5, -0.5]
            .iter()
            .map(|s| (2.0 * PI * b * s * 2.0 * (10.0 - mid)).cos())
            .sum::<f64>()
            / 2.0;
        assert!((c - oracle).abs() < 5e-3, "b {b_khz}: {c} vs {oracle}");
        assert!((c - expect).abs() < 0.05, "b {b_khz}: {c}");
    }
}

#[test]
fn quantum_deer_sweep_follows_flip_probability() {
    let (nv, cal) = setup(382.0, 100.0);
    let ss = SurfaceSpinParams {
        t2_rabi: 0.2,
        ..static_ss()
    };
    let f0 = surface_spin_larmor(382.0, ss.gamma_ss).unwrap();
    // coupling with cos(2π·b·τ·...) = -1 for a flipped spin so C = 1 - 2p
    let bath = SpinBathSample::from_couplings(vec![50.0], 10.0).unwrap();
    let (rabi, t_ss) = (5.0, 0.1);
    let seq0 = build_deer(10.0, f0, t_ss, rabi, &cal).unwrap();
    let c_res = run_quantum(&seq0, &nv, &bath, &ss, &quantum()).unwrap().coherence;
    let p_res = flip_probability_damped(rabi, 0.0, t_ss, 0.2).unwrap();
    let scale = (1.0 - c_res) / (2.0 * p_res);
    for df in [-8.0, -3.0, 2.0, 6.0] {
        let seq = build_deer(10.0, f0 + df, t_ss, rabi, &cal).unwrap();
        let c = run_quantum(&seq, &nv, &bath, &ss, &quantum()).unwrap().coherence;
        let p = flip_probability_damped(rabi, -df, t_ss, 0.2).unwrap();
        assert!((c - (1.0 - 2.0 * scale * p)).abs() < 0.02, "df {df}: {c} vs p {p}");
    }
}

#[test]
fn quantum_rejects_large_bath_and_rwa_breakdown() {
    let (nv, cal) = setup(382.0, 13.7);
    let seq = build_decoupling(DecouplingKind::Hahn, Basis::Sq, 10.0, &cal).unwrap();
    let bath = SpinBathSample::from_couplings(vec![10.0; 9], 10.0).unwrap();
    assert!(run_quantum(&seq, &nv, &bath, &static_ss(), &quantum()).is_err());
    let f = surface_spin_larmor(382.0, 2.8025).unwrap();
    let deer = build_deer(10.0, f, 0.004, 125.0, &cal).unwrap();
    let one = SpinBathSample::from_couplings(vec![10.0], 10.0).unwrap();
    assert!(run_quantum(&deer, &nv, &one, &static_ss(), &quantum()).is_err());
}

#[test]
fn dq_magnetic_phase_is_exactly_doubled() {
    let (nv, cal) = setup(281.0, 13.7);
    let bath = sample_bath(0.04, 10.0, 100.0, default_nv_axis(), 5).unwrap();
    let ss = SurfaceSpinParams::default();
    for model in [BathModel::Telegraph, BathModel::Gaussian] {
        let mut cfg = EngineConfig {
            n_trajectories: 200,
            seed: 9,
            bath_model: model,
            ..Default::default()
        };
        cfg.noise.magnetic = Ou {
            rms: 0.004,
            tau_c: 30.0,
        };
        for kind in [DecouplingKind::Hahn, DecouplingKind::Cpmg(4)] {
            let sq = build_decoupling(kind, Basis::Sq, 12.0, &cal).unwrap();
            let dq = build_decoupling(kind, Basis::Dq, 12.0, &cal).unwrap();
            let a = semiclassical_phases(&sq, &nv, &bath, &ss, &cfg).unwrap();
            let b = semiclassical_phases(&dq, &nv, &bath, &ss, &cfg).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!(*y == 2.0 * x || *y == -2.0 * x, "{model} {kind:?}: {x} {y}");
            }
        }
    }
}

#[test]
fn semiclassical_matches_analytic_ou_echo() {
    // many weak spins: telegraph sum approaches Gaussian OU with the same rms
    let (nv, cal) = setup(281.0, 13.7);
    let ss = SurfaceSpinParams {
        tau_c: 50.0,
        ..Default::default()
    };
    let n = 400;
    let b_rms_khz = 30.0;
    let b_each = 2.0 * b_rms_khz / (n as f64).sqrt();
    let bath = SpinBathSample::from_couplings(vec![b_each; n], 10.0).unwrap();
    assert!((bath.field_rms() * 1e3 - b_rms_khz).abs() < 1e-9);
    let cfg = EngineConfig {
        n_trajectories: 4000,
        seed: 3,
        bath_model: BathModel::Telegraph,
        ..Default::default()
    };
    for two_tau in [1.0, 5.0, 10.0, 20.0, 35.0, 50.0, 75.0, 100.0, 150.0, 200.0] {
        let seq = build_decoupling(DecouplingKind::Hahn, Basis::Sq, two_tau / 2.0, &cal).unwrap();
        let sim = run_semiclassical(&seq, &nv, &bath, &ss, &cfg).unwrap();
        let exact = hahn_echo_ou_analytic(b_rms_khz, 50.0, two_tau / 2.0, 1.0).unwrap();
        let analytic = run_analytic(&seq, &bath, &ss, &cfg).unwrap().coherence;
        assert!((analytic - exact).abs() < 1e-12);
        let tol = 3.0 * sim.stderr;
        assert!((sim.coherence - exact).abs() < tol, "2tau {two_tau}: {} vs {exact} ± {}", sim.coherence, sim.stderr);
    }
}

#[test]
fn quantum_and_semiclassical_agree_on_static_baths() {
    // fast NV pulses so both engines share the short-pulse limit
    let (nv, cal) = setup(382.0, 100.0);
    let ss = static_ss();
    let cfg = EngineConfig {
        n_trajectories: 20000,
        seed: 11,
        ..Default::default()
    };
    for couplings in [vec![40.0], vec![35.0, -20.0, 12.0], vec![30.0, 25.0, -15.0, 8.0]] {
        let bath = SpinBathSample::from_couplings(couplings.clone(), 10.0).unwrap();
        for kind in [DecouplingKind::Ramsey, DecouplingKind::Hahn] {
            for two_tau in [2.0, 6.0, 10.0, 14.0, 18.0, 22.0, 26.0, 30.0, 34.0, 38.0] {
                let seq = build_decoupling(kind, Basis::Sq, two_tau / 2.0, &cal).unwrap();
                let q = run_quantum(&seq, &nv, &bath, &ss, &quantum()).unwrap().coherence;
                let s = run_semiclassical(&seq, &nv, &bath, &ss, &cfg).unwrap();
                // bath phase picked up during the finite NV pulses of the quantum engine
                let b: f64 = couplings.iter().map(|b| 0.5e-3 * b.abs()).sum();
                let pulse_time: f64 = seq.nv_pulses().map(|p| p.duration).sum();
                let bias = 2.0 * PI * b * pulse_time;
                assert!(
                    (q - s.coherence).abs() <= 3.0 * s.stderr + bias,
                    "{couplings:?} {kind:?} 2tau {two_tau}: {q} vs {} ± {}",
                    s.coherence,
                    s.stderr
                );
            }
        }
    }
}

#[test]
fn semiclassical_is_thread_count_independent() {
    let (nv, cal) = setup(281.0, 13.7);
    let bath = sample_bath(0.04, 8.0, 80.0, default_nv_axis(), 2).unwrap();
    let ss = SurfaceSpinParams::default();
    let f = surface_spin_larmor(281.0, ss.gamma_ss).unwrap();
    let seq = build_deer(10.0, f, 0.1, 5.0, &cal).unwrap();
    let cfg = EngineConfig {
        n_trajectories: 500,
        seed: 4,
        ..Default::default()
    };
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| semiclassical_phases(&seq, &nv, &bath, &ss, &cfg).unwrap())
    };
    let one = run(1);
    for t in [2, 4, 7] {
        let other = run(t);
        assert!(one.iter().zip(&other).all(|(a, b)| a.to_bits() == b.to_bits()));
    }
}

#[test]
fn zero_noise_gives_unit_coherence() {
    let (nv, cal) = setup(281.0, 13.7);
    let cfg = EngineConfig::default();
    for basis in [Basis::Sq, Basis::Dq] {
        let seq = build_decoupling(DecouplingKind::Cpmg(8), basis, 20.0, &cal).unwrap();
        let c = run_semiclassical(&seq, &nv, &SpinBathSample::empty(10.0), &SurfaceSpinParams::default(), &cfg)
            .unwrap();
        assert!((c.coherence - 1.0).abs() < 1e-12);
    }
}
