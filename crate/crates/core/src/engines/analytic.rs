//! Closed-form results for Gaussian (Ornstein-Uhlenbeck) frequency noise and
//! for driven two-level flips.

use std::f64::consts::PI;

use super::config::EngineConfig;
use super::semiclassical::{build_timeline, echo_kernel, mean_bloch, DriveParams, Ou, Span};
use super::trace::CoherencePoint;
use crate::error::{invalid, Error, Result};
use crate::model::{SpinBathSample, SurfaceSpinParams};
use crate::pulses::{validate, PulseSequence};

/// Hahn-echo coherence `exp(-chi)` for OU noise of rms `b_rms_khz` and correlation
/// time `tau_c` us, with `tau` us on each side of the refocusing pulse:
/// `chi = (2 pi g b)^2 tau_c^2 [2x - 3 + 4 e^-x - e^-2x]`, `x = tau / tau_c`, `g = gamma_mult`.
pub fn hahn_echo_ou_analytic(b_rms_khz: f64, tau_c: f64, tau: f64, gamma_mult: f64) -> Result<f64> {
    if !(tau >= 0.0) || !(b_rms_khz >= 0.0) || !(tau_c > 0.0) || !(gamma_mult >= 0.0) {
        return invalid("need tau >= 0, b_rms >= 0, tau_c > 0 and gamma_mult >= 0");
    }
    if !tau_c.is_finite() {
        return Ok(1.0);
    }
    let w = 2.0 * PI * gamma_mult * b_rms_khz * 1e-3;
    Ok((-(w * w) * tau_c * tau_c * echo_kernel(tau / tau_c)).exp())
}

/// Rabi flip probability `(Ω²/(Ω²+Δ²))·sin²(π·√(Ω²+Δ²)·t)` for a spin starting polarised.
pub fn flip_probability(ss_rabi: f64, detuning: f64, t: f64) -> Result<f64> {
    if !(t >= 0.0) || !ss_rabi.is_finite() || !detuning.is_finite() {
        return invalid("need t >= 0 and finite frequencies");
    }
    let g2 = ss_rabi * ss_rabi + detuning * detuning;
    if g2 == 0.0 {
        return Ok(0.0);
    }
    Ok(ss_rabi * ss_rabi / g2 * (PI * g2.sqrt() * t).sin().powi(2))
}

/// Flip probability including Bloch transverse decay `2 / t2_rabi` during the pulse.
pub fn flip_probability_damped(ss_rabi: f64, detuning: f64, t: f64, t2_rabi: f64) -> Result<f64> {
    if !(t >= 0.0) || !(ss_rabi >= 0.0) || !(t2_rabi > 0.0) || !detuning.is_finite() {
        return invalid("need t >= 0, ss_rabi >= 0, t2_rabi > 0 and finite detuning");
    }
    let p = DriveParams {
        rabi: ss_rabi,
        phase: 0.0,
        detuning,
        kappa: 1.0 / t2_rabi,
        lambda: 0.0,
    };
    Ok(0.5 * (1.0 - mean_bloch(&p, t)[2]))
}

/// `chi = (1/2) Var(phase)` for OU noise weighted piecewise by `coeff` over `spans`.
pub fn ou_chi(spans: &[Span], coeff: impl Fn(&Span) -> f64, ou: Ou) -> f64 {
    if !ou.is_active() {
        return 0.0;
    }
    let th = if ou.tau_c.is_finite() { 1.0 / ou.tau_c } else { 0.0 };
    // (1 - e^{-th h}) / th, and its self term 2 (th h - 1 + e^{-th h}) / th^2
    let lin = |h: f64| if th > 0.0 { -(-th * h).exp_m1() / th } else { h };
    let selfk = |h: f64| {
        let u = th * h;
        if u < 1e-4 {
            h * h * (1.0 - u / 3.0 + u * u / 12.0)
        } else {
            2.0 * (u - 1.0 + (-u).exp()) / (th * th)
        }
    };
    let mut var = 0.0;
    for (j, a) in spans.iter().enumerate() {
        let ca = coeff(a);
        if ca == 0.0 {
            continue;
        }
        var += ca * ca * selfk(a.len());
        for b in &spans[j + 1..] {
            let cb = coeff(b);
            if cb != 0.0 {
                let gap = b.t0 - a.t1;
                var += 2.0 * ca * cb * lin(a.len()) * lin(b.len()) * (-th * gap).exp();
            }
        }
    }
    0.5 * (2.0 * PI * ou.rms).powi(2) * var
}

/// Coherence for an undriven sequence with the bath treated as Gaussian OU noise.
pub fn run_analytic(
    seq: &PulseSequence,
    bath: &SpinBathSample,
    ss: &SurfaceSpinParams,
    cfg: &EngineConfig,
) -> Result<CoherencePoint> {
    if let Some(v) = validate(seq).first() {
        return Err(Error::Sequence(v.to_string()));
    }
    ss.validate()?;
    cfg.validate()?;
    if cfg.noise.transverse.is_active() {
        return Err(Error::Unsupported(
            "transverse electric noise is not Gaussian; use the semiclassical engine".into(),
        ));
    }
    let tl = build_timeline(seq)?;
    if !tl.windows.is_empty() {
        return Err(Error::Unsupported(
            "surface-spin drive has no closed form; use the semiclassical engine".into(),
        ));
    }
    let bath_ou = Ou {
        rms: bath.field_rms(),
        tau_c: ss.tau_c,
    };
    let chi = ou_chi(&tl.spans, |s| s.c_b, bath_ou)
        + ou_chi(&tl.spans, |s| s.c_b, cfg.noise.magnetic)
        + ou_chi(&tl.spans, |s| s.c_e, cfg.noise.common_mode);
    Ok(CoherencePoint {
        coherence: (-chi).exp(),
        stderr: 0.0,
    })
}
