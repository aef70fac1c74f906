use std::f64::consts::{FRAC_PI_2, PI};

use super::sequence::{Basis, Channel, Pulse, PulseSequence, Target};
use crate::error::{invalid, Error, Result};
use crate::model::{transition_frequencies, NvParams};

/// Gap in us between the end of the NV refocusing pulse and a DEER surface-spin pulse.
pub const DEER_DEAD_TIME: f64 = 0.1;

const ANGLE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionCal {
    pub carrier: f64,
    pub rabi: f64,
}

/// Carrier and Rabi frequency for each NV transition that the sequence may address.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseCalibration {
    pub minus1: Option<TransitionCal>,
    pub plus1: Option<TransitionCal>,
}

impl PulseCalibration {
    /// Resonant carriers for both transitions of `nv`, with a common Rabi frequency.
    pub fn resonant(nv: &NvParams, rabi: f64) -> Result<Self> {
        let f = transition_frequencies(nv)?;
        Ok(PulseCalibration {
            minus1: Some(TransitionCal {
                carrier: f.f_0_to_minus1,
                rabi,
            }),
            plus1: Some(TransitionCal {
                carrier: f.f_0_to_plus1,
                rabi,
            }),
        })
    }

    fn get(&self, target: Target) -> Result<TransitionCal> {
        let cal = match target {
            Target::ZeroToMinus1 => self.minus1,
            Target::ZeroToPlus1 => self.plus1,
            Target::SurfaceSpin => None,
        };
        let cal = cal.ok_or_else(|| {
            Error::InvalidInput(format!("missing pulse calibration for transition {target}"))
        })?;
        if !(cal.rabi > 0.0) || !cal.carrier.is_finite() {
            return invalid(format!("bad calibration for {target}: {cal:?}"));
        }
        Ok(cal)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecouplingKind {
    Ramsey,
    Hahn,
    Cpmg(usize),
}

impl DecouplingKind {
    fn n_pi(self) -> usize {
        match self {
            DecouplingKind::Ramsey => 0,
            DecouplingKind::Hahn => 1,
            DecouplingKind::Cpmg(n) => n,
        }
    }
}

fn nv_pulse(target: Target, cal: TransitionCal, angle: f64, phase: f64, start: f64) -> Pulse {
    Pulse {
        channel: target.natural_channel(),
        carrier: cal.carrier,
        rabi: cal.rabi,
        phase,
        start,
        duration: angle / (2.0 * PI * cal.rabi),
        target,
    }
}

/// Free-precession sequence with total free evolution `2 tau` us. CPMG places
/// its pulses at `tau/n, 3 tau/n, ...` so the outer gaps are half the inner ones.
/// The final projection phase is chosen so the noiseless coherence is +1.
pub fn build_decoupling(
    kind: DecouplingKind,
    basis: Basis,
    tau: f64,
    cal: &PulseCalibration,
) -> Result<PulseSequence> {
    if !(tau > 0.0) || !tau.is_finite() {
        return invalid(format!("tau must be positive, got {tau}"));
    }
    if let DecouplingKind::Cpmg(0) = kind {
        return invalid("CPMG needs at least one refocusing pulse");
    }
    let a = cal.get(Target::ZeroToMinus1)?;
    let n = kind.n_pi();
    let gaps: Vec<f64> = match n {
        0 => vec![2.0 * tau],
        _ => {
            let mut g = vec![tau / n as f64];
            g.extend(std::iter::repeat_n(2.0 * tau / n as f64, n - 1));
            g.push(tau / n as f64);
            g
        }
    };
    let final_phase = if n % 2 == 1 { 0.0 } else { PI };
    let mut pulses = Vec::with_capacity(n + 2);
    let mut t = 0.0;
    let first = nv_pulse(Target::ZeroToMinus1, a, FRAC_PI_2, 0.0, t);
    t = first.end();
    pulses.push(first);
    for (k, gap) in gaps.iter().enumerate() {
        t += gap;
        let p = if k < n {
            nv_pulse(Target::ZeroToMinus1, a, PI, 0.0, t)
        } else {
            nv_pulse(Target::ZeroToMinus1, a, FRAC_PI_2, final_phase, t)
        };
        t = p.end();
        pulses.push(p);
    }
    let pulse_time: f64 = pulses.iter().map(|p| p.duration).sum();
    if 2.0 * tau < pulse_time {
        return invalid(format!(
            "free evolution 2 tau = {} us is shorter than the total pulse time {pulse_time} us",
            2.0 * tau
        ));
    }
    let seq = PulseSequence {
        pulses,
        readout_time: t,
        basis: Basis::Sq,
        differential: false,
    };
    match basis {
        Basis::Sq => Ok(seq),
        Basis::Dq => expand_dq(&seq, cal),
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Role {
    Prepare,
    Refocus,
    Project,
}

/// Rewrites a single-quantum sequence in the double-quantum basis using only
/// single-tone pulses: preparation `pi/2(A) pi(B)`, refocusing `pi(A) pi(B) pi(A)`,
/// projection `pi(B) pi/2(A)`. Free-evolution gaps are preserved.
pub fn expand_dq(seq: &PulseSequence, cal: &PulseCalibration) -> Result<PulseSequence> {
    if seq.basis == Basis::Dq {
        return Err(Error::Sequence("sequence is already double-quantum".into()));
    }
    if seq.differential {
        return Err(Error::Sequence("expand before forming the differential pair".into()));
    }
    if seq.pulses.iter().any(|p| p.channel != Channel::NvA) {
        return Err(Error::Sequence(
            "only bare NV_A sequences can be expanded; add surface-spin pulses afterwards".into(),
        ));
    }
    let a = cal.get(Target::ZeroToMinus1)?;
    let b = cal.get(Target::ZeroToPlus1)?;
    let n = seq.pulses.len();
    if n < 2 {
        return Err(Error::Sequence("need at least preparation and projection pulses".into()));
    }
    let mut roles = Vec::with_capacity(n);
    for (k, p) in seq.pulses.iter().enumerate() {
        let half = (p.angle() - FRAC_PI_2).abs() < ANGLE_TOL;
        let full = (p.angle() - PI).abs() < ANGLE_TOL;
        let role = match (k, half, full) {
            (0, true, _) => Role::Prepare,
            (k, true, _) if k == n - 1 => Role::Project,
            (k, _, true) if k > 0 && k < n - 1 => Role::Refocus,
            _ => {
                return Err(Error::Sequence(format!(
                    "pulse {k} (angle {:.4} rad) has no double-quantum counterpart",
                    p.angle()
                )))
            }
        };
        roles.push(role);
    }
    let tail = seq.readout_time - seq.pulses[n - 1].end();
    let mut out = Vec::new();
    let mut t = seq.pulses[0].start;
    for (k, role) in roles.iter().enumerate() {
        if k > 0 {
            t += seq.pulses[k].start - seq.pulses[k - 1].end();
        }
        let ops: Vec<(Target, TransitionCal, f64)> = match role {
            Role::Prepare => vec![(Target::ZeroToMinus1, a, FRAC_PI_2), (Target::ZeroToPlus1, b, PI)],
            Role::Refocus => vec![
                (Target::ZeroToMinus1, a, PI),
                (Target::ZeroToPlus1, b, PI),
                (Target::ZeroToMinus1, a, PI),
            ],
            Role::Project => vec![(Target::ZeroToPlus1, b, PI), (Target::ZeroToMinus1, a, FRAC_PI_2)],
        };
        for (target, c, angle) in ops {
            let p = nv_pulse(target, c, angle, 0.0, t);
            t = p.end();
            out.push(p);
        }
    }
    Ok(PulseSequence {
        pulses: out,
        readout_time: t + tail,
        basis: Basis::Dq,
        differential: false,
    })
}

/// Single-quantum Hahn echo with a surface-spin pi pulse of length `t_ss` us
/// starting `DEER_DEAD_TIME` after the NV refocusing pulse. `t_ss = 0` omits it.
pub fn build_deer(
    tau: f64,
    f_ss: f64,
    t_ss: f64,
    ss_rabi: f64,
    cal: &PulseCalibration,
) -> Result<PulseSequence> {
    if !(t_ss >= 0.0) || !t_ss.is_finite() {
        return invalid(format!("t_ss must be non-negative, got {t_ss}"));
    }
    if t_ss > 0.0 && !(ss_rabi > 0.0) {
        return invalid(format!("ss_rabi must be positive, got {ss_rabi}"));
    }
    if t_ss + DEER_DEAD_TIME > tau {
        return Err(Error::Sequence(format!(
            "surface-spin pulse of {t_ss} us does not fit in the {tau} us second half of the echo"
        )));
    }
    let mut seq = build_decoupling(DecouplingKind::Hahn, Basis::Sq, tau, cal)?;
    if t_ss > 0.0 {
        let start = seq.pulses[1].end() + DEER_DEAD_TIME;
        seq.pulses.push(Pulse {
            channel: Channel::Ss,
            carrier: f_ss,
            rabi: ss_rabi,
            phase: 0.0,
            start,
            duration: t_ss,
            target: Target::SurfaceSpin,
        });
        seq.sort();
    }
    Ok(seq)
}

/// Adds a surface-spin drive covering the whole sequence from the first NV pulse to readout.
pub fn with_continuous_drive(seq: &PulseSequence, f_ss: f64, ss_rabi: f64) -> Result<PulseSequence> {
    if !(ss_rabi > 0.0) || !ss_rabi.is_finite() {
        return invalid(format!("ss_rabi must be positive, got {ss_rabi}"));
    }
    if !f_ss.is_finite() {
        return invalid("drive frequency must be finite");
    }
    if seq.ss_pulses().next().is_some() {
        return Err(Error::Sequence("surface-spin channel is already occupied".into()));
    }
    let start = seq
        .nv_pulses()
        .map(|p| p.start)
        .fold(f64::INFINITY, f64::min);
    if !start.is_finite() {
        return Err(Error::Sequence("sequence has no NV pulses".into()));
    }
    let mut out = seq.clone();
    out.pulses.push(Pulse {
        channel: Channel::Ss,
        carrier: f_ss,
        rabi: ss_rabi,
        phase: 0.0,
        start,
        duration: seq.readout_time - start,
        target: Target::SurfaceSpin,
    });
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cal() -> PulseCalibration {
        PulseCalibration::resonant(&NvParams::with_field(382.0), 13.7).unwrap()
    }

    #[test]
    fn hahn_layout() {
        let s = build_decoupling(DecouplingKind::Hahn, Basis::Sq, 10.0, &cal()).unwrap();
        assert_eq!(s.pulses.len(), 3);
        let free = s.pulses[1].start - s.pulses[0].end() + s.pulses[2].start - s.pulses[1].end();
        assert!((free - 20.0).abs() < 1e-12);
        assert!((s.pulses[1].angle() - PI).abs() < 1e-12);
    }

    #[test]
    fn cpmg_positions_are_symmetric() {
        let s = build_decoupling(DecouplingKind::Cpmg(8), Basis::Sq, 16.0, &cal()).unwrap();
        assert_eq!(s.pulses.len(), 10);
        let g: Vec<f64> = s.pulses.windows(2).map(|w| w[1].start - w[0].end()).collect();
        assert!((g[0] - 2.0).abs() < 1e-12 && (g[8] - 2.0).abs() < 1e-12);
        assert!(g[1..8].iter().all(|x| (x - 4.0).abs() < 1e-12));
        assert_eq!(s.pulses[9].phase, PI);
    }

    #[test]
    fn dq_hahn_has_seven_single_tone_pulses() {
        let s = build_decoupling(DecouplingKind::Hahn, Basis::Dq, 10.0, &cal()).unwrap();
        assert_eq!(s.pulses.len(), 7);
        assert!(expand_dq(&s, &cal()).is_err());
    }

    #[test]
    fn dq_needs_plus_calibration() {
        let mut c = cal();
        c.plus1 = None;
        assert!(build_decoupling(DecouplingKind::Hahn, Basis::Dq, 10.0, &c).is_err());
        assert!(build_decoupling(DecouplingKind::Hahn, Basis::Sq, 10.0, &c).is_ok());
    }

    #[test]
    fn deer_pulse_must_fit() {
        assert!(matches!(
            build_deer(10.0, 1070.56, 11.0, 10.0, &cal()),
            Err(Error::Sequence(_))
        ));
        let s = build_deer(10.0, 1070.56, 0.108, 10.0, &cal()).unwrap();
        let ss = s.ss_pulses().next().unwrap();
        let nv_pi = s.nv_pulses().nth(1).unwrap();
        assert!((ss.start - nv_pi.end() - DEER_DEAD_TIME).abs() < 1e-12);
    }

    #[test]
    fn short_tau_rejected() {
        assert!(build_decoupling(DecouplingKind::Hahn, Basis::Sq, 0.01, &cal()).is_err());
        assert!(build_decoupling(DecouplingKind::Cpmg(0), Basis::Sq, 1.0, &cal()).is_err());
    }

    #[test]
    fn continuous_drive_spans_sequence() {
        let s = build_decoupling(DecouplingKind::Hahn, Basis::Dq, 10.0, &cal()).unwrap();
        let d = with_continuous_drive(&s, 787.5, 10.0).unwrap();
        let ss = d.ss_pulses().next().unwrap();
        assert_eq!(ss.start, 0.0);
        assert!((ss.end() - d.readout_time).abs() < 1e-12);
        assert!(with_continuous_drive(&d, 787.5, 10.0).is_err());
    }
}
