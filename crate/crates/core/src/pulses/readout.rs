use super::sequence::{Channel, Pulse, PulseSequence, Target};
use crate::error::{invalid, Error, Result};

/// Fractional photoluminescence drop of the `m_s = +-1` states.
pub const DEFAULT_CONTRAST: f64 = 0.35;

/// Photoluminescence for populations `(p_plus1, p_0, p_minus1)`.
pub fn photoluminescence(pops: [f64; 3], contrast: f64) -> f64 {
    pops[1] + (1.0 - contrast) * (pops[0] + pops[2])
}

/// `(PL - PL_swap) / contrast`, which equals `p_0 - p_minus1` before the swap.
pub fn differential_coherence(pl: f64, pl_swap: f64, contrast: f64) -> Result<f64> {
    if !(contrast > 0.0 && contrast <= 1.0) {
        return invalid(format!("contrast must lie in (0, 1], got {contrast}"));
    }
    Ok((pl - pl_swap) / contrast)
}

/// The sequence and its copy with a `pi` pulse on `0 <-> -1` inserted at the
/// readout, which exchanges the `m_s = 0` and `-1` populations before detection.
pub fn differential_pair(seq: &PulseSequence) -> Result<(PulseSequence, PulseSequence)> {
    if seq.differential {
        return Err(Error::Sequence("sequence already carries a swap pulse".into()));
    }
    let last = seq
        .nv_pulses()
        .last()
        .ok_or_else(|| Error::Sequence("no NV pulses".into()))?;
    if last.target != Target::ZeroToMinus1
        || (last.angle() - std::f64::consts::FRAC_PI_2).abs() > 1e-6
    {
        return Err(Error::Sequence(
            "sequence must end with a pi/2 projection on 0 <-> -1".into(),
        ));
    }
    if !(last.rabi > 0.0) {
        return invalid("projection pulse has no Rabi frequency");
    }
    let swap = Pulse {
        channel: Channel::NvA,
        carrier: last.carrier,
        rabi: last.rabi,
        phase: 0.0,
        start: seq.readout_time,
        duration: 0.5 / last.rabi,
        target: Target::ZeroToMinus1,
    };
    let mut swapped = seq.clone();
    swapped.readout_time = swap.end();
    swapped.pulses.push(swap);
    swapped.sort();
    swapped.differential = true;
    Ok((seq.clone(), swapped))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::NvParams;
    use crate::pulses::{build_decoupling, validate, Basis, DecouplingKind, PulseCalibration};

    #[test]
    fn swap_gives_population_difference() {
        let pops = [0.1, 0.6, 0.3];
        let swapped = [0.1, 0.3, 0.6];
        let c = differential_coherence(
            photoluminescence(pops, DEFAULT_CONTRAST),
            photoluminescence(swapped, DEFAULT_CONTRAST),
            DEFAULT_CONTRAST,
        )
        .unwrap();
        assert!((c - 0.3).abs() < 1e-12);
    }

    #[test]
    fn dq_swap_sequence_has_eight_pulses() {
        let cal = PulseCalibration::resonant(&NvParams::with_field(382.0), 13.7).unwrap();
        let s = build_decoupling(DecouplingKind::Hahn, Basis::Dq, 10.0, &cal).unwrap();
        let (a, b) = differential_pair(&s).unwrap();
        assert_eq!(a.pulses.len(), 7);
        assert_eq!(b.pulses.len(), 8);
        assert!(validate(&b).is_empty());
        assert!(differential_pair(&b).is_err());
    }
}
