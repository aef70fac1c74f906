//! Maps a pulse sequence onto a free-evolution clock with instantaneous NV
//! pulses and piecewise-constant phase-accumulation coefficients.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::pulses::{Pulse, PulseSequence, Target};

const ANGLE_TOL: f64 = 1e-6;

/// Free-clock times are rounded to 1 fs so that sequences with different pulse
/// content but the same free evolution share identical breakpoints.
fn snap(t: f64) -> f64 {
    (t * 1e9).round() / 1e9
}

/// One interval of the free clock. `c_b` and `c_e` weight magnetic-type and
/// electric-type frequency noise in the accumulated NV phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Span {
    pub t0: f64,
    pub t1: f64,
    pub c_b: f64,
    pub c_e: f64,
    pub window: Option<usize>,
}

impl Span {
    pub fn len(&self) -> f64 {
        self.t1 - self.t0
    }
}

/// Surface-spin drive on the free clock.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub t0: f64,
    pub t1: f64,
    pub carrier: f64,
    pub rabi: f64,
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Timeline {
    pub spans: Vec<Span>,
    pub windows: Vec<Window>,
    /// Largest `|c_b|`, used to normalise drive-window statistics.
    pub c_b_scale: f64,
}

fn classify(p: &Pulse) -> Result<bool> {
    let a = p.angle();
    if (a - FRAC_PI_2).abs() < ANGLE_TOL {
        Ok(false)
    } else if (a - PI).abs() < ANGLE_TOL {
        Ok(true)
    } else {
        Err(Error::Unsupported(format!(
            "NV pulse at t = {} us has angle {a:.5} rad; only pi/2 and pi pulses are modelled",
            p.start
        )))
    }
}

fn level(target: Target) -> i32 {
    match target {
        Target::ZeroToMinus1 => -1,
        Target::ZeroToPlus1 => 1,
        Target::SurfaceSpin => 0,
    }
}

pub fn build(seq: &PulseSequence) -> Result<Timeline> {
    if seq.differential {
        return Err(Error::Unsupported(
            "swapped-readout sequences are not simulated semiclassically".into(),
        ));
    }
    let nv: Vec<&Pulse> = seq.nv_pulses().collect();
    if nv.len() < 2 {
        return Err(Error::Sequence("need preparation and projection pulses".into()));
    }
    let kinds = nv.iter().map(|p| classify(p)).collect::<Result<Vec<bool>>>()?;
    if kinds[0] || kinds[nv.len() - 1] {
        return Err(Error::Sequence("sequence must start and end with pi/2 pulses".into()));
    }
    if kinds[1..nv.len() - 1].iter().any(|&full| !full) {
        return Err(Error::Unsupported("intermediate pi/2 pulses are not supported".into()));
    }
    let free = |t: f64| -> f64 {
        let dead: f64 = nv
            .iter()
            .map(|p| (t.min(p.end()) - p.start).max(0.0))
            .sum();
        snap(t - dead)
    };
    let t_start = free(nv[0].start);
    let t_stop = free(nv[nv.len() - 1].start);

    let mut windows = Vec::new();
    for p in seq.ss_pulses() {
        let (a, b) = (free(p.start).max(t_start), free(p.end()).min(t_stop));
        if b > a {
            windows.push(Window {
                t0: a,
                t1: b,
                carrier: p.carrier,
                rabi: p.rabi,
                phase: p.phase,
            });
        }
    }

    // level pair (a, b) whose coherence is tracked
    let first = level(nv[0].target);
    let mut pair = (0, first);
    let mut toggles: Vec<(f64, i32)> = Vec::new();
    for (p, &full) in nv.iter().zip(&kinds).skip(1).take(nv.len() - 2) {
        if full {
            toggles.push((free(p.start), level(p.target)));
        }
    }
    // the pi pulse directly after preparation (DQ) acts at t_start
    let mut breaks = vec![t_start, t_stop];
    breaks.extend(toggles.iter().map(|t| t.0));
    for w in &windows {
        breaks.push(w.t0);
        breaks.push(w.t1);
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let swap = |lv: i32, x: i32| -> i32 {
        if lv == 0 {
            x
        } else if lv == x {
            0
        } else {
            lv
        }
    };
    let mut spans = Vec::new();
    let mut k = 0;
    let mut scale = 0.0f64;
    for w in breaks.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        while k < toggles.len() && toggles[k].0 <= t0 {
            pair = (swap(pair.0, toggles[k].1), swap(pair.1, toggles[k].1));
            k += 1;
        }
        let c_b = (pair.0 - pair.1) as f64;
        let c_e = (pair.0.abs() - pair.1.abs()) as f64;
        scale = scale.max(c_b.abs());
        let mid = 0.5 * (t0 + t1);
        let window = windows.iter().position(|w| w.t0 <= mid && mid < w.t1);
        spans.push(Span {
            t0,
            t1,
            c_b,
            c_e,
            window,
        });
    }
    Ok(Timeline {
        spans,
        windows,
        c_b_scale: if scale > 0.0 { scale } else { 1.0 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::NvParams;
    use crate::pulses::{build_decoupling, build_deer, Basis, DecouplingKind, PulseCalibration};

    fn cal() -> PulseCalibration {
        PulseCalibration::resonant(&NvParams::with_field(382.0), 13.7).unwrap()
    }

    #[test]
    fn hahn_coefficients() {
        let s = build_decoupling(DecouplingKind::Hahn, Basis::Sq, 5.0, &cal()).unwrap();
        let t = build(&s).unwrap();
        assert_eq!(t.spans.len(), 2);
        assert!((t.spans[0].len() - 5.0).abs() < 1e-12);
        assert_eq!((t.spans[0].c_b, t.spans[0].c_e), (1.0, -1.0));
        assert_eq!((t.spans[1].c_b, t.spans[1].c_e), (-1.0, 1.0));
    }

    #[test]
    fn dq_doubles_magnetic_and_cancels_electric() {
        let sq = build(&build_decoupling(DecouplingKind::Cpmg(4), Basis::Sq, 8.0, &cal()).unwrap()).unwrap();
        let dq = build(&build_decoupling(DecouplingKind::Cpmg(4), Basis::Dq, 8.0, &cal()).unwrap()).unwrap();
        assert_eq!(sq.spans.len(), dq.spans.len());
        for (a, b) in sq.spans.iter().zip(&dq.spans) {
            assert_eq!(b.c_b, 2.0 * a.c_b);
            assert_eq!(b.c_e, 0.0);
            assert!((a.t0 - b.t0).abs() < 1e-12 && (a.t1 - b.t1).abs() < 1e-12);
        }
        assert_eq!(dq.c_b_scale, 2.0);
    }

    #[test]
    fn deer_window_lies_in_second_half() {
        let s = build_deer(10.0, 1070.0, 0.2, 5.0, &cal()).unwrap();
        let t = build(&s).unwrap();
        assert_eq!(t.windows.len(), 1);
        assert!((t.windows[0].t0 - 10.1).abs() < 1e-9);
        assert!((t.windows[0].t1 - 10.3).abs() < 1e-9);
        assert!(t.spans.iter().any(|s| s.window == Some(0) && s.c_b == -1.0));
    }

    #[test]
    fn rejects_arbitrary_angles() {
        let mut s = build_decoupling(DecouplingKind::Hahn, Basis::Sq, 5.0, &cal()).unwrap();
        s.pulses[1].duration *= 0.7;
        assert!(build(&s).is_err());
    }
}
