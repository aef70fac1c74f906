//! Exact simulation of the NV and a few surface spins in a rotating frame.
//! The bath is static; surface spins are dephased by `sigma_z` jumps only while driven.

use num_complex::Complex64;

use super::config::EngineConfig;
use super::trace::CoherencePoint;
use crate::error::{Error, Result};
use crate::model::{nv_levels, surface_spin_larmor, NvParams, SpinBathSample, SurfaceSpinParams};
use crate::pulses::{
    differential_coherence, differential_pair, photoluminescence, validate, Channel, Pulse,
    PulseSequence,
};
use crate::qcore::{
    embed, evolve, propagator, spin_operators, ComplexMatrix, Dephaser, QuantumState, Segment,
};

/// Largest bath the quantum engine accepts.
pub const MAX_QUANTUM_SPINS: usize = 8;

const PLUS: usize = 0;
const ZERO: usize = 1;
const MINUS: usize = 2;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn ket_bra(n: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    m[(i, j)] = c(1.0);
    m
}

fn common_carrier(pulses: &[&Pulse], fallback: f64, what: &str) -> Result<f64> {
    match pulses.first() {
        None => Ok(fallback),
        Some(p0) => {
            if pulses.iter().any(|p| (p.carrier - p0.carrier).abs() > 1e-9) {
                return Err(Error::Unsupported(format!(
                    "{what} pulses must share one carrier for a single rotating frame"
                )));
            }
            Ok(p0.carrier)
        }
    }
}

struct Model {
    dims: Vec<usize>,
    h0: ComplexMatrix,
    nv_a: (ComplexMatrix, ComplexMatrix),
    nv_b: (ComplexMatrix, ComplexMatrix),
    bath_x: Vec<ComplexMatrix>,
    bath_y: Vec<ComplexMatrix>,
    bath_z: Vec<ComplexMatrix>,
    dephasing_rate: f64,
}

impl Model {
    fn new(
        seq: &PulseSequence,
        nv: &NvParams,
        bath: &SpinBathSample,
        ss: &SurfaceSpinParams,
    ) -> Result<Self> {
        let levels = nv_levels(nv)?;
        let a: Vec<&Pulse> = seq.pulses.iter().filter(|p| p.channel == Channel::NvA).collect();
        let b: Vec<&Pulse> = seq.pulses.iter().filter(|p| p.channel == Channel::NvB).collect();
        let s: Vec<&Pulse> = seq.ss_pulses().collect();
        let f_a = levels.minus1 - levels.zero;
        let f_b = levels.plus1 - levels.zero;
        let larmor = surface_spin_larmor(nv.bz, ss.gamma_ss)?;
        let carrier_a = common_carrier(&a, f_a, "NV_A")?;
        let carrier_b = common_carrier(&b, f_b, "NV_B")?;
        let carrier_s = common_carrier(&s, larmor, "SS")?;
        for p in &seq.pulses {
            if p.rabi > p.carrier.abs() / 10.0 {
                return Err(Error::Unsupported(format!(
                    "Rabi frequency {} MHz exceeds a tenth of the carrier {} MHz; rotating-wave approximation invalid",
                    p.rabi, p.carrier
                )));
            }
        }

        let n = bath.len();
        let mut dims = vec![3];
        dims.extend(std::iter::repeat_n(2, n));
        let half = spin_operators(0.5)?;
        let proj = |k: usize| embed(&ket_bra(3, k, k), 0, &dims);
        let p_plus = proj(PLUS)?;
        let p_minus = proj(MINUS)?;
        let mut h0 = &p_minus * c(f_a - carrier_a) + &p_plus * c(f_b - carrier_b);
        let mut bath_x = Vec::with_capacity(n);
        let mut bath_y = Vec::with_capacity(n);
        let mut bath_z = Vec::with_capacity(n);
        let level_diff = &p_plus - &p_minus;
        for (i, b) in bath.couplings.iter().enumerate() {
            let sz = embed(&half.sz, i + 1, &dims)?;
            h0 += &sz * c(larmor - carrier_s);
            h0 += &level_diff * &sz * c(b * 1e-3);
            bath_x.push(embed(&half.sx, i + 1, &dims)?);
            bath_y.push(embed(&half.sy, i + 1, &dims)?);
            bath_z.push(sz);
        }
        let pair = |k: usize| -> Result<(ComplexMatrix, ComplexMatrix)> {
            let up = ket_bra(3, ZERO, k);
            let x = &up + up.adjoint();
            let y = (&up * Complex64::new(0.0, -1.0)) + up.adjoint() * Complex64::new(0.0, 1.0);
            Ok((embed(&x, 0, &dims)?, embed(&y, 0, &dims)?))
        };
        Ok(Model {
            nv_a: pair(MINUS)?,
            nv_b: pair(PLUS)?,
            dims,
            h0,
            bath_x,
            bath_y,
            bath_z,
            dephasing_rate: ss.dephasing_rate(),
        })
    }

    fn segments(&self, seq: &PulseSequence) -> Vec<Segment> {
        let mut marks = vec![0.0, seq.readout_time];
        for p in &seq.pulses {
            marks.push(p.start);
            marks.push(p.end());
        }
        marks.sort_by(f64::total_cmp);
        marks.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        let mut out = Vec::new();
        for w in marks.windows(2) {
            let (t0, t1) = (w[0], w[1]);
            if t1 > seq.readout_time + 1e-12 {
                break;
            }
            let mid = 0.5 * (t0 + t1);
            let mut h = self.h0.clone();
            let mut dephasers = Vec::new();
            for p in seq.pulses.iter().filter(|p| p.start <= mid && mid < p.end()) {
                let (cp, sp) = (p.phase.cos(), p.phase.sin());
                match p.channel {
                    Channel::NvA => {
                        h += (&self.nv_a.0 * c(cp) + &self.nv_a.1 * c(sp)) * c(p.rabi / 2.0)
                    }
                    Channel::NvB => {
                        h += (&self.nv_b.0 * c(cp) + &self.nv_b.1 * c(sp)) * c(p.rabi / 2.0)
                    }
                    Channel::Ss => {
                        for (x, y) in self.bath_x.iter().zip(&self.bath_y) {
                            h += (x * c(cp) + y * c(sp)) * c(p.rabi);
                        }
                        for z in &self.bath_z {
                            dephasers.push(Dephaser {
                                op: z * c(2.0),
                                rate: self.dephasing_rate,
                            });
                        }
                    }
                }
            }
            out.push(Segment {
                hamiltonian: h,
                duration: t1 - t0,
                dephasers,
            });
        }
        out
    }

    /// NV populations `(p_plus1, p_0, p_minus1)` at readout, averaged over the
    /// maximally mixed bath.
    fn populations(&self, seq: &PulseSequence) -> Result<[f64; 3]> {
        let segs = self.segments(seq);
        let dim: usize = self.dims.iter().product();
        let nb = dim / 3;
        let mut pops = [0.0; 3];
        if segs.iter().all(|s| s.dephasers.is_empty()) {
            let mut u = ComplexMatrix::identity(dim, dim);
            for s in &segs {
                u = propagator(&s.hamiltonian, s.duration)? * u;
            }
            for k in 0..nb {
                let col = ZERO * nb + k;
                for (m, pop) in pops.iter_mut().enumerate() {
                    for b in 0..nb {
                        *pop += u[(m * nb + b, col)].norm_sqr();
                    }
                }
            }
            for p in &mut pops {
                *p /= nb as f64;
            }
        } else {
            let mut rho = ComplexMatrix::zeros(dim, dim);
            for k in 0..nb {
                rho[(ZERO * nb + k, ZERO * nb + k)] = c(1.0 / nb as f64);
            }
            let state = QuantumState::mixed(rho, self.dims.clone())?;
            let out = evolve(&state, &segs)?;
            let diag = out.populations();
            for (m, pop) in pops.iter_mut().enumerate() {
                *pop = diag[m * nb..(m + 1) * nb].iter().sum();
            }
        }
        Ok(pops)
    }
}

/// Coherence from the differential photoluminescence of the sequence and its swapped copy.
pub fn run_quantum(
    seq: &PulseSequence,
    nv: &NvParams,
    bath: &SpinBathSample,
    ss: &SurfaceSpinParams,
    cfg: &EngineConfig,
) -> Result<CoherencePoint> {
    if let Some(v) = validate(seq).first() {
        return Err(Error::Sequence(v.to_string()));
    }
    cfg.validate()?;
    ss.validate()?;
    if bath.len() > MAX_QUANTUM_SPINS {
        return Err(Error::Unsupported(format!(
            "quantum engine handles at most {MAX_QUANTUM_SPINS} surface spins, got {}",
            bath.len()
        )));
    }
    let (plain, swapped) = differential_pair(seq)?;
    let model = Model::new(&swapped, nv, bath, ss)?;
    let pl = photoluminescence(model.populations(&plain)?, cfg.contrast);
    let pl_swap = photoluminescence(model.populations(&swapped)?, cfg.contrast);
    Ok(CoherencePoint {
        coherence: differential_coherence(pl, pl_swap, cfg.contrast)?,
        stderr: 0.0,
    })
}
