//! Monte-Carlo engine: classical surface-spin bath with telegraph dynamics,
//! stochastic Bloch evolution under drive, and Ornstein-Uhlenbeck backgrounds.
//! NV pulses are instantaneous; phases accumulate on the free-evolution clock.

mod moments;
mod ou;
mod timeline;

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, StandardNormal};
use rayon::prelude::*;

pub use moments::{mean_bloch, window_stats, DriveParams, WindowStats};
pub use ou::{echo_kernel, Ou, OuStep};
pub use timeline::{build as build_timeline, Span, Timeline, Window};

use super::config::{BathModel, EngineConfig};
use super::trace::CoherencePoint;
use crate::error::{Error, Result};
use crate::model::{surface_spin_larmor, NvParams, SpinBathSample, SurfaceSpinParams};
use crate::pulses::{validate, PulseSequence};

/// Bath size times expected flips per trajectory above which `Auto` goes Gaussian.
const AUTO_EVENT_LIMIT: f64 = 1e5;

struct Prepared {
    timeline: Timeline,
    window_stats: Vec<WindowStats>,
    half_b: Vec<f64>,
    sigma: f64,
    flip_rate: f64,
    gaussian: bool,
    bath_steps: Vec<OuStep>,
    magnetic: Option<(Ou, Vec<OuStep>)>,
    common: Option<(Ou, Vec<OuStep>)>,
    transverse: Option<Transverse>,
}

struct Transverse {
    ou: Ou,
    static_coupling: f64,
    zeeman: f64,
    steps: Vec<(usize, OuStep, f64)>,
}

fn prepare(
    seq: &PulseSequence,
    nv: &NvParams,
    bath: &SpinBathSample,
    ss: &SurfaceSpinParams,
    cfg: &EngineConfig,
) -> Result<Prepared> {
    let violations = validate(seq);
    if let Some(v) = violations.first() {
        return Err(Error::Sequence(v.to_string()));
    }
    nv.validate()?;
    ss.validate()?;
    cfg.validate()?;
    let timeline = build_timeline(seq)?;
    let larmor = surface_spin_larmor(nv.bz, ss.gamma_ss)?;
    let flip_rate = ss.flip_rate();
    let scale = timeline.c_b_scale;

    let mut stats = Vec::with_capacity(timeline.windows.len());
    for (w_idx, w) in timeline.windows.iter().enumerate() {
        let params = DriveParams {
            rabi: w.rabi,
            phase: w.phase,
            detuning: larmor - w.carrier,
            kappa: ss.dephasing_rate(),
            lambda: flip_rate,
        };
        let pieces: Vec<(f64, f64)> = timeline
            .spans
            .iter()
            .filter(|s| s.window == Some(w_idx))
            .map(|s| (s.len(), s.c_b / scale))
            .collect();
        stats.push(window_stats(&params, &pieces));
    }

    let half_b: Vec<f64> = bath.couplings.iter().map(|b| 0.5e-3 * b).collect();
    let sigma = half_b.iter().map(|b| b * b).sum::<f64>().sqrt();
    let duration = timeline.spans.last().map_or(0.0, |s| s.t1);
    let gaussian = match cfg.bath_model {
        BathModel::Telegraph => false,
        BathModel::Gaussian => true,
        BathModel::Auto => half_b.len() as f64 * (1.0 + flip_rate * duration) > AUTO_EVENT_LIMIT,
    };
    let bath_ou = Ou {
        rms: sigma,
        tau_c: ss.tau_c,
    };
    let bath_steps = timeline.spans.iter().map(|s| bath_ou.step(s.len())).collect();
    let channel = |ou: Ou| {
        ou.is_active()
            .then(|| (ou, timeline.spans.iter().map(|s| ou.step(s.len())).collect()))
    };
    let magnetic = channel(cfg.noise.magnetic);
    let common = channel(cfg.noise.common_mode);
    let transverse = if cfg.noise.transverse.is_active() {
        if !(nv.zeeman() > 0.0) {
            return Err(Error::Unsupported(
                "transverse electric noise needs a non-zero axial field".into(),
            ));
        }
        let ou = cfg.noise.transverse;
        let steps = timeline
            .spans
            .iter()
            .map(|s| {
                let n = if ou.tau_c.is_finite() {
                    ((s.len() * 20.0 / ou.tau_c).ceil() as usize).max(1)
                } else {
                    1
                };
                let dt = s.len() / n as f64;
                (n, ou.step(dt), dt)
            })
            .collect();
        Some(Transverse {
            ou,
            static_coupling: nv.transverse_coupling(),
            zeeman: nv.zeeman(),
            steps,
        })
    } else {
        None
    };
    Ok(Prepared {
        timeline,
        window_stats: stats,
        half_b,
        sigma,
        flip_rate,
        gaussian,
        bath_steps,
        magnetic,
        common,
        transverse,
    })
}


fn sign<R: Rng>(rng: &mut R) -> f64 {
    if rng.random::<bool>() {
        1.0
    } else {
        -1.0
    }
}

impl Prepared {
    fn next_flip<R: Rng>(&self, rng: &mut R, from: f64) -> f64 {
        if self.flip_rate > 0.0 {
            from + Exp::new(self.flip_rate).unwrap().sample(rng)
        } else {
            f64::INFINITY
        }
    }

    /// Total NV phase in radians for trajectory `index`.
    fn trajectory(&self, seed: u64, index: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        let spans = &self.timeline.spans;
        let scale = self.timeline.c_b_scale;
        let t_start = spans.first().map_or(0.0, |s| s.t0);
        let n = self.half_b.len();

        let mut spins = Vec::new();
        let mut next = Vec::new();
        let mut field = 0.0;
        if self.gaussian {
            field = self.sigma * rng.sample::<f64, _>(StandardNormal);
        } else {
            spins = (0..n).map(|_| sign(&mut rng)).collect();
            next = (0..n).map(|_| self.next_flip(&mut rng, t_start)).collect();
        }
        let mut x_mag = self.magnetic.as_ref().map_or(0.0, |(ou, _)| ou.sample_stationary(&mut rng));
        let mut x_com = self.common.as_ref().map_or(0.0, |(ou, _)| ou.sample_stationary(&mut rng));
        let mut x_tr = self.transverse.as_ref().map_or(0.0, |t| t.ou.sample_stationary(&mut rng));

        let mut phase_b = 0.0;
        let mut phase_e = 0.0;
        for (j, span) in spans.iter().enumerate() {
            match span.window {
                Some(w) if j == 0 || spans[j - 1].window != Some(w) => {
                    let st = self.window_stats[w];
                    let g: f64 = rng.sample(StandardNormal);
                    if self.gaussian {
                        phase_b += scale * (field * st.mean + st.variance.sqrt() * self.sigma * g);
                        let g2: f64 = rng.sample(StandardNormal);
                        field = field * st.z_end
                            + self.sigma * (1.0 - st.z_end * st.z_end).max(0.0).sqrt() * g2;
                    } else {
                        let acc: f64 = self.half_b.iter().zip(&spins).map(|(b, s)| b * s).sum();
                        phase_b += scale * (acc * st.mean + st.variance.sqrt() * self.sigma * g);
                        let t_end = self.timeline.windows[w].t1;
                        for i in 0..n {
                            let up = 0.5 * (1.0 + spins[i] * st.z_end);
                            spins[i] = if rng.random::<f64>() < up { 1.0 } else { -1.0 };
                            next[i] = self.next_flip(&mut rng, t_end);
                        }
                    }
                }
                Some(_) => {}
                None => {
                    if self.gaussian {
                        let (f1, integral) = self.bath_steps[j].advance(field, &mut rng);
                        field = f1;
                        phase_b += span.c_b * integral;
                    } else {
                        let mut acc = 0.0;
                        for i in 0..n {
                            let mut t = span.t0;
                            let mut integral = 0.0;
                            while next[i] < span.t1 {
                                integral += spins[i] * (next[i] - t);
                                t = next[i];
                                spins[i] = -spins[i];
                                next[i] = self.next_flip(&mut rng, t);
                            }
                            integral += spins[i] * (span.t1 - t);
                            acc += self.half_b[i] * integral;
                        }
                        phase_b += span.c_b * acc;
                    }
                }
            }
            if let Some((_, steps)) = &self.magnetic {
                let (x1, integral) = steps[j].advance(x_mag, &mut rng);
                x_mag = x1;
                phase_b += span.c_b * integral;
            }
            if let Some((_, steps)) = &self.common {
                let (x1, integral) = steps[j].advance(x_com, &mut rng);
                x_com = x1;
                phase_e += span.c_e * integral;
            }
            if let Some(tr) = &self.transverse {
                let (count, step, dt) = tr.steps[j];
                let var = tr.ou.rms * tr.ou.rms;
                let mut shift = 0.0;
                for _ in 0..count {
                    let (x1, integral) = step.advance(x_tr, &mut rng);
                    let sq = 0.5 * (x_tr * x_tr + x1 * x1) * dt;
                    shift += 2.0 * tr.static_coupling * integral + sq - var * dt;
                    x_tr = x1;
                }
                phase_b += span.c_b * shift / (2.0 * tr.zeeman);
            }
        }
        2.0 * PI * (phase_b + phase_e)
    }
}

/// Accumulated NV phase (radians) for each trajectory, in trajectory order.
pub fn semiclassical_phases(
    seq: &PulseSequence,
    nv: &NvParams,
    bath: &SpinBathSample,
    ss: &SurfaceSpinParams,
    cfg: &EngineConfig,
) -> Result<Vec<f64>> {
    let prep = prepare(seq, nv, bath, ss, cfg)?;
    Ok((0..cfg.n_trajectories as u64)
        .into_par_iter()
        .map(|k| prep.trajectory(cfg.seed, k))
        .collect())
}

/// Trajectory-averaged coherence `<cos phi>` with its standard error.
pub fn run_semiclassical(
    seq: &PulseSequence,
    nv: &NvParams,
    bath: &SpinBathSample,
    ss: &SurfaceSpinParams,
    cfg: &EngineConfig,
) -> Result<CoherencePoint> {
    let phases = semiclassical_phases(seq, nv, bath, ss, cfg)?;
    let n = phases.len() as f64;
    let (mut sum, mut sum2) = (0.0, 0.0);
    for p in &phases {
        let c = p.cos();
        sum += c;
        sum2 += c * c;
    }
    let mean = sum / n;
    let var = if n > 1.0 {
        ((sum2 - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(CoherencePoint {
        coherence: mean,
        stderr: (var / n).sqrt(),
    })
}

/// Whether `Auto` would pick the Gaussian bath for this sequence.
pub fn uses_gaussian_bath(
    seq: &PulseSequence,
    nv: &NvParams,
    bath: &SpinBathSample,
    ss: &SurfaceSpinParams,
    cfg: &EngineConfig,
) -> Result<bool> {
    Ok(prepare(seq, nv, bath, ss, cfg)?.gaussian)
}
