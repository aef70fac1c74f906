use std::f64::consts::PI;

use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use super::matrix::{identity, require_hermitian, trace, ComplexMatrix};
use super::state::QuantumState;
use crate::error::{Error, Result};

/// Lindblad jump operator with its rate in inverse microseconds.
#[derive(Debug, Clone)]
pub struct Dephaser {
    pub op: ComplexMatrix,
    pub rate: f64,
}

/// Piecewise-constant interval: Hamiltonian in cyclic MHz, duration in microseconds.
#[derive(Debug, Clone)]
pub struct Segment {
    pub hamiltonian: ComplexMatrix,
    pub duration: f64,
    pub dephasers: Vec<Dephaser>,
}

impl Segment {
    pub fn coherent(hamiltonian: ComplexMatrix, duration: f64) -> Self {
        Segment {
            hamiltonian,
            duration,
            dephasers: Vec::new(),
        }
    }
}

/// `exp(-i 2 pi H t)` from the Hermitian eigendecomposition of `H`.
pub fn propagator(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    require_hermitian(h)?;
    let eig = SymmetricEigen::new(h.clone());
    let v = &eig.eigenvectors;
    let phases = eig
        .eigenvalues
        .map(|lam| Complex64::from_polar(1.0, -2.0 * PI * lam * t));
    let mut vd = v.clone();
    for (j, mut col) in vd.column_iter_mut().enumerate() {
        col *= phases[j];
    }
    Ok(vd * v.adjoint())
}

fn row_sum_norm(a: &ComplexMatrix) -> f64 {
    a.row_iter()
        .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn check_segment(seg: &Segment, dim: usize) -> Result<()> {
    if seg.hamiltonian.nrows() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: seg.hamiltonian.nrows(),
        });
    }
    require_hermitian(&seg.hamiltonian)?;
    if !(seg.duration >= 0.0) || !seg.duration.is_finite() {
        return Err(Error::InvalidInput(format!("segment duration {}", seg.duration)));
    }
    for d in &seg.dephasers {
        if d.op.nrows() != dim || d.op.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: d.op.nrows(),
            });
        }
        if !(d.rate >= 0.0) || !d.rate.is_finite() {
            return Err(Error::InvalidInput(format!("dephaser rate {}", d.rate)));
        }
    }
    Ok(())
}

/// Fixed-step RK4 for the Lindblad equation with step at most `1/(100 * scale)`,
/// where `scale` bounds the Hamiltonian and dissipator frequencies.
fn lindblad_rk4(rho: &ComplexMatrix, seg: &Segment) -> ComplexMatrix {
    let dim = rho.nrows();
    let shift = trace(&seg.hamiltonian) / Complex64::new(dim as f64, 0.0);
    let h = &seg.hamiltonian - identity(dim) * shift;
    let mut heff = &h * Complex64::new(2.0 * PI, 0.0);
    let mut scale = row_sum_norm(&h);
    let jumps: Vec<(ComplexMatrix, ComplexMatrix)> = seg
        .dephasers
        .iter()
        .filter(|d| d.rate > 0.0)
        .map(|d| {
            let l = &d.op * Complex64::new(d.rate.sqrt(), 0.0);
            let ldl = l.adjoint() * &l;
            scale += row_sum_norm(&ldl);
            heff -= &ldl * Complex64::new(0.0, 0.5);
            (l.clone(), l.adjoint())
        })
        .collect();
    let heff_dag = heff.adjoint();
    let minus_i = Complex64::new(0.0, -1.0);
    let rhs = |r: &ComplexMatrix| -> ComplexMatrix {
        let mut out = (&heff * r - r * &heff_dag) * minus_i;
        for (l, ld) in &jumps {
            out += l * r * ld;
        }
        out
    };
    let n_steps = ((seg.duration * 100.0 * scale).ceil() as usize).max(1);
    let dt = seg.duration / n_steps as f64;
    let half = Complex64::new(dt / 2.0, 0.0);
    let full = Complex64::new(dt, 0.0);
    let sixth = Complex64::new(dt / 6.0, 0.0);
    let two = Complex64::new(2.0, 0.0);
    let mut r = rho.clone();
    for _ in 0..n_steps {
        let k1 = rhs(&r);
        let k2 = rhs(&(&r + &k1 * half));
        let k3 = rhs(&(&r + &k2 * half));
        let k4 = rhs(&(&r + &k3 * full));
        r += (k1 + k2 * two + k3 * two + k4) * sixth;
    }
    // restore exact Hermiticity lost to rounding
    (&r + r.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Propagates `state` through `segments` in order. Coherent segments use exact
/// propagators; segments with dephasers switch to a density matrix.
pub fn evolve(state: &QuantumState, segments: &[Segment]) -> Result<QuantumState> {
    let dims = state.dims().to_vec();
    let dim = state.dim();
    for seg in segments {
        check_segment(seg, dim)?;
    }
    let mut cur = state.clone();
    for seg in segments {
        if seg.duration == 0.0 {
            continue;
        }
        let dissipative = seg.dephasers.iter().any(|d| d.rate > 0.0);
        cur = if dissipative {
            QuantumState::Mixed {
                rho: lindblad_rk4(&cur.density(), seg),
                dims: dims.clone(),
            }
        } else {
            let u = propagator(&seg.hamiltonian, seg.duration)?;
            match cur {
                QuantumState::Pure { psi, dims } => QuantumState::Pure { psi: &u * psi, dims },
                QuantumState::Mixed { rho, dims } => QuantumState::Mixed {
                    rho: &u * rho * u.adjoint(),
                    dims,
                },
            }
        };
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{embed, spin_operators};

    fn max_abs(a: &ComplexMatrix) -> f64 {
        a.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn propagator_is_unitary_and_composes() {
        let s = spin_operators(1.0).unwrap();
        let h = &s.sx * c(1.3) + &s.sz * &s.sz * c(0.7) + &s.sy * c(-0.4);
        let u1 = propagator(&h, 0.37).unwrap();
        let u2 = propagator(&h, 0.21).unwrap();
        let u12 = propagator(&h, 0.58).unwrap();
        assert!(max_abs(&(&u1 * u1.adjoint() - identity(3))) < 1e-12);
        assert!(max_abs(&(&u2 * &u1 - u12)) < 1e-12);
    }

    #[test]
    fn pi_pulse_on_spin_one_subspace() {
        // drive on |0> <-> |-1> at 13.7 MHz for 1/(2 * 13.7) us
        let rabi = 13.7;
        let mut h = ComplexMatrix::zeros(3, 3);
        h[(1, 2)] = c(rabi / 2.0);
        h[(2, 1)] = c(rabi / 2.0);
        let psi0 = QuantumState::basis(1, vec![3]).unwrap();
        let out = evolve(&psi0, &[Segment::coherent(h, 1.0 / (2.0 * rabi))]).unwrap();
        let p = out.populations();
        assert!((p[2] - 1.0).abs() < 1e-12);
        assert!(p[1].abs() < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian_and_bad_durations() {
        let mut h = ComplexMatrix::zeros(2, 2);
        h[(0, 1)] = c(1.0);
        let psi0 = QuantumState::basis(0, vec![2]).unwrap();
        assert!(matches!(
            evolve(&psi0, &[Segment::coherent(h, 1.0)]),
            Err(Error::NotHermitian(_))
        ));
        let h = ComplexMatrix::zeros(2, 2);
        assert!(evolve(&psi0, &[Segment::coherent(h.clone(), -1.0)]).is_err());
        assert!(evolve(&psi0, &[Segment::coherent(ComplexMatrix::zeros(3, 3), 1.0)]).is_err());
    }

    #[test]
    fn lindblad_preserves_trace_and_positivity() {
        let s = spin_operators(0.5).unwrap();
        let dims = vec![3, 2];
        let nv = spin_operators(1.0).unwrap();
        let h = embed(&(&nv.sz * c(0.3)), 0, &dims).unwrap()
            + embed(&(&s.sx * c(5.0)), 1, &dims).unwrap();
        let l = embed(&(&s.sz * c(2.0)), 1, &dims).unwrap();
        let seg = Segment {
            hamiltonian: h,
            duration: 2.0,
            dephasers: vec![Dephaser { op: l, rate: 5.0 }],
        };
        let psi0 = QuantumState::basis(1, dims.clone()).unwrap();
        let out = evolve(&psi0, &[seg]).unwrap();
        assert!((out.trace() - 1.0).abs() < 1e-8);
        let rho = out.density();
        assert!(crate::qcore::hermitian_deviation(&rho) < 1e-12);
        let eig = SymmetricEigen::new(rho).eigenvalues;
        assert!(eig.iter().all(|&e| e > -1e-8));
    }

    #[test]
    fn dephased_rabi_envelope_matches_t2_rabi() {
        // sigma_z dephasing at 1/T2R gives transverse decay 2/T2R and a Rabi envelope exp(-t/T2R)
        let t2r = 0.2;
        let rabi = 13.7;
        let s = spin_operators(0.5).unwrap();
        let h = &s.sx * c(rabi);
        let l = &s.sz * c(2.0);
        let mut t_pts = Vec::new();
        let mut ln_amp = Vec::new();
        let psi0 = QuantumState::basis(0, vec![2]).unwrap();
        for k in 1..=8 {
            let t = k as f64 / rabi;
            let seg = Segment {
                hamiltonian: h.clone(),
                duration: t,
                dephasers: vec![Dephaser {
                    op: l.clone(),
                    rate: 1.0 / t2r,
                }],
            };
            let out = evolve(&psi0, &[seg]).unwrap();
            let z = 2.0 * out.expect(&s.sz).unwrap().re;
            t_pts.push(t);
            ln_amp.push(z.ln());
        }
        let n = t_pts.len() as f64;
        let mt = t_pts.iter().sum::<f64>() / n;
        let ml = ln_amp.iter().sum::<f64>() / n;
        let slope = t_pts
            .iter()
            .zip(&ln_amp)
            .map(|(t, l)| (t - mt) * (l - ml))
            .sum::<f64>()
            / t_pts.iter().map(|t| (t - mt).powi(2)).sum::<f64>();
        let t2_fit = -1.0 / slope;
        assert!((t2_fit - 0.2).abs() < 0.01, "fitted T2,Rabi = {t2_fit}");
    }
}
