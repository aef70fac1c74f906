use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::qcore::{spin_operators, ComplexMatrix};

/// NV ground-state parameters. Frequencies in MHz, field in gauss, electric
/// couplings in Hz cm/V, electric fields in V/cm, depth in nm.
#[derive(Debug, Clone, PartialEq)]
pub struct NvParams {
    pub d: f64,
    pub gamma: f64,
    pub d_par: f64,
    pub d_perp: f64,
    pub bz: f64,
    pub pi_par: f64,
    pub pi_perp: f64,
    pub depth: f64,
}

impl Default for NvParams {
    fn default() -> Self {
        NvParams {
            d: 2870.0,
            gamma: 2.8,
            d_par: 0.35,
            d_perp: 17.0,
            bz: 0.0,
            pi_par: 0.0,
            pi_perp: 0.0,
            depth: 10.0,
        }
    }
}

impl NvParams {
    pub fn with_field(bz: f64) -> Self {
        NvParams {
            bz,
            ..Default::default()
        }
    }

    /// Axial electric shift `d_par * Pi_par / h` in MHz.
    pub fn axial_shift(&self) -> f64 {
        self.d_par * self.pi_par * 1e-6
    }

    /// Transverse electric coupling `d_perp * Pi_perp / h` in MHz.
    pub fn transverse_coupling(&self) -> f64 {
        self.d_perp * self.pi_perp * 1e-6
    }

    pub fn zeeman(&self) -> f64 {
        self.gamma * self.bz
    }

    pub fn validate(&self) -> Result<()> {
        let vals = [
            self.d, self.gamma, self.d_par, self.d_perp, self.bz, self.pi_par, self.pi_perp,
            self.depth,
        ];
        if vals.iter().any(|v| !v.is_finite()) {
            return invalid("NV parameters must be finite");
        }
        if self.d <= 0.0 || self.gamma <= 0.0 {
            return invalid("zero-field splitting and gyromagnetic ratio must be positive");
        }
        if self.bz < 0.0 {
            return invalid(format!("Bz must be non-negative, got {}", self.bz));
        }
        if self.depth <= 0.0 {
            return invalid(format!("depth must be positive, got {}", self.depth));
        }
        Ok(())
    }
}

/// Ground-state Hamiltonian in MHz, basis `|+1>, |0>, |-1>`, with the field along the NV axis.
pub fn nv_hamiltonian(p: &NvParams) -> Result<ComplexMatrix> {
    p.validate()?;
    let s = spin_operators(1.0)?;
    let c = |x: f64| Complex64::new(x, 0.0);
    let sz2 = &s.sz * &s.sz;
    let sp2 = &s.s_plus * &s.s_plus;
    let sm2 = &s.s_minus * &s.s_minus;
    let h = sz2 * c(p.d + p.axial_shift()) + &s.sz * c(p.zeeman())
        - (sp2 + sm2) * c(p.transverse_coupling() / 2.0);
    Ok(h)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionFrequencies {
    pub f_0_to_minus1: f64,
    pub f_0_to_plus1: f64,
    pub f_minus1_to_plus1: f64,
}

/// Second-order perturbative transition frequencies in MHz.
pub fn transition_frequencies(p: &NvParams) -> Result<TransitionFrequencies> {
    p.validate()?;
    let x = p.transverse_coupling();
    let z = p.zeeman();
    let b_eff = if x == 0.0 {
        z
    } else {
        if z <= 0.0 {
            return Err(Error::Unsupported(
                "zero axial field with a transverse electric field is the degenerate regime; use exact_transition_frequencies".into(),
            ));
        }
        if z < 10.0 * x.abs() {
            log::warn!(
                "Zeeman splitting {z:.3} MHz is within 10x of the transverse coupling {x:.3} MHz; second-order result is inaccurate"
            );
        }
        z + x * x / (2.0 * z)
    };
    let center = p.d + p.axial_shift();
    Ok(TransitionFrequencies {
        f_0_to_minus1: center - b_eff,
        f_0_to_plus1: center + b_eff,
        f_minus1_to_plus1: 2.0 * b_eff,
    })
}

/// Exact eigenenergies in MHz labelled by dominant `m_s` character.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NvLevels {
    pub plus1: f64,
    pub zero: f64,
    pub minus1: f64,
}

pub fn nv_levels(p: &NvParams) -> Result<NvLevels> {
    let h = nv_hamiltonian(p)?;
    let eig = SymmetricEigen::new(h);
    let mut plus1 = None;
    let mut zero = None;
    let mut minus1 = None;
    for k in 0..3 {
        let v = eig.eigenvectors.column(k);
        let w: Vec<f64> = v.iter().map(|z| z.norm_sqr()).collect();
        let e = eig.eigenvalues[k];
        if w[1] > 0.5 {
            zero = Some(e);
        } else if w[0] > w[2] {
            plus1 = Some(e);
        } else if w[2] > w[0] {
            minus1 = Some(e);
        } else {
            // equal mixture at zero axial field: order by energy
            if minus1.is_none() {
                minus1 = Some(e);
            } else {
                plus1 = Some(e);
            }
        }
    }
    match (plus1, zero, minus1) {
        (Some(plus1), Some(zero), Some(minus1)) => {
            let (plus1, minus1) = if plus1 < minus1 {
                (minus1, plus1)
            } else {
                (plus1, minus1)
            };
            Ok(NvLevels {
                plus1,
                zero,
                minus1,
            })
        }
        _ => Err(Error::Unsupported("could not label NV eigenstates".into())),
    }
}

pub fn exact_transition_frequencies(p: &NvParams) -> Result<TransitionFrequencies> {
    let l = nv_levels(p)?;
    Ok(TransitionFrequencies {
        f_0_to_minus1: l.minus1 - l.zero,
        f_0_to_plus1: l.plus1 - l.zero,
        f_minus1_to_plus1: l.plus1 - l.minus1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_field_transverse_splitting() {
        let p = NvParams {
            pi_perp: 1e6 / 17.0,
            ..Default::default()
        };
        let f = exact_transition_frequencies(&p).unwrap();
        assert!((f.f_minus1_to_plus1 - 2.0).abs() < 1e-9);
        assert!(matches!(transition_frequencies(&p), Err(Error::Unsupported(_))));
    }

    #[test]
    fn low_field_transition() {
        let f = transition_frequencies(&NvParams::with_field(281.0)).unwrap();
        assert!((f.f_0_to_minus1 - 2083.2).abs() < 1e-9);
    }

    #[test]
    fn perturbative_matches_exact_at_high_field() {
        let p = NvParams {
            bz: 382.0,
            pi_perp: 2e6 / 17.0,
            pi_par: 1e6,
            ..Default::default()
        };
        let a = transition_frequencies(&p).unwrap();
        let e = exact_transition_frequencies(&p).unwrap();
        assert!((a.f_0_to_minus1 - e.f_0_to_minus1).abs() < 1e-3);
        assert!((a.f_0_to_plus1 - e.f_0_to_plus1).abs() < 1e-3);
        assert!((a.f_minus1_to_plus1 - e.f_minus1_to_plus1).abs() < 1e-3);
    }

    #[test]
    fn double_quantum_is_blind_to_axial_electric_field() {
        let mut p = NvParams {
            bz: 300.0,
            pi_perp: 3e5,
            ..Default::default()
        };
        let a = transition_frequencies(&p).unwrap();
        p.pi_par = 7.5e5;
        let b = transition_frequencies(&p).unwrap();
        assert_eq!(a.f_minus1_to_plus1.to_bits(), b.f_minus1_to_plus1.to_bits());
        assert!((b.f_0_to_minus1 - a.f_0_to_minus1 - 0.35 * 0.75).abs() < 1e-9);
    }

    #[test]
    fn hamiltonian_basis_order() {
        let h = nv_hamiltonian(&NvParams::with_field(100.0)).unwrap();
        assert!((h[(0, 0)].re - (2870.0 + 280.0)).abs() < 1e-9);
        assert_eq!(h[(1, 1)].re, 0.0);
        assert!((h[(2, 2)].re - (2870.0 - 280.0)).abs() < 1e-9);
    }

    #[test]
    fn rejects_negative_field() {
        assert!(transition_frequencies(&NvParams::with_field(-1.0)).is_err());
    }
}
