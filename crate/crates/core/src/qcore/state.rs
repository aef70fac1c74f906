use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use super::matrix::{hermitian_deviation, trace, ComplexMatrix, ComplexVector};
use crate::error::{Error, Result};

const NORM_TOL: f64 = 1e-10;

/// A pure state or density matrix on a tensor-product register.
#[derive(Debug, Clone)]
pub enum QuantumState {
    Pure { psi: ComplexVector, dims: Vec<usize> },
    Mixed { rho: ComplexMatrix, dims: Vec<usize> },
}

fn total_dim(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::InvalidState(format!("bad subsystem dims {dims:?}")));
    }
    Ok(dims.iter().product())
}

impl QuantumState {
    pub fn pure(psi: ComplexVector, dims: Vec<usize>) -> Result<Self> {
        let d = total_dim(&dims)?;
        if psi.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: psi.len(),
            });
        }
        let n = psi.norm();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("state norm {n}")));
        }
        Ok(QuantumState::Pure { psi, dims })
    }

    pub fn mixed(rho: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        let d = total_dim(&dims)?;
        if rho.nrows() != d || rho.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: rho.nrows(),
            });
        }
        let dev = hermitian_deviation(&rho);
        if dev > NORM_TOL {
            return Err(Error::InvalidState(format!("density matrix not Hermitian ({dev:e})")));
        }
        let tr = trace(&rho);
        if (tr.re - 1.0).abs() > NORM_TOL || tr.im.abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        let min_eig = SymmetricEigen::new(rho.clone())
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -NORM_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig:e}")));
        }
        Ok(QuantumState::Mixed { rho, dims })
    }

    /// Basis state `index` of the full register.
    pub fn basis(index: usize, dims: Vec<usize>) -> Result<Self> {
        let d = total_dim(&dims)?;
        if index >= d {
            return Err(Error::InvalidState(format!("basis index {index} >= {d}")));
        }
        let mut psi = ComplexVector::zeros(d);
        psi[index] = Complex64::new(1.0, 0.0);
        Ok(QuantumState::Pure { psi, dims })
    }

    pub fn dims(&self) -> &[usize] {
        match self {
            QuantumState::Pure { dims, .. } | QuantumState::Mixed { dims, .. } => dims,
        }
    }

    pub fn dim(&self) -> usize {
        self.dims().iter().product()
    }

    pub fn density(&self) -> ComplexMatrix {
        match self {
            QuantumState::Pure { psi, .. } => psi * psi.adjoint(),
            QuantumState::Mixed { rho, .. } => rho.clone(),
        }
    }

    pub fn populations(&self) -> Vec<f64> {
        match self {
            QuantumState::Pure { psi, .. } => psi.iter().map(|z| z.norm_sqr()).collect(),
            QuantumState::Mixed { rho, .. } => rho.diagonal().iter().map(|z| z.re).collect(),
        }
    }

    pub fn expect(&self, op: &ComplexMatrix) -> Result<Complex64> {
        if op.nrows() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: op.nrows(),
            });
        }
        Ok(match self {
            QuantumState::Pure { psi, .. } => psi.dotc(&(op * psi)),
            QuantumState::Mixed { rho, .. } => trace(&(op * rho)),
        })
    }

    pub fn trace(&self) -> f64 {
        match self {
            QuantumState::Pure { psi, .. } => psi.norm_squared(),
            QuantumState::Mixed { rho, .. } => trace(rho).re,
        }
    }
}
