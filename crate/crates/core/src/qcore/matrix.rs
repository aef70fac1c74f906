use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

/// Absolute tolerance on `max |A - A^dagger|` for a matrix to count as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn dagger(a: &ComplexMatrix) -> ComplexMatrix {
    a.adjoint()
}

pub fn trace(a: &ComplexMatrix) -> Complex64 {
    a.diagonal().iter().sum()
}

pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a * b - b * a
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn hermitian_deviation(a: &ComplexMatrix) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn require_hermitian(a: &ComplexMatrix) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: a.ncols(),
        });
    }
    let dev = hermitian_deviation(a);
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian(dev));
    }
    Ok(())
}

/// Places `op` on subsystem `slot` of a register with local dimensions `dims`,
/// with identities on every other slot.
pub fn embed(op: &ComplexMatrix, slot: usize, dims: &[usize]) -> Result<ComplexMatrix> {
    if slot >= dims.len() {
        return Err(Error::InvalidInput(format!(
            "slot {slot} out of range for {} subsystems",
            dims.len()
        )));
    }
    if op.nrows() != dims[slot] || op.ncols() != dims[slot] {
        return Err(Error::DimensionMismatch {
            expected: dims[slot],
            found: op.nrows(),
        });
    }
    let mut out = identity(1);
    for (k, &d) in dims.iter().enumerate() {
        out = if k == slot {
            kron(&out, op)
        } else {
            kron(&out, &identity(d))
        };
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn kron_dimensions_and_entries() {
        let a = ComplexMatrix::from_row_slice(2, 2, &[c(1., 0.), c(2., 0.), c(3., 0.), c(4., 0.)]);
        let b = identity(3);
        let k = kron(&a, &b);
        assert_eq!(k.shape(), (6, 6));
        assert_eq!(k[(0, 3)], c(2., 0.));
        assert_eq!(k[(4, 1)], c(3., 0.));
    }

    #[test]
    fn embed_rejects_bad_slot_and_dim() {
        let op = identity(2);
        assert!(embed(&op, 3, &[3, 2]).is_err());
        assert!(embed(&op, 0, &[3, 2]).is_err());
        assert_eq!(embed(&op, 1, &[3, 2]).unwrap().shape(), (6, 6));
    }

    #[test]
    fn hermitian_check() {
        let mut a = identity(2);
        a[(0, 1)] = c(0., 1.);
        assert!(require_hermitian(&a).is_err());
        a[(1, 0)] = c(0., -1.);
        assert!(require_hermitian(&a).is_ok());
    }
}
