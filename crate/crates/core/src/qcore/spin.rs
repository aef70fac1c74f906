use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::{invalid, Result};

/// Angular-momentum matrices in the `|m = s>, |m = s-1>, ..., |m = -s>` basis.
#[derive(Debug, Clone)]
pub struct SpinOps {
    pub s: f64,
    pub sx: ComplexMatrix,
    pub sy: ComplexMatrix,
    pub sz: ComplexMatrix,
    pub s_plus: ComplexMatrix,
    pub s_minus: ComplexMatrix,
}

impl SpinOps {
    pub fn dim(&self) -> usize {
        self.sz.nrows()
    }
}

pub fn spin_operators(s: f64) -> Result<SpinOps> {
    if !(s == 0.5 || s == 1.0) {
        return invalid(format!("spin {s} not supported (only 1/2 and 1)"));
    }
    let dim = (2.0 * s) as usize + 1;
    let mut sz = ComplexMatrix::zeros(dim, dim);
    let mut s_plus = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        let m = s - i as f64;
        sz[(i, i)] = Complex64::new(m, 0.0);
        if i > 0 {
            s_plus[(i - 1, i)] = Complex64::new((s * (s + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
        }
    }
    let s_minus = s_plus.adjoint();
    let sx = (&s_plus + &s_minus) * Complex64::new(0.5, 0.0);
    let sy = (&s_plus - &s_minus) * Complex64::new(0.0, -0.5);
    Ok(SpinOps {
        s,
        sx,
        sy,
        sz,
        s_plus,
        s_minus,
    })
}
