//! Exact first and second moments of a driven surface spin under a stochastic
//! Bloch unravelling: precession about `(rabi cos phi, rabi sin phi, detuning)`,
//! dephasing jumps `(x, y, z) -> (-x, -y, z)` at rate `kappa` and telegraph
//! flips `m -> -m` at rate `lambda`. Alongside the Bloch vector the propagator
//! carries the moments of `I = int c(t) z(t) dt`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Matrix3};

const DIM: usize = 14;
const MU: usize = 0;
const MM: usize = 3;
const N: usize = 9;
const Q: usize = 12;
const J: usize = 13;

// (row, col) of the six independent entries of the symmetric second-moment matrix
const SYM: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)];

fn sym_index(i: usize, j: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    SYM.iter().position(|&p| p == (a, b)).unwrap()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveParams {
    pub rabi: f64,
    pub phase: f64,
    pub detuning: f64,
    pub kappa: f64,
    pub lambda: f64,
}

impl DriveParams {
    fn precession(&self) -> Matrix3<f64> {
        let w = [
            2.0 * PI * self.rabi * self.phase.cos(),
            2.0 * PI * self.rabi * self.phase.sin(),
            2.0 * PI * self.detuning,
        ];
        Matrix3::new(0.0, -w[2], w[1], w[2], 0.0, -w[0], -w[1], w[0], 0.0)
    }

    /// Generator of the mean Bloch vector.
    pub fn mean_generator(&self) -> Matrix3<f64> {
        let mut a = self.precession();
        a[(0, 0)] -= 2.0 * self.kappa;
        a[(1, 1)] -= 2.0 * self.kappa;
        for k in 0..3 {
            a[(k, k)] -= 2.0 * self.lambda;
        }
        a
    }

    fn generator(&self, c: f64) -> DMatrix<f64> {
        let mut g = DMatrix::zeros(DIM, DIM);
        let a = self.mean_generator();
        let w = self.precession();
        let p = Matrix3::from_diagonal(&nalgebra::Vector3::new(-1.0, -1.0, 1.0));
        for i in 0..3 {
            for j in 0..3 {
                g[(MU + i, MU + j)] = a[(i, j)];
                g[(N + i, N + j)] = a[(i, j)];
            }
        }
        for (k, &(r, s)) in SYM.iter().enumerate() {
            let mut e = Matrix3::zeros();
            e[(r, s)] = 1.0;
            e[(s, r)] = 1.0;
            let d = w * e + e * w.transpose() + (p * e * p - e) * self.kappa;
            for (k2, &(r2, s2)) in SYM.iter().enumerate() {
                g[(MM + k2, MM + k)] = d[(r2, s2)];
            }
        }
        for i in 0..3 {
            g[(N + i, MM + sym_index(i, 2))] += c;
        }
        g[(Q, N + 2)] = 2.0 * c;
        g[(J, MU + 2)] = c;
        g
    }
}

/// Statistics of `I` and of the final `z` for a spin starting at `z = +1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowStats {
    pub mean: f64,
    pub variance: f64,
    pub z_end: f64,
}

/// Propagates through consecutive pieces `(duration, c)` with fixed drive parameters.
pub fn window_stats(params: &DriveParams, pieces: &[(f64, f64)]) -> WindowStats {
    let mut s = DVector::zeros(DIM);
    s[MU + 2] = 1.0;
    s[MM + sym_index(2, 2)] = 1.0;
    for &(h, c) in pieces {
        if h > 0.0 {
            s = (params.generator(c) * h).exp() * s;
        }
    }
    WindowStats {
        mean: s[J],
        variance: (s[Q] - s[J] * s[J]).max(0.0),
        z_end: s[MU + 2],
    }
}

/// Mean Bloch vector after `t` from `z = +1`.
pub fn mean_bloch(params: &DriveParams, t: f64) -> [f64; 3] {
    let m = (params.mean_generator() * t).exp() * nalgebra::Vector3::new(0.0, 0.0, 1.0);
    [m[0], m[1], m[2]]
}
