use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 200;

const LAMBDA_INIT: f64 = 1e-3;
const LAMBDA_FACTOR: f64 = 10.0;
const LAMBDA_MAX: f64 = 1e16;

/// Weighted least-squares problem `min Σ w_i (y_i - f(x_i; p))²` with box bounds.
pub struct Problem<'a> {
    pub model: &'a dyn Fn(&[f64], f64) -> f64,
    pub x: &'a [f64],
    pub y: &'a [f64],
    pub weights: &'a [f64],
    pub lower: &'a [f64],
    pub upper: &'a [f64],
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub params: Vec<f64>,
    /// Jacobian covariance scaled by the reduced chi-square.
    pub covariance: DMatrix<f64>,
    pub cost: f64,
    /// Cost after every accepted step, starting with the initial cost.
    pub cost_history: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub start_index: usize,
}

impl Solution {
    pub fn stderr(&self, i: usize) -> f64 {
        self.covariance[(i, i)].max(0.0).sqrt()
    }
}

/// Weights `1/σ²`, or uniform weights when any σ is not positive.
pub fn weights_from_stderr(stderr: &[f64]) -> Vec<f64> {
    if stderr.iter().all(|&s| s > 0.0 && s.is_finite()) {
        stderr.iter().map(|s| 1.0 / (s * s)).collect()
    } else {
        vec![1.0; stderr.len()]
    }
}

impl Problem<'_> {
    fn clamp(&self, p: &mut [f64]) {
        for (i, v) in p.iter_mut().enumerate() {
            *v = v.clamp(self.lower[i], self.upper[i]);
        }
    }

    fn residuals(&self, p: &[f64]) -> DVector<f64> {
        DVector::from_iterator(
            self.x.len(),
            self.x
                .iter()
                .zip(self.y)
                .zip(self.weights)
                .map(|((&x, &y), &w)| w.sqrt() * (y - (self.model)(p, x))),
        )
    }

    fn cost(&self, p: &[f64]) -> f64 {
        let c = self.residuals(p).norm_squared();
        if c.is_finite() {
            c
        } else {
            f64::INFINITY
        }
    }

    /// Central-difference Jacobian of the weighted model values.
    fn jacobian(&self, p: &[f64]) -> DMatrix<f64> {
        let m = self.x.len();
        let mut jac = DMatrix::zeros(m, p.len());
        let mut q = p.to_vec();
        for k in 0..p.len() {
            let h = 1e-6 * p[k].abs().max(1e-6);
            let (lo, hi) = (p[k] - h, p[k] + h);
            q[k] = hi;
            let fp: Vec<f64> = self.x.iter().map(|&x| (self.model)(&q, x)).collect();
            q[k] = lo;
            let fm: Vec<f64> = self.x.iter().map(|&x| (self.model)(&q, x)).collect();
            q[k] = p[k];
            for i in 0..m {
                jac[(i, k)] = self.weights[i].sqrt() * (fp[i] - fm[i]) / (hi - lo);
            }
        }
        jac
    }

    fn check(&self, n_params: usize) -> Result<()> {
        if self.y.len() != self.x.len() || self.weights.len() != self.x.len() {
            return Err(Error::DimensionMismatch {
                expected: self.x.len(),
                found: self.y.len().min(self.weights.len()),
            });
        }
        if self.lower.len() != n_params || self.upper.len() != n_params {
            return Err(Error::DimensionMismatch {
                expected: n_params,
                found: self.lower.len(),
            });
        }
        if self.x.len() <= n_params {
            return Err(Error::InsufficientData(format!(
                "{} points for {} parameters",
                self.x.len(),
                n_params
            )));
        }
        Ok(())
    }

    /// Levenberg-damped Gauss-Newton from a single start.
    pub fn solve_from(&self, start: &[f64]) -> Result<Solution> {
        let n = start.len();
        self.check(n)?;
        let mut p = start.to_vec();
        self.clamp(&mut p);
        let mut cost = self.cost(&p);
        if !cost.is_finite() {
            return Err(Error::NonConvergence("model is not finite at the start point".into()));
        }
        let mut history = vec![cost];
        let mut lambda = LAMBDA_INIT;
        let mut converged = false;
        let mut iterations = 0;

        while iterations < MAX_ITERATIONS {
            iterations += 1;
            let r = self.residuals(&p);
            let jac = self.jacobian(&p);
            let jtj = jac.transpose() * &jac;
            let g = jac.transpose() * &r;
            let mut accepted = false;
            while lambda <= LAMBDA_MAX {
                let mut a = jtj.clone();
                for k in 0..n {
                    a[(k, k)] += lambda * jtj[(k, k)].max(1e-12);
                }
                let Some(step) = a.cholesky().map(|c| c.solve(&g)) else {
                    lambda *= LAMBDA_FACTOR;
                    continue;
                };
                let mut trial: Vec<f64> = p.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
                self.clamp(&mut trial);
                let trial_cost = self.cost(&trial);
                if trial_cost < cost {
                    let rel_step = p
                        .iter()
                        .zip(&trial)
                        .map(|(a, b)| (a - b).abs() / a.abs().max(1e-12))
                        .fold(0.0, f64::max);
                    let drop = cost - trial_cost;
                    p = trial;
                    cost = trial_cost;
                    history.push(cost);
                    lambda = (lambda / LAMBDA_FACTOR).max(1e-12);
                    accepted = true;
                    if rel_step < 1e-9 || drop <= 1e-12 * cost || cost < 1e-28 {
                        converged = true;
                    }
                    break;
                }
                lambda *= LAMBDA_FACTOR;
            }
            if !accepted {
                // no descent direction left at any damping
                converged = true;
            }
            if converged {
                break;
            }
        }

        let m = self.x.len();
        let jac = self.jacobian(&p);
        let jtj = jac.transpose() * &jac;
        let dof = (m - n) as f64;
        let scale = if cost > 0.0 { cost / dof } else { 0.0 };
        // invert with unit diagonal so parameters of very different scale stay well conditioned
        let d: Vec<f64> = (0..n)
            .map(|k| {
                let v = jtj[(k, k)];
                if v > 0.0 {
                    1.0 / v.sqrt()
                } else {
                    1.0
                }
            })
            .collect();
        let scaled = DMatrix::from_fn(n, n, |i, j| jtj[(i, j)] * d[i] * d[j]);
        let covariance = match scaled.clone().cholesky() {
            Some(c) => Some(c.inverse()),
            None => scaled.pseudo_inverse(1e-14).ok(),
        }
        .map(|inv| DMatrix::from_fn(n, n, |i, j| inv[(i, j)] * d[i] * d[j] * scale))
        .unwrap_or_else(|| DMatrix::from_element(n, n, f64::NAN));
        Ok(Solution {
            params: p,
            covariance,
            cost,
            cost_history: history,
            converged,
            iterations,
            start_index: 0,
        })
    }

    /// Runs every start and keeps the lowest cost, ties resolved by start index.
    pub fn solve(&self, starts: &[Vec<f64>]) -> Result<Solution> {
        let mut best: Option<Solution> = None;
        for (i, s) in starts.iter().enumerate() {
            let mut sol = match self.solve_from(s) {
                Ok(sol) => sol,
                Err(Error::NonConvergence(_)) => continue,
                Err(e) => return Err(e),
            };
            sol.start_index = i;
            let better = match &best {
                None => true,
                Some(b) => sol.cost < b.cost,
            };
            if better {
                best = Some(sol);
            }
        }
        let best = best.ok_or_else(|| Error::NonConvergence("no start point gave a finite cost".into()))?;
        if !best.converged {
            return Err(Error::NonConvergence(format!(
                "no convergence after {MAX_ITERATIONS} iterations"
            )));
        }
        Ok(best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exponential() {
        let x: Vec<f64> = (0..20).map(|i| i as f64 * 0.5).collect();
        let y: Vec<f64> = x.iter().map(|t| 2.0 * (-t / 3.0f64).exp()).collect();
        let w = vec![1.0; x.len()];
        let f = |p: &[f64], t: f64| p[0] * (-t / p[1]).exp();
        let prob = Problem {
            model: &f,
            x: &x,
            y: &y,
            weights: &w,
            lower: &[0.0, 1e-3],
            upper: &[10.0, 100.0],
        };
        let sol = prob.solve(&[vec![1.0, 1.0], vec![1.0, 10.0]]).unwrap();
        assert!(sol.converged);
        assert!((sol.params[0] - 2.0).abs() < 1e-8);
        assert!((sol.params[1] - 3.0).abs() < 1e-8);
        assert!(sol.cost_history.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn covariance_matches_linear_regression() {
        // straight line with known residuals: compare against the closed-form slope error
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let noise = [0.1, -0.2, 0.05, 0.0, 0.15, -0.1, -0.05, 0.2, -0.15, 0.0];
        let y: Vec<f64> = x.iter().zip(noise).map(|(x, e)| 1.0 + 2.0 * x + e).collect();
        let w = vec![1.0; 10];
        let f = |p: &[f64], t: f64| p[0] + p[1] * t;
        let prob = Problem {
            model: &f,
            x: &x,
            y: &y,
            weights: &w,
            lower: &[-1e9, -1e9],
            upper: &[1e9, 1e9],
        };
        let sol = prob.solve(&[vec![0.0, 1.0]]).unwrap();
        let n = 10.0;
        let mx = x.iter().sum::<f64>() / n;
        let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
        let s2 = sol.cost / (n - 2.0);
        let slope_err = (s2 / sxx).sqrt();
        assert!((sol.stderr(1) - slope_err).abs() < 1e-6 * slope_err);
    }

    #[test]
    fn bounds_are_respected() {
        let x: Vec<f64> = (0..8).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|t| 5.0 * t).collect();
        let w = vec![1.0; 8];
        let f = |p: &[f64], t: f64| p[0] * t;
        let prob = Problem {
            model: &f,
            x: &x,
            y: &y,
            weights: &w,
            lower: &[0.0],
            upper: &[3.0],
        };
        let sol = prob.solve(&[vec![1.0]]).unwrap();
        assert!(sol.params[0] <= 3.0);
        assert!((sol.params[0] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn too_few_points() {
        let f = |p: &[f64], t: f64| p[0] * t;
        let prob = Problem {
            model: &f,
            x: &[1.0],
            y: &[1.0],
            weights: &[1.0],
            lower: &[0.0],
            upper: &[1.0],
        };
        assert!(matches!(prob.solve(&[vec![0.5]]), Err(Error::InsufficientData(_))));
    }
}
