//! Exact joint updates of an Ornstein-Uhlenbeck process and its time integral.

use rand::Rng;
use rand_distr::StandardNormal;

/// Stationary OU process with standard deviation `rms` and correlation time `tau_c`.
/// An infinite `tau_c` is a static random offset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ou {
    pub rms: f64,
    pub tau_c: f64,
}

/// Precomputed update over an interval `h`:
/// `x1 = decay x0 + sx g1`, `I = gain x0 + cross g1 + si g2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OuStep {
    decay: f64,
    gain: f64,
    sx: f64,
    cross: f64,
    si: f64,
}

/// `2u - 3 + 4 e^-u - e^-2u`, accurate for small `u`.
pub fn echo_kernel(u: f64) -> f64 {
    if u < 1e-3 {
        u * u * u * (2.0 / 3.0 - u / 2.0 + 7.0 * u * u / 30.0)
    } else {
        2.0 * u - 3.0 + 4.0 * (-u).exp() - (-2.0 * u).exp()
    }
}

impl Ou {
    pub fn is_active(&self) -> bool {
        self.rms > 0.0
    }

    pub fn step(&self, h: f64) -> OuStep {
        let v = self.rms * self.rms;
        if !self.tau_c.is_finite() {
            return OuStep {
                decay: 1.0,
                gain: h,
                sx: 0.0,
                cross: 0.0,
                si: 0.0,
            };
        }
        let th = 1.0 / self.tau_c;
        let u = h * th;
        let om = -(-u).exp_m1();
        let var_x = v * (-(-2.0 * u).exp_m1());
        let var_i = v * echo_kernel(u) / (th * th);
        let cov = v * om * om / th;
        let sx = var_x.sqrt();
        let cross = if sx > 0.0 { cov / sx } else { 0.0 };
        let si = (var_i - cross * cross).max(0.0).sqrt();
        OuStep {
            decay: 1.0 - om,
            gain: om / th,
            sx,
            cross,
            si,
        }
    }

    pub fn sample_stationary<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.rms * rng.sample::<f64, _>(StandardNormal)
    }
}

impl OuStep {
    /// Returns `(x1, integral)` and always consumes two normal deviates.
    pub fn advance<R: Rng + ?Sized>(&self, x0: f64, rng: &mut R) -> (f64, f64) {
        let g1: f64 = rng.sample(StandardNormal);
        let g2: f64 = rng.sample(StandardNormal);
        (
            self.decay * x0 + self.sx * g1,
            self.gain * x0 + self.cross * g1 + self.si * g2,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn kernels_are_continuous() {
        for u in [9.9e-4f64, 1.0001e-3] {
            let exact = 2.0 * u - 3.0 + 4.0 * (-u).exp() - (-2.0 * u).exp();
            assert!((echo_kernel(u) - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn sampled_integral_matches_variance() {
        let ou = Ou { rms: 2.0, tau_c: 0.5 };
        let h = 0.8;
        let st = ou.step(h);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 200_000;
        let (mut s_i, mut s_i2, mut s_x2, mut s_xi) = (0.0, 0.0, 0.0, 0.0);
        for _ in 0..n {
            let x0 = ou.sample_stationary(&mut rng);
            let (x1, i) = st.advance(x0, &mut rng);
            s_i += i;
            s_i2 += i * i;
            s_x2 += x1 * x1;
            s_xi += x0 * i;
        }
        let n = n as f64;
        let u = h / ou.tau_c;
        let var_i = 2.0 * 4.0 * ou.tau_c * ou.tau_c * (u - 1.0 + (-u).exp());
        assert!((s_i / n).abs() < 0.02);
        assert!((s_i2 / n - var_i).abs() / var_i < 0.02);
        assert!((s_x2 / n - 4.0).abs() < 0.05);
        let cov = 4.0 * ou.tau_c * (1.0 - (-u).exp());
        assert!((s_xi / n - cov).abs() / cov < 0.03);
    }
}
