use std::f64::consts::PI;
use std::fmt::Write;

use super::lsq::{weights_from_stderr, Problem, Solution};
use crate::engines::CoherenceTrace;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct FitParam {
    pub name: String,
    pub unit: String,
    pub value: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub model: String,
    pub params: Vec<FitParam>,
    /// Unweighted rms of `data - model`.
    pub residual_rms: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Weighted cost after each accepted step.
    pub cost_history: Vec<f64>,
}

impl FitResult {
    pub fn param(&self, name: &str) -> Option<&FitParam> {
        self.params.iter().find(|p| p.name == name)
    }

    /// Value of a named parameter; panics on an unknown name.
    pub fn value(&self, name: &str) -> f64 {
        match self.param(name) {
            Some(p) => p.value,
            None => panic!("fit `{}` has no parameter `{name}`", self.model),
        }
    }

    pub fn stderr(&self, name: &str) -> f64 {
        match self.param(name) {
            Some(p) => p.stderr,
            None => panic!("fit `{}` has no parameter `{name}`", self.model),
        }
    }

    /// Rows `model,param,value,stderr` without a header.
    pub fn csv_rows(&self) -> String {
        let mut s = String::new();
        for p in &self.params {
            let _ = writeln!(s, "{},{},{},{}", self.model, p.name, p.value, p.stderr);
        }
        s
    }

    pub fn to_csv(&self) -> String {
        format!("{FIT_CSV_HEADER}\n{}", self.csv_rows())
    }

    pub fn report(&self) -> String {
        let mut s = format!("fit {}\n", self.model);
        for p in &self.params {
            let _ = writeln!(s, "  {:<10} = {:.6} +/- {:.2e} {}", p.name, p.value, p.stderr, p.unit);
        }
        let _ = writeln!(
            s,
            "  residual_rms = {:.3e}, converged = {}, iterations = {}",
            self.residual_rms, self.converged, self.iterations
        );
        s
    }
}

pub const FIT_CSV_HEADER: &str = "model,param,value,stderr";

/// Several fits concatenated under one CSV header.
pub fn fits_to_csv(fits: &[FitResult]) -> String {
    let mut s = format!("{FIT_CSV_HEADER}\n");
    for f in fits {
        s.push_str(&f.csv_rows());
    }
    s
}

fn finish(
    model: &str,
    names: &[(&str, &str)],
    sol: &Solution,
    f: &dyn Fn(&[f64], f64) -> f64,
    x: &[f64],
    y: &[f64],
) -> FitResult {
    let params = names
        .iter()
        .enumerate()
        .map(|(i, (name, unit))| FitParam {
            name: name.to_string(),
            unit: unit.to_string(),
            value: sol.params[i],
            stderr: sol.stderr(i),
        })
        .collect();
    FitResult {
        model: model.into(),
        params,
        residual_rms: residual_rms(f, &sol.params, x, y),
        converged: sol.converged,
        iterations: sol.iterations,
        cost_history: sol.cost_history.clone(),
    }
}

fn residual_rms(f: &dyn Fn(&[f64], f64) -> f64, p: &[f64], x: &[f64], y: &[f64]) -> f64 {
    let ss: f64 = x.iter().zip(y).map(|(&x, &y)| (y - f(p, x)).powi(2)).sum();
    (ss / x.len() as f64).sqrt()
}

pub fn stretched_exp(a: f64, t2: f64, n: f64, t: f64) -> f64 {
    a * (-(t / t2).powf(n)).exp()
}

/// Fits `A·exp(-(t/T2)^n)` to a decay trace with `n ∈ [0.5, 3.5]`.
pub fn fit_stretched_exp(trace: &CoherenceTrace) -> Result<FitResult> {
    let (x, y) = (&trace.axis, &trace.coherence);
    if x.len() < 6 {
        return Err(Error::InsufficientData(format!(
            "stretched-exponential fit needs at least 6 points, got {}",
            x.len()
        )));
    }
    let hi = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = y.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(hi > 0.8 && lo < 0.3) {
        return Err(Error::InsufficientData(format!(
            "decay spans [{lo:.3}, {hi:.3}], needs to cover >0.8 to <0.3"
        )));
    }
    let a0 = hi.min(1.5);
    let target = a0 / std::f64::consts::E;
    let mut t2_0 = x[x.len() / 2];
    for i in 1..x.len() {
        if y[i] <= target && y[i - 1] > target {
            let frac = (y[i - 1] - target) / (y[i - 1] - y[i]);
            t2_0 = x[i - 1] + frac * (x[i] - x[i - 1]);
            break;
        }
    }
    let t_max = x[x.len() - 1].abs().max(1e-12);
    let f = |p: &[f64], t: f64| stretched_exp(p[0], p[1], p[2], t);
    let w = weights_from_stderr(&trace.stderr);
    let prob = Problem {
        model: &f,
        x,
        y,
        weights: &w,
        lower: &[0.0, t_max * 1e-6, 0.5],
        upper: &[2.0, t_max * 1e3, 3.5],
    };
    let starts: Vec<Vec<f64>> = [0.7, 1.0, 1.6, 2.2, 3.0]
        .iter()
        .map(|&n| vec![a0, t2_0, n])
        .collect();
    let sol = prob.solve(&starts)?;
    Ok(finish(
        "stretched_exp",
        &[("A", ""), ("T2", "us"), ("n", "")],
        &sol,
        &f,
        x,
        y,
    ))
}

pub fn lorentzian(center: f64, hwhm: f64, depth: f64, offset: f64, f: f64) -> f64 {
    let h2 = hwhm * hwhm;
    offset - depth * h2 / ((f - center).powi(2) + h2)
}

/// Fits `offset - depth·hwhm²/((f-center)²+hwhm²)`, detecting dip or peak from the data.
///
/// `depth` is reported as a magnitude; the model name tells the sign.
pub fn fit_lorentzian(spectrum: &CoherenceTrace) -> Result<FitResult> {
    let (x, y) = (&spectrum.axis, &spectrum.coherence);
    let m = x.len();
    if m < 7 {
        return Err(Error::InsufficientData(format!(
            "Lorentzian fit needs at least 7 points, got {m}"
        )));
    }
    let baseline = (y[0] + y[1] + y[m - 2] + y[m - 1]) / 4.0;
    let (imin, imax) = (argmin(y), argmax(y));
    let is_dip = baseline - y[imin] >= y[imax] - baseline;
    let (iext, sign) = if is_dip { (imin, 1.0) } else { (imax, -1.0) };
    if iext == 0 || iext == m - 1 {
        return Err(Error::InvalidInput(
            "no extremum inside the sweep range".into(),
        ));
    }
    let depth0 = (baseline - y[iext]).abs().max(1e-9);
    let half = baseline - sign * depth0 / 2.0;
    let crosses = |i: usize| sign * (y[i] - half) >= 0.0;
    let left = (0..iext).rev().find(|&i| crosses(i)).unwrap_or(0);
    let right = (iext + 1..m).find(|&i| crosses(i)).unwrap_or(m - 1);
    let span = x[m - 1] - x[0];
    let hwhm0 = ((x[right] - x[left]) / 2.0).max(span / (4.0 * m as f64));

    let f = move |p: &[f64], t: f64| lorentzian(p[0], p[1], sign * p[2], p[3], t);
    let w = weights_from_stderr(&spectrum.stderr);
    let prob = Problem {
        model: &f,
        x,
        y,
        weights: &w,
        lower: &[x[0], span * 1e-6, 0.0, -10.0],
        upper: &[x[m - 1], span * 10.0, 20.0, 10.0],
    };
    let starts: Vec<Vec<f64>> = [1.0, 0.5, 2.0, 0.25, 4.0]
        .iter()
        .map(|&k| vec![x[iext], hwhm0 * k, depth0, baseline])
        .collect();
    let sol = prob.solve(&starts)?;
    Ok(finish(
        if is_dip { "lorentzian_dip" } else { "lorentzian_peak" },
        &[("center", "MHz"), ("hwhm", "MHz"), ("depth", ""), ("offset", "")],
        &sol,
        &f,
        x,
        y,
    ))
}

fn argmin(v: &[f64]) -> usize {
    (0..v.len()).fold(0, |b, i| if v[i] < v[b] { i } else { b })
}

fn argmax(v: &[f64]) -> usize {
    (0..v.len()).fold(0, |b, i| if v[i] > v[b] { i } else { b })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RabiFitOptions {
    /// Include the slow Stark-beat factor.
    pub stark_correction: bool,
    /// Use `cos(2π·ω_osc·t)` instead of its second-order Taylor form.
    pub full_cosine: bool,
}

/// `A·cos(2πΩt)·e^{-t/T2R}·S(t) + B`, with `S` the optional Stark factor.
pub fn damped_rabi(
    amplitude: f64,
    omega: f64,
    t2_rabi: f64,
    omega_osc: f64,
    offset: f64,
    full_cosine: bool,
    t: f64,
) -> f64 {
    let beat = if full_cosine {
        (2.0 * PI * omega_osc * t).cos()
    } else {
        1.0 - (2.0 * PI * omega_osc * t).powi(2) / 2.0
    };
    amplitude * (2.0 * PI * omega * t).cos() * (-t / t2_rabi).exp() * beat + offset
}

/// Frequency of the largest periodogram peak between one cycle per span and Nyquist.
pub fn dominant_frequency(t: &[f64], y: &[f64]) -> f64 {
    let m = t.len();
    let mean = y.iter().sum::<f64>() / m as f64;
    let span = t[m - 1] - t[0];
    let dt = span / (m - 1) as f64;
    let (f_lo, f_hi) = (0.5 / span, 0.5 / dt);
    let n_grid = 4000;
    let power = |f: f64| {
        let (mut re, mut im) = (0.0, 0.0);
        for (&ti, &yi) in t.iter().zip(y) {
            let ph = 2.0 * PI * f * ti;
            re += (yi - mean) * ph.cos();
            im -= (yi - mean) * ph.sin();
        }
        re * re + im * im
    };
    let mut best = (f_lo, f64::NEG_INFINITY);
    for k in 0..=n_grid {
        let f = f_lo + (f_hi - f_lo) * k as f64 / n_grid as f64;
        let p = power(f);
        if p > best.1 {
            best = (f, p);
        }
    }
    best.0
}

pub fn fit_damped_rabi(trace: &CoherenceTrace, stark_correction: bool) -> Result<FitResult> {
    fit_damped_rabi_with(
        trace,
        RabiFitOptions {
            stark_correction,
            full_cosine: false,
        },
    )
}

/// Damped Rabi fit reporting `omega_ss` and `omega_osc` in MHz and `t2_rabi` in µs.
pub fn fit_damped_rabi_with(trace: &CoherenceTrace, opts: RabiFitOptions) -> Result<FitResult> {
    let (x, y) = (&trace.axis, &trace.coherence);
    let m = x.len();
    if m < 8 {
        return Err(Error::InsufficientData(format!(
            "Rabi fit needs at least 8 points, got {m}"
        )));
    }
    let span = x[m - 1] - x[0];
    let f0 = dominant_frequency(x, y);
    if f0 * span < 3.0 {
        return Err(Error::InsufficientData(format!(
            "trace covers {:.2} Rabi periods, needs at least 3",
            f0 * span
        )));
    }
    let mean = y.iter().sum::<f64>() / m as f64;
    let a0 = y[0] - mean;
    let full = opts.full_cosine;
    let w = weights_from_stderr(&trace.stderr);
    let t_max = x[m - 1].abs().max(span);

    let (model_name, sol, f): (&str, Solution, Box<dyn Fn(&[f64], f64) -> f64>) =
        if opts.stark_correction {
            let f = move |p: &[f64], t: f64| damped_rabi(p[0], p[1], p[2], p[3], p[4], full, t);
            let prob = Problem {
                model: &f,
                x,
                y,
                weights: &w,
                lower: &[-10.0, 0.5 * f0, 1e-3 * span, 0.0, -10.0],
                upper: &[10.0, 1.5 * f0, 1e3 * t_max, 2.0 / t_max, 10.0],
            };
            let starts = vec![
                vec![a0, f0, span / 3.0, 0.1 / t_max, mean],
                vec![a0, f0, span / 10.0, 0.2 / t_max, mean],
                vec![a0, f0, span, 0.05 / t_max, mean],
                vec![a0, f0, span / 3.0, 0.4 / t_max, mean],
                vec![a0, f0 * 1.005, span / 5.0, 0.15 / t_max, mean],
            ];
            let sol = prob.solve(&starts)?;
            let name = if full { "damped_rabi_stark_cos" } else { "damped_rabi_stark" };
            (name, sol, Box::new(f))
        } else {
            let f = move |p: &[f64], t: f64| damped_rabi(p[0], p[1], p[2], 0.0, p[3], full, t);
            let prob = Problem {
                model: &f,
                x,
                y,
                weights: &w,
                lower: &[-10.0, 0.5 * f0, 1e-3 * span, -10.0],
                upper: &[10.0, 1.5 * f0, 1e3 * t_max, 10.0],
            };
            let starts = vec![
                vec![a0, f0, span / 3.0, mean],
                vec![a0, f0, span / 10.0, mean],
                vec![a0, f0, span, mean],
                vec![a0, f0 * 0.995, span / 3.0, mean],
                vec![a0, f0 * 1.005, span / 5.0, mean],
            ];
            let mut sol = prob.solve(&starts)?;
            // report omega_osc as a fixed zero in the same slot order as the corrected model
            sol.params.insert(3, 0.0);
            let n = sol.covariance.nrows();
            let mut cov = nalgebra::DMatrix::zeros(n + 1, n + 1);
            for i in 0..n + 1 {
                for j in 0..n + 1 {
                    if i != 3 && j != 3 {
                        let (a, b) = (i - usize::from(i > 3), j - usize::from(j > 3));
                        cov[(i, j)] = sol.covariance[(a, b)];
                    }
                }
            }
            sol.covariance = cov;
            let g = move |p: &[f64], t: f64| damped_rabi(p[0], p[1], p[2], 0.0, p[4], full, t);
            ("damped_rabi", sol, Box::new(g))
        };
    Ok(finish(
        model_name,
        &[
            ("amplitude", ""),
            ("omega_ss", "MHz"),
            ("t2_rabi", "us"),
            ("omega_osc", "MHz"),
            ("offset", ""),
        ],
        &sol,
        f.as_ref(),
        x,
        y,
    ))
}

/// Log-log least squares `y = prefactor·x^exponent`.
pub fn fit_power_law(x: &[f64], y: &[f64]) -> Result<FitResult> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    if x.len() < 3 {
        return Err(Error::InsufficientData("power-law fit needs at least 3 points".into()));
    }
    if x.iter().chain(y).any(|&v| !(v > 0.0)) {
        return Err(Error::InvalidInput("power-law fit needs positive data".into()));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput("power-law fit needs distinct x values".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let ss: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(a, b)| (b - icpt - slope * a).powi(2))
        .sum();
    let s2 = ss / (n - 2.0);
    let slope_err = (s2 / sxx).sqrt();
    let icpt_err = (s2 * (1.0 / n + mx * mx / sxx)).sqrt();
    let prefactor = icpt.exp();
    Ok(FitResult {
        model: "power_law".into(),
        params: vec![
            FitParam {
                name: "exponent".into(),
                unit: String::new(),
                value: slope,
                stderr: slope_err,
            },
            FitParam {
                name: "prefactor".into(),
                unit: String::new(),
                value: prefactor,
                stderr: prefactor * icpt_err,
            },
        ],
        residual_rms: (ss / n).sqrt(),
        converged: true,
        iterations: 1,
        cost_history: vec![ss],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn trace(x: Vec<f64>, y: Vec<f64>) -> CoherenceTrace {
        let n = x.len();
        CoherenceTrace::from_columns("x", x, y, vec![0.0; n]).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn stretched_exp_round_trip() {
        let x: Vec<f64> = (1..=12).map(|i| i as f64 * 10.0).collect();
        let y = x.iter().map(|&t| stretched_exp(1.0, 50.0, 1.5, t)).collect();
        let fit = fit_stretched_exp(&trace(x, y)).unwrap();
        assert!(fit.converged);
        assert!(rel(fit.value("A"), 1.0) < 1e-3);
        assert!(rel(fit.value("T2"), 50.0) < 1e-3);
        assert!(rel(fit.value("n"), 1.5) < 1e-3);
        assert!(fit.cost_history.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn stretched_exp_with_noise() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let noise = Normal::new(0.0, 0.01).unwrap();
        let x: Vec<f64> = (1..=24).map(|i| i as f64 * 6.0).collect();
        let y: Vec<f64> = x
            .iter()
            .map(|&t| stretched_exp(1.0, 65.0, 1.6, t) + noise.sample(&mut rng))
            .collect();
        let t = CoherenceTrace::from_columns("x", x, y, vec![0.01; 24]).unwrap();
        let fit = fit_stretched_exp(&t).unwrap();
        assert!(rel(fit.value("T2"), 65.0) < 0.02, "{}", fit.report());
        assert!(fit.stderr("T2").is_finite() && fit.stderr("T2") > 0.0);
    }

    #[test]
    fn stretched_exp_span_error() {
        let x: Vec<f64> = (1..=10).map(|i| i as f64).collect();
        let y = x.iter().map(|&t| 1.0 - 0.005 * t).collect();
        assert!(matches!(
            fit_stretched_exp(&trace(x, y)),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn lorentzian_dip_round_trip() {
        let x: Vec<f64> = (0..41).map(|i| 1031.0 + 2.0 * i as f64).collect();
        let y = x.iter().map(|&f| lorentzian(1071.0, 10.0, 0.6, 0.8, f)).collect();
        let fit = fit_lorentzian(&trace(x, y)).unwrap();
        assert_eq!(fit.model, "lorentzian_dip");
        assert!(rel(fit.value("center"), 1071.0) < 1e-3);
        assert!(rel(fit.value("hwhm"), 10.0) < 5e-3);
        assert!(rel(fit.value("depth"), 0.6) < 1e-3);
    }

    #[test]
    fn lorentzian_peak_detected() {
        let x: Vec<f64> = (0..31).map(|i| 760.0 + 2.0 * i as f64).collect();
        let y = x.iter().map(|&f| lorentzian(788.0, 8.0, -0.3, 0.2, f)).collect();
        let fit = fit_lorentzian(&trace(x, y)).unwrap();
        assert_eq!(fit.model, "lorentzian_peak");
        assert!(rel(fit.value("center"), 788.0) < 1e-4);
        assert!(rel(fit.value("depth"), 0.3) < 1e-3);
    }

    #[test]
    fn lorentzian_monotonic_error() {
        let x: Vec<f64> = (0..11).map(|i| i as f64).collect();
        let y = x.iter().map(|&f| 1.0 - 0.05 * f).collect();
        assert!(fit_lorentzian(&trace(x, y)).is_err());
    }

    fn rabi_data(omega_osc: f64) -> CoherenceTrace {
        let x: Vec<f64> = (0..201).map(|i| i as f64 * 0.005).collect();
        let y = x
            .iter()
            .map(|&t| damped_rabi(0.5, 13.7, 0.2, omega_osc, 0.1, false, t))
            .collect();
        trace(x, y)
    }

    #[test]
    fn rabi_round_trip_with_stark() {
        let fit = fit_damped_rabi(&rabi_data(0.26), true).unwrap();
        assert!(rel(fit.value("omega_ss"), 13.7) < 0.02);
        assert!(rel(fit.value("t2_rabi"), 0.2) < 0.02);
        assert!(rel(fit.value("omega_osc"), 0.26) < 0.02, "{}", fit.report());
    }

    #[test]
    fn rabi_round_trip_exact() {
        let fit = fit_damped_rabi(&rabi_data(0.0), false).unwrap();
        assert!(rel(fit.value("omega_ss"), 13.7) < 1e-3);
        assert!(rel(fit.value("t2_rabi"), 0.2) < 1e-3);
        assert_eq!(fit.value("omega_osc"), 0.0);
    }

    #[test]
    fn uncorrected_fit_is_worse_on_stark_data() {
        let data = rabi_data(0.26);
        let with = fit_damped_rabi(&data, true).unwrap();
        let without = fit_damped_rabi(&data, false).unwrap();
        assert!(without.residual_rms > with.residual_rms);
        assert!(rel(without.value("t2_rabi"), 0.2) > rel(with.value("t2_rabi"), 0.2));
    }

    #[test]
    fn rabi_needs_three_periods() {
        let x: Vec<f64> = (0..40).map(|i| i as f64 * 0.002).collect();
        let y = x
            .iter()
            .map(|&t| damped_rabi(0.5, 13.7, 0.2, 0.0, 0.0, false, t))
            .collect();
        assert!(matches!(
            fit_damped_rabi(&trace(x, y), false),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn full_cosine_variant() {
        let x: Vec<f64> = (0..401).map(|i| i as f64 * 0.005).collect();
        let y = x
            .iter()
            .map(|&t| damped_rabi(0.5, 13.7, 0.6, 0.26, 0.0, true, t))
            .collect();
        let opts = RabiFitOptions {
            stark_correction: true,
            full_cosine: true,
        };
        let fit = fit_damped_rabi_with(&trace(x, y), opts).unwrap();
        assert!(rel(fit.value("omega_osc"), 0.26) < 1e-3, "{}", fit.report());
    }

    #[test]
    fn power_law_exact() {
        let x = [4.0, 6.0, 9.0, 13.0, 17.0];
        let y: Vec<f64> = x.iter().map(|d: &f64| 3e4 * d.powf(-4.0)).collect();
        let fit = fit_power_law(&x, &y).unwrap();
        assert!((fit.value("exponent") + 4.0).abs() < 1e-12);
        assert!(rel(fit.value("prefactor"), 3e4) < 1e-10);
    }

    #[test]
    fn csv_rows_schema() {
        let x = [1.0, 2.0, 3.0];
        let fit = fit_power_law(&x, &[1.0, 4.0, 9.0]).unwrap();
        let csv = fit.to_csv();
        assert!(csv.starts_with("model,param,value,stderr\npower_law,exponent,"));
    }
}
