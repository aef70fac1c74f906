use std::fmt::Write;

use super::config::{Experiment, ExperimentConfig, Spacing};
use crate::analysis::{
    decoupled_rate, density_from_stats, density_lower_bound, density_upper_bound, dq_sq_ratio_with_tolerance,
    enhancement, fit_damped_rabi_with, fit_lorentzian, fit_power_law, fit_stretched_exp,
    linewidth_fwhm_from_density, second_moment, sensitivity_curve, stark_shift, stark_shift_leading,
    DecayFit, FitResult, RabiFitOptions, StarkInputs,
};
use crate::engines::{sweep, CoherenceTrace, EngineConfig};
use crate::error::{Error, Result};
use crate::model::{
    default_nv_axis, sample_bath, surface_spin_larmor, NvParams, SpinBathSample, SurfaceSpinParams,
    MAGIC_ANGLE,
};
use crate::pulses::{
    build_decoupling, build_deer, with_continuous_drive, Basis, PulseCalibration, PulseSequence,
    DEER_DEAD_TIME,
};

/// Everything an experiment produces before it is written to disk.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    /// Labelled traces; the first is the primary dataset.
    pub traces: Vec<(String, CoherenceTrace)>,
    /// Non-trace results as a CSV table, used as `data.csv` when present.
    pub table: Option<String>,
    pub fits: Vec<FitResult>,
    /// Named scalar results, in report order.
    pub summary: Vec<(String, f64)>,
    pub notes: Vec<String>,
}

impl Outcome {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.summary.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }

    fn put(&mut self, name: impl Into<String>, value: f64) {
        self.summary.push((name.into(), value));
    }

    pub fn report(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.summary {
            let _ = writeln!(s, "{k:<32} {v:.6}");
        }
        for n in &self.notes {
            let _ = writeln!(s, "{n}");
        }
        for f in &self.fits {
            s.push('\n');
            s.push_str(&f.report());
        }
        s
    }
}

/// Physical setup shared by the sweep-based experiments.
struct Setup {
    nv: NvParams,
    ss: SurfaceSpinParams,
    bath: SpinBathSample,
    engine: EngineConfig,
    cal: PulseCalibration,
    larmor: f64,
}

impl Setup {
    fn new(c: &ExperimentConfig, depth: f64, bath_seed: u64) -> Result<Self> {
        let nv = NvParams { depth, ..c.nv.clone() };
        let bath = match &c.bath.couplings_khz {
            Some(b) => SpinBathSample::from_couplings(b.clone(), depth)?,
            None => sample_bath(
                c.ss.density,
                depth,
                c.bath.extent_factor * depth,
                default_nv_axis(),
                bath_seed,
            )?,
        };
        let bath = match c.bath.max_spins {
            Some(n) => bath.strongest(n),
            None => bath,
        };
        Ok(Setup {
            cal: PulseCalibration::resonant(&nv, c.sequence.nv_rabi)?,
            larmor: surface_spin_larmor(nv.bz, c.ss.gamma_ss)?,
            nv,
            ss: c.ss.clone(),
            bath,
            engine: c.engine_config(),
        })
    }

    fn sweep<F>(&self, axis_name: &str, axis: &[f64], build: F, descriptor: &str) -> Result<CoherenceTrace>
    where
        F: Fn(f64) -> Result<PulseSequence>,
    {
        sweep(axis_name, axis, build, &self.nv, &self.bath, &self.ss, &self.engine, descriptor)
    }

    /// Decoupling sequence of half-length `tau`, optionally under continuous drive.
    fn decoupling(&self, c: &ExperimentConfig, basis: Basis, tau: f64, rabi: f64, f_ss: f64) -> Result<PulseSequence> {
        let seq = build_decoupling(c.sequence.kind, basis, tau, &self.cal)?;
        if rabi > 0.0 {
            with_continuous_drive(&seq, f_ss, rabi)
        } else {
            Ok(seq)
        }
    }

    fn f_ss(&self, c: &ExperimentConfig) -> f64 {
        c.drive.f_ss.unwrap_or(self.larmor)
    }
}

const DECAY_HIGH: f64 = 0.85;
const DECAY_LOW: f64 = 0.25;
const MIN_TWO_TAU: f64 = 0.2;
const MAX_TWO_TAU: f64 = 1e5;

/// Coherence against 2τ on a log grid, widened until it spans the decay.
fn decay_trace<F>(c: &ExperimentConfig, setup: &Setup, build: F, descriptor: &str) -> Result<CoherenceTrace>
where
    F: Fn(f64) -> Result<PulseSequence>,
{
    let mut lo = c.sweep.start.unwrap_or(2.0);
    let mut hi = c.sweep.stop.unwrap_or(200.0);
    let spacing = c.sweep.spacing.unwrap_or(Spacing::Log);
    for _ in 0..12 {
        let axis = c.sweep.values(lo, hi, spacing)?;
        let trace = setup.sweep("two_tau_us", &axis, |x| build(x / 2.0), descriptor)?;
        if !c.sweep.auto_extend {
            return Ok(trace);
        }
        let first = trace.coherence[0];
        let last = trace.coherence[trace.len() - 1];
        let grow_low = first < DECAY_HIGH && lo > MIN_TWO_TAU;
        let grow_high = last > DECAY_LOW && hi < MAX_TWO_TAU;
        if !grow_low && !grow_high {
            return Ok(trace);
        }
        if grow_low {
            lo = (lo / 4.0).max(MIN_TWO_TAU);
        }
        if grow_high {
            hi = (hi * 4.0).min(MAX_TWO_TAU);
        }
    }
    Err(Error::NonConvergence(format!("decay grid for `{descriptor}` did not settle")))
}

fn drive_label(basis: Basis, rabi: f64) -> String {
    format!("{}_drive{}", basis.to_string().to_lowercase(), rabi)
}

/// Runs the configured experiment.
pub fn run_experiment(c: &ExperimentConfig) -> Result<Outcome> {
    match c.experiment {
        Experiment::DeerSpectrum => deer_spectrum(c),
        Experiment::DeerRabi => deer_rabi(c),
        Experiment::HahnT2 => hahn_t2(c),
        Experiment::DriveResonance => drive_resonance(c),
        Experiment::DepthScan => depth_scan(c),
        Experiment::Sensitivity => sensitivity(c),
        Experiment::Stark => stark(c),
        Experiment::Density => density(c),
        Experiment::RatioTest => ratio_test(c),
    }
}

/// Representative pulse sequence of a sequence-bearing experiment.
pub fn experiment_sequence(c: &ExperimentConfig) -> Result<PulseSequence> {
    let setup = Setup::new(c, c.nv.depth, c.bath_seed())?;
    let tau = c.sequence.tau;
    let f_ss = setup.f_ss(c);
    match c.experiment {
        Experiment::DeerSpectrum | Experiment::DeerRabi => {
            build_deer(tau, f_ss, c.drive.t_ss, deer_rabi_freq(c), &setup.cal)
        }
        Experiment::HahnT2 | Experiment::DepthScan => {
            setup.decoupling(c, c.sequence.bases[0], tau, c.drive.rabi[0], f_ss)
        }
        Experiment::DriveResonance => setup.decoupling(c, c.sequence.bases[0], tau, drive_rabi(c)?, f_ss),
        Experiment::RatioTest if c.ratio.simulate => setup.decoupling(c, c.sequence.bases[0], tau, 0.0, f_ss),
        e => Err(Error::Config(format!("experiment `{e}` has no pulse sequence"))),
    }
}

fn deer_rabi_freq(c: &ExperimentConfig) -> f64 {
    match c.drive.rabi.iter().find(|r| **r > 0.0) {
        Some(r) => *r,
        None => 1.0 / (2.0 * c.drive.t_ss),
    }
}

fn drive_rabi(c: &ExperimentConfig) -> Result<f64> {
    c.drive
        .rabi
        .iter()
        .copied()
        .fold(None, |m: Option<f64>, r| if r > 0.0 { Some(m.map_or(r, |m| m.max(r))) } else { m })
        .ok_or_else(|| Error::Config(format!("`drive.rabi` needs a positive value for {}", c.experiment)))
}

fn deer_spectrum(c: &ExperimentConfig) -> Result<Outcome> {
    let setup = Setup::new(c, c.nv.depth, c.bath_seed())?;
    let rabi = deer_rabi_freq(c);
    let (lo, hi) = (
        c.sweep.start.unwrap_or(setup.larmor - 70.0),
        c.sweep.stop.unwrap_or(setup.larmor + 70.0),
    );
    let axis = c.sweep.values(lo, hi, c.sweep.spacing.unwrap_or(Spacing::Linear))?;
    let trace = setup.sweep(
        "f_ss_mhz",
        &axis,
        |f| build_deer(c.sequence.tau, f, c.drive.t_ss, rabi, &setup.cal),
        "deer-spectrum",
    )?;
    let fit = fit_lorentzian(&trace)?;
    let mut out = Outcome::default();
    out.put("larmor_mhz", setup.larmor);
    out.put("center_mhz", fit.value("center"));
    out.put("center_stderr_mhz", fit.stderr("center"));
    out.put("hwhm_mhz", fit.value("hwhm"));
    out.put("bath_spins", setup.bath.len() as f64);
    out.put("bath_rms_khz", setup.bath.field_rms() * 1e3);
    out.traces.push(("spectrum".into(), trace));
    out.fits.push(fit);
    Ok(out)
}

fn deer_rabi(c: &ExperimentConfig) -> Result<Outcome> {
    let setup = Setup::new(c, c.nv.depth, c.bath_seed())?;
    let rabi = drive_rabi(c)?;
    let f_ss = setup.f_ss(c);
    let t_hi = (c.sequence.tau - DEER_DEAD_TIME).min(0.6);
    let (lo, hi) = (c.sweep.start.unwrap_or(0.01), c.sweep.stop.unwrap_or(t_hi));
    let axis = c.sweep.values(lo, hi, c.sweep.spacing.unwrap_or(Spacing::Linear))?;
    let trace = setup.sweep(
        "t_ss_us",
        &axis,
        |t| build_deer(c.sequence.tau, f_ss, t, rabi, &setup.cal),
        "deer-rabi",
    )?;
    let fit = fit_damped_rabi_with(
        &trace,
        RabiFitOptions {
            stark_correction: c.fit.stark_correction,
            full_cosine: c.fit.full_cosine,
        },
    )?;
    let mut out = Outcome::default();
    out.put("omega_ss_mhz", fit.value("omega_ss"));
    out.put("t2_rabi_us", fit.value("t2_rabi"));
    out.put("omega_osc_mhz", fit.value("omega_osc"));
    out.traces.push(("rabi".into(), trace));
    out.fits.push(fit);
    Ok(out)
}

fn hahn_t2(c: &ExperimentConfig) -> Result<Outcome> {
    let setup = Setup::new(c, c.nv.depth, c.bath_seed())?;
    let f_ss = setup.f_ss(c);
    let mut out = Outcome::default();
    out.put("bath_spins", setup.bath.len() as f64);
    out.put("bath_rms_khz", setup.bath.field_rms() * 1e3);
    let mut t2 = Vec::new();
    for &basis in &c.sequence.bases {
        for &rabi in &c.drive.rabi {
            let label = drive_label(basis, rabi);
            let trace = decay_trace(c, &setup, |tau| setup.decoupling(c, basis, tau, rabi, f_ss), &label)?;
            let mut fit = fit_stretched_exp(&trace)?;
            fit.model = format!("stretched_exp_{label}");
            out.put(format!("t2_{label}_us"), fit.value("T2"));
            out.put(format!("t2_{label}_stderr_us"), fit.stderr("T2"));
            out.put(format!("n_{label}"), fit.value("n"));
            t2.push((basis, rabi, fit.value("T2"), fit.value("n")));
            out.traces.push((label, trace));
            out.fits.push(fit);
        }
    }
    for &(basis, rabi, t2_drive, _) in &t2 {
        if rabi > 0.0 {
            if let Some(&(_, _, t2_free, _)) = t2.iter().find(|e| e.0 == basis && e.1 == 0.0) {
                let label = drive_label(basis, rabi);
                out.put(format!("gamma_decoupled_{label}_per_ms"), decoupled_rate(t2_free, t2_drive)?);
            }
        }
    }
    let free = |b: Basis| t2.iter().find(|e| e.0 == b && e.1 == 0.0).copied();
    if let (Some(sq), Some(dq)) = (free(Basis::Sq), free(Basis::Dq)) {
        let r = dq_sq_ratio_with_tolerance(sq.2, dq.2, sq.3, c.ratio.tolerance)?;
        out.put("dq_sq_ratio", r.ratio);
        out.notes.push(format!("dq/sq verdict: {}", r.verdict));
    }
    Ok(out)
}

fn drive_resonance(c: &ExperimentConfig) -> Result<Outcome> {
    let setup = Setup::new(c, c.nv.depth, c.bath_seed())?;
    let rabi = drive_rabi(c)?;
    let (lo, hi) = (
        c.sweep.start.unwrap_or(setup.larmor - 60.0),
        c.sweep.stop.unwrap_or(setup.larmor + 60.0),
    );
    let axis = c.sweep.values(lo, hi, c.sweep.spacing.unwrap_or(Spacing::Linear))?;
    let basis = c.sequence.bases[0];
    let trace = setup.sweep(
        "f_ss_mhz",
        &axis,
        |f| setup.decoupling(c, basis, c.sequence.tau, rabi, f),
        "drive-resonance",
    )?;
    let fit = fit_lorentzian(&trace)?;
    let mut out = Outcome::default();
    out.put("larmor_mhz", setup.larmor);
    out.put("center_mhz", fit.value("center"));
    out.put("center_stderr_mhz", fit.stderr("center"));
    out.put("hwhm_mhz", fit.value("hwhm"));
    out.traces.push(("resonance".into(), trace));
    out.fits.push(fit);
    Ok(out)
}

fn depth_scan(c: &ExperimentConfig) -> Result<Outcome> {
    let rabi = drive_rabi(c)?;
    let basis = c.sequence.bases[0];
    let mut out = Outcome::default();
    let mut table = String::from("depth_nm,bath_rms_khz,t2_us,t2_drive_us,gamma_decoupled_per_ms\n");
    let (mut depths, mut gammas) = (Vec::new(), Vec::new());
    for (k, &depth) in c.depths.iter().enumerate() {
        let setup = Setup::new(c, depth, c.bath_seed() + k as u64)?;
        let f_ss = setup.f_ss(c);
        let mut t2 = [0.0; 2];
        for (slot, om) in [0.0, rabi].into_iter().enumerate() {
            let label = format!("depth{depth}_{}", drive_label(basis, om));
            let trace = decay_trace(c, &setup, |tau| setup.decoupling(c, basis, tau, om, f_ss), &label)?;
            let mut fit = fit_stretched_exp(&trace)?;
            fit.model = format!("stretched_exp_{label}");
            t2[slot] = fit.value("T2");
            out.traces.push((label, trace));
            out.fits.push(fit);
        }
        let g = decoupled_rate(t2[0], t2[1])?;
        let _ = writeln!(
            table,
            "{depth},{},{},{},{g}",
            setup.bath.field_rms() * 1e3,
            t2[0],
            t2[1]
        );
        out.put(format!("gamma_decoupled_depth{depth}_per_ms"), g);
        depths.push(depth);
        gammas.push(g);
    }
    if gammas.iter().any(|g| !(*g > 0.0)) {
        return Err(Error::NonConvergence(
            "a decoupled rate is not positive; the power law is undefined".into(),
        ));
    }
    let fit = fit_power_law(&depths, &gammas)?;
    out.put("depth_exponent", fit.value("exponent"));
    out.put("depth_exponent_stderr", fit.stderr("exponent"));
    let lo = gammas.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = gammas.iter().cloned().fold(0.0, f64::max);
    out.put("gamma_range_ratio", hi / lo);
    out.table = Some(table);
    out.fits.push(fit);
    Ok(out)
}

fn sensitivity(c: &ExperimentConfig) -> Result<Outcome> {
    let s = &c.sensitivity;
    let fits = (0..s.t2.len())
        .map(|i| {
            let g = match s.bases[i] {
                Basis::Sq => 1.0,
                Basis::Dq => 2.0,
            };
            DecayFit::new(s.t2[i], s.n[i], g)
        })
        .collect::<Result<Vec<_>>>()?;
    let curves = fits
        .iter()
        .map(|f| sensitivity_curve(*f, s.t_max, s.points))
        .collect::<Result<Vec<_>>>()?;
    let mut table = String::from("t_us");
    for l in &s.labels {
        let _ = write!(table, ",{l}");
    }
    table.push('\n');
    for i in 0..s.points {
        let _ = write!(table, "{}", curves[0].t[i]);
        for cv in &curves {
            let _ = write!(table, ",{}", cv.value[i]);
        }
        table.push('\n');
    }
    let mut out = Outcome::default();
    for (i, l) in s.labels.iter().enumerate() {
        out.put(format!("peak_time_{l}_us"), curves[i].peak_time);
        out.put(format!("peak_value_{l}"), curves[i].peak_value);
    }
    for (i, l) in s.labels.iter().enumerate().skip(1) {
        out.put(format!("enhancement_{l}"), enhancement(fits[i], fits[0]));
    }
    out.table = Some(table);
    Ok(out)
}

fn stark(c: &ExperimentConfig) -> Result<Outcome> {
    let st = &c.stark;
    let inputs = StarkInputs::from_surface_rabi(st.omega_ss, st.delta_m1, st.delta_p1, st.omega);
    let shift = stark_shift(inputs)?;
    let lead = stark_shift_leading(inputs.omega_nv, st.delta_m1)?;
    let mut out = Outcome::default();
    out.put("omega_nv_mhz", inputs.omega_nv);
    out.put("stark_shift_mhz", shift);
    out.put("leading_term_mhz", lead);
    out.table = Some(format!(
        "quantity,value\nomega_nv_mhz,{}\nstark_shift_mhz,{shift}\nleading_term_mhz,{lead}\n",
        inputs.omega_nv
    ));
    Ok(out)
}

fn density(c: &ExperimentConfig) -> Result<Outcome> {
    let d = &c.density;
    let est = match (&d.gammas, d.mean, d.std) {
        (Some(g), _, _) => density_lower_bound(g, d.mean_depth)?,
        (None, Some(m), Some(s)) => density_from_stats(m, s, d.mean_depth)?,
        _ => {
            return Err(Error::Config(
                "density needs `density.gammas` or both `density.mean` and `density.std`".into(),
            ))
        }
    };
    let upper = density_upper_bound(d.delta_f_rms)?;
    let mut out = Outcome::default();
    out.put("spread_ratio", est.ratio);
    out.put("effective_spins", est.n_spins);
    out.put("lower_bound_per_nm2", est.density);
    out.put("upper_bound_per_nm2", upper);
    out.put("fwhm_at_unit_density_mhz", linewidth_fwhm_from_density(1.0));
    out.put("lattice_rms_at_unit_density_mhz", second_moment(1.0, d.shells, MAGIC_ANGLE)?);
    let mut table = String::from("quantity,value\n");
    for (k, v) in &out.summary {
        let _ = writeln!(table, "{k},{v}");
    }
    out.table = Some(table);
    Ok(out)
}

fn ratio_test(c: &ExperimentConfig) -> Result<Outcome> {
    let r = &c.ratio;
    let mut out = Outcome::default();
    if let (Some(sq), Some(dq), Some(n)) = (r.t2_sq, r.t2_dq, r.n) {
        let t = dq_sq_ratio_with_tolerance(sq, dq, n, r.tolerance)?;
        out.put("ratio", t.ratio);
        out.notes.push(format!("verdict: {}", t.verdict));
    }
    if r.simulate {
        let setup = Setup::new(c, c.nv.depth, c.bath_seed())?;
        let mut res = Vec::new();
        for basis in [Basis::Sq, Basis::Dq] {
            let label = drive_label(basis, 0.0);
            let trace = decay_trace(c, &setup, |tau| setup.decoupling(c, basis, tau, 0.0, 0.0), &label)?;
            let mut fit = fit_stretched_exp(&trace)?;
            fit.model = format!("stretched_exp_{label}");
            res.push((fit.value("T2"), fit.value("n")));
            out.put(format!("t2_{label}_us"), fit.value("T2"));
            out.put(format!("n_{label}"), fit.value("n"));
            out.traces.push((label, trace));
            out.fits.push(fit);
        }
        let t = dq_sq_ratio_with_tolerance(res[0].0, res[1].0, res[0].1, r.tolerance)?;
        out.put("simulated_ratio", t.ratio);
        out.notes.push(format!("simulated verdict: {}", t.verdict));
    }
    if out.summary.is_empty() {
        return Err(Error::Config(
            "ratio-test needs `ratio.t2_sq`, `ratio.t2_dq`, `ratio.n` or `ratio.simulate = true`".into(),
        ));
    }
    Ok(out)
}
