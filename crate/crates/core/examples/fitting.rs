//! The fit layer on synthetic data: stretched exponential, Lorentzian line,
//! damped Rabi with the Stark correction, and a log-log power law.

use spinbath::analysis::{
    damped_rabi, fit_damped_rabi, fit_lorentzian, fit_power_law, fit_stretched_exp, lorentzian, stretched_exp,
};
use spinbath::engines::CoherenceTrace;

fn trace(name: &str, x: Vec<f64>, f: impl Fn(f64) -> f64) -> spinbath::error::Result<CoherenceTrace> {
    let y = x.iter().map(|&v| f(v)).collect();
    let n = x.len();
    CoherenceTrace::from_columns(name, x, y, vec![0.01; n])
}

fn main() -> spinbath::error::Result<()> {
    let t: Vec<f64> = (0..30).map(|i| 2.0 * 100f64.powf(i as f64 / 29.0)).collect();
    print!("{}", fit_stretched_exp(&trace("two_tau_us", t, |x| stretched_exp(0.95, 65.0, 1.6, x))?)?.report());

    let f: Vec<f64> = (0..41).map(|i| 1000.0 + 3.5 * i as f64).collect();
    print!("{}", fit_lorentzian(&trace("f_ss_mhz", f, |x| lorentzian(1071.0, 10.0, 0.6, 0.9, x))?)?.report());

    let ts: Vec<f64> = (0..80).map(|i| 0.005 + 0.0075 * i as f64).collect();
    let rabi = trace("t_ss_us", ts, |x| damped_rabi(0.4, 13.7, 0.2, 0.26, 0.5, false, x))?;
    let plain = fit_damped_rabi(&rabi, false)?;
    let corrected = fit_damped_rabi(&rabi, true)?;
    print!("{}", corrected.report());
    println!("residual rms without / with Stark term: {:.2e} / {:.2e}", plain.residual_rms, corrected.residual_rms);

    let depth = [4.0, 6.0, 9.0, 13.0, 17.0];
    let gamma: Vec<f64> = depth.iter().map(|d: &f64| 2000.0 * d.powf(-4.0)).collect();
    print!("{}", fit_power_law(&depth, &gamma)?.report());
    Ok(())
}
