use std::fmt;

use super::config::ExperimentConfig;
use super::experiments::Outcome;
use crate::error::{Error, Result};

pub const FIGURES: [&str; 7] = ["1c", "1d", "2c", "2d", "3b", "3c", "s2d"];

/// Bundled configuration text for a figure id, or for `ratio-test`.
pub fn bundled_config(id: &str) -> Option<&'static str> {
    Some(match id {
        "1c" => include_str!("../../configs/1c.toml"),
        "1d" => include_str!("../../configs/1d.toml"),
        "2c" => include_str!("../../configs/2c.toml"),
        "2d" => include_str!("../../configs/2d.toml"),
        "3b" => include_str!("../../configs/3b.toml"),
        "3c" => include_str!("../../configs/3c.toml"),
        "s2d" => include_str!("../../configs/s2d.toml"),
        "ratio-test" => include_str!("../../configs/ratio-test.toml"),
        _ => return None,
    })
}

pub fn figure_config(id: &str) -> Result<(ExperimentConfig, &'static str)> {
    if !FIGURES.contains(&id) {
        return Err(Error::Config(format!(
            "unknown figure `{id}`; expected one of {}",
            FIGURES.join(", ")
        )));
    }
    let text = bundled_config(id).ok_or_else(|| Error::Config(format!("no config for `{id}`")))?;
    Ok((ExperimentConfig::parse(text)?, text))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub detail: String,
    pub pass: bool,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

fn need(o: &Outcome, key: &str) -> Result<f64> {
    o.get(key)
        .ok_or_else(|| Error::InvalidInput(format!("outcome has no `{key}`")))
}

fn within(name: &str, value: f64, target: f64, tol: f64) -> Check {
    Check {
        name: name.into(),
        detail: format!("{value:.4} vs {target} (tolerance {tol})"),
        pass: (value - target).abs() <= tol,
    }
}

fn within_rel(name: &str, value: f64, target: f64, rel: f64) -> Check {
    Check {
        name: name.into(),
        detail: format!("{value:.4} vs {target} (tolerance {:.0}%)", rel * 100.0),
        pass: (value - target).abs() <= rel * target.abs(),
    }
}

/// T2 under increasing drive: each step up exceeds the combined fit uncertainty.
pub fn drive_monotonicity(o: &Outcome, basis: &str, rabi: &[f64]) -> Result<Check> {
    let mut vals = Vec::new();
    for r in rabi {
        let label = format!("{basis}_drive{r}");
        vals.push((
            need(o, &format!("t2_{label}_us"))?,
            need(o, &format!("t2_{label}_stderr_us"))?,
        ));
    }
    let pass = vals
        .windows(2)
        .all(|w| w[1].0 - w[0].0 > (w[0].1.powi(2) + w[1].1.powi(2)).sqrt());
    let listing: Vec<String> = rabi
        .iter()
        .zip(&vals)
        .map(|(r, v)| format!("{r}:{:.1}+/-{:.1}", v.0, v.1))
        .collect();
    Ok(Check {
        name: format!("{basis} T2 increases with drive"),
        detail: listing.join(" "),
        pass,
    })
}

/// Figure-specific comparisons between an outcome and the published numbers.
pub fn figure_checks(id: &str, cfg: &ExperimentConfig, o: &Outcome) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    match id {
        "1c" | "3b" => {
            let (target, measured) = if id == "1c" { (1070.6, 1071.0) } else { (787.5, 788.0) };
            checks.push(within("resonance center (MHz)", need(o, "center_mhz")?, target, 2.0));
            checks.push(within("center vs measured (MHz)", need(o, "center_mhz")?, measured, 2.0));
        }
        "1d" => {
            checks.push(within_rel("Rabi frequency (MHz)", need(o, "omega_ss_mhz")?, 13.7, 0.02));
            checks.push(within_rel("Rabi decay time (us)", need(o, "t2_rabi_us")?, 0.2, 0.02));
        }
        "2c" => {
            for basis in ["sq", "dq"] {
                if cfg.sequence.bases.iter().any(|b| b.to_string().to_lowercase() == basis) {
                    let t0 = need(o, &format!("t2_{basis}_drive0_us"))?;
                    let t10 = need(o, &format!("t2_{basis}_drive10_us"))?;
                    checks.push(Check {
                        name: format!("{basis} T2 gain at 10 MHz drive"),
                        detail: format!("{t0:.1} -> {t10:.1} us ({:+.0}%, need > 20%)", 100.0 * (t10 / t0 - 1.0)),
                        pass: t10 > 1.2 * t0,
                    });
                    checks.push(drive_monotonicity(o, basis, &cfg.drive.rabi)?);
                }
            }
        }
        "2d" => {
            for (label, target) in [("sq_drive", 1.75), ("dq", 2.0), ("dq_drive", 5.0)] {
                checks.push(within_rel(
                    &format!("enhancement {label}"),
                    need(o, &format!("enhancement_{label}"))?,
                    target,
                    0.03,
                ));
            }
        }
        "3c" => {
            checks.push(within("depth exponent", need(o, "depth_exponent")?, -4.0, 0.5));
            let r = need(o, "gamma_range_ratio")?;
            checks.push(Check {
                name: "decoupled rate range".into(),
                detail: format!("max/min = {r:.1} (need > 10)"),
                pass: r > 10.0,
            });
        }
        "s2d" => {
            checks.push(within("Stark shift (MHz)", need(o, "stark_shift_mhz")?, 0.264, 0.004));
        }
        _ => return Err(Error::Config(format!("unknown figure `{id}`"))),
    }
    Ok(checks)
}
