//! Runs an experiment described in TOML through the same path as the
//! `spinbath run` command, without writing files.

use spinbath::cli::{run_experiment, ExperimentConfig};

const CONFIG: &str = r#"
experiment = "depth-scan"
seed = 1

[nv]
Bz = 281.0

[ss]
tau_c = 0.1
density = 0.04

[noise]
magnetic_rms = 20.0
magnetic_tau_c = 0.1

[bath]
model = "gaussian"

[sequence]
kind = "hahn"
basis = "sq"

[drive]
rabi = [20.0]

[depth_scan]
depths = [4.0, 7.5, 12.0, 17.0]

[sweep]
points = 16
"#;

fn main() -> spinbath::error::Result<()> {
    let cfg = ExperimentConfig::parse(CONFIG)?;
    let outcome = run_experiment(&cfg)?;
    print!("{}", outcome.report());
    if let Some(table) = &outcome.table {
        print!("{table}");
    }
    Ok(())
}
