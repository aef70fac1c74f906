use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::config::ExperimentConfig;
use super::experiments::Outcome;
use crate::analysis::fits_to_csv;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WrittenFile {
    pub path: PathBuf,
    pub sha256: String,
}

/// Writes `path` through a temporary sibling and a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// File name and contents for every output of an experiment, manifest excluded.
pub fn render_outputs(outcome: &Outcome, report: &str) -> Vec<(String, String)> {
    let mut files = Vec::new();
    let data = match (&outcome.table, outcome.traces.first()) {
        (Some(t), _) => Some(t.clone()),
        (None, Some((_, tr))) => Some(tr.to_csv()),
        (None, None) => None,
    };
    if let Some(d) = data {
        files.push(("data.csv".to_string(), d));
    }
    if outcome.traces.len() > 1 || outcome.table.is_some() {
        for (label, tr) in &outcome.traces {
            files.push((format!("data_{label}.csv"), tr.to_csv()));
        }
    }
    if !outcome.fits.is_empty() {
        files.push(("fit.csv".to_string(), fits_to_csv(&outcome.fits)));
    }
    files.push(("report.txt".to_string(), report.to_string()));
    files
}

/// Writes the outputs and a manifest holding the config echo and per-file checksums.
pub fn write_run(
    dir: &Path,
    config_text: &str,
    cfg: &ExperimentConfig,
    outcome: &Outcome,
    report: &str,
    wall_time_s: f64,
) -> Result<Vec<WrittenFile>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (name, contents) in render_outputs(outcome, report) {
        let path = dir.join(&name);
        write_atomic(&path, contents.as_bytes())?;
        written.push(WrittenFile {
            path,
            sha256: sha256_hex(contents.as_bytes()),
        });
    }
    let mut m = String::new();
    m.push_str(&format!("tool: spinbath {}\n", env!("CARGO_PKG_VERSION")));
    m.push_str(&format!("experiment: {}\n", cfg.experiment));
    m.push_str(&format!("seed: {}\n", cfg.seed));
    m.push_str(&format!("bath_seed: {}\n", cfg.bath_seed()));
    m.push_str(&format!("wall_time_s: {wall_time_s:.3}\n"));
    m.push_str("outputs:\n");
    for w in &written {
        let name = w.path.file_name().and_then(|n| n.to_str()).unwrap_or("");
        m.push_str(&format!("  {name} sha256={}\n", w.sha256));
    }
    m.push_str("config:\n");
    for line in config_text.lines() {
        m.push_str(&format!("  {line}\n"));
    }
    write_atomic(&dir.join("manifest.txt"), m.as_bytes())?;
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_known_vector() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
