use std::path::{Path, PathBuf};
use std::process::Command;

use spinbath::cli::{dump_sequence_file, run_config_file, ExperimentConfig};
use spinbath::pulses::{from_text, Basis};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spinbath"))
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn misspelled_key_is_rejected_by_name() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", "experiment = \"hahn-t2\"\n[ss]\ntaoc = 20.0\n");
    let out = bin().arg("run").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("taoc"), "{err}");
}

#[test]
fn unknown_figure_and_bad_flags_exit_two() {
    let out = bin().args(["reproduce", "9z"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["run"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn flat_decay_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "flat.toml",
        "experiment = \"hahn-t2\"\n[ss]\ndensity = 1e-9\n[sequence]\nbasis = \"sq\"\n",
    );
    let out = bin().arg("run").arg(&cfg).arg("--out").arg(dir.path().join("o")).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "echo.toml",
        "experiment = \"hahn-t2\"\nseed = 7\n[nv]\ndepth = 8.0\n[sequence]\nbasis = \"sq\"\n[engine]\nn_trajectories = 300\n[sweep]\npoints = 10\n",
    );
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let ra = run_config_file(&cfg, None, Some(&a), Some(1)).unwrap();
    let rb = run_config_file(&cfg, None, Some(&b), Some(3)).unwrap();
    for f in ["data.csv", "fit.csv"] {
        let x = std::fs::read(a.join(f)).unwrap();
        let y = std::fs::read(b.join(f)).unwrap();
        assert_eq!(x, y, "{f}");
    }
    let sums = |r: &spinbath::cli::RunSummary| {
        r.files
            .iter()
            .filter(|f| !f.path.ends_with("report.txt"))
            .map(|f| (f.path.file_name().unwrap().to_owned(), f.sha256.clone()))
            .collect::<Vec<_>>()
    };
    assert_eq!(sums(&ra), sums(&rb));
    let manifest = std::fs::read_to_string(a.join("manifest.txt")).unwrap();
    assert!(manifest.contains("seed: 7"), "{manifest}");
    let data = std::fs::read_to_string(a.join("data.csv")).unwrap();
    assert!(data.lines().next().unwrap().ends_with(",coherence,stderr"), "{data}");
}

#[test]
fn seed_flag_changes_results() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "echo.toml",
        "experiment = \"hahn-t2\"\n[nv]\ndepth = 8.0\n[sequence]\nbasis = \"sq\"\n[engine]\nn_trajectories = 300\n[sweep]\npoints = 10\n",
    );
    let a = run_config_file(&cfg, Some(1), Some(&dir.path().join("a")), None).unwrap();
    let b = run_config_file(&cfg, Some(2), Some(&dir.path().join("b")), None).unwrap();
    assert_ne!(a.outcome.traces[0].1.coherence, b.outcome.traces[0].1.coherence);
}

#[test]
fn dump_sequence_matches_golden_dq_hahn() {
    let text = dump_sequence_file(&golden("hahn_dq.toml"), None, None).unwrap();
    let expected = std::fs::read_to_string(golden("hahn_dq.txt")).unwrap();
    assert_eq!(text, expected);
    let seq = from_text(&text).unwrap();
    assert_eq!(seq.basis, Basis::Dq);
    let nv: Vec<_> = seq.nv_pulses().collect();
    assert_eq!(nv.len(), 7);
    // total free evolution equals 2τ
    let busy: f64 = nv.iter().map(|p| p.duration).sum();
    assert!((seq.total_duration() - busy - 20.0).abs() < 1e-9);
}

#[test]
fn dump_sequence_via_binary_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .arg("dump-sequence")
        .arg(golden("hahn_dq.toml"))
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let written = std::fs::read_to_string(dir.path().join("sequence.txt")).unwrap();
    assert_eq!(written, std::fs::read_to_string(golden("hahn_dq.txt")).unwrap());
}

#[test]
fn deer_surface_pulse_follows_nv_pi() {
    let text = dump_sequence_file(&golden("deer.toml"), None, None).unwrap();
    let seq = from_text(&text).unwrap();
    let nv_pi = &seq.pulses[1];
    let ss = seq.ss_pulses().next().unwrap();
    assert!((ss.start - (nv_pi.end() + 0.1)).abs() < 1e-12);
    assert!((ss.duration - 0.1).abs() < 1e-12);
    assert!((ss.carrier - 1070.0).abs() < 1e-12);
}

#[test]
fn sequence_free_experiments_refuse_dump() {
    let dir = tempfile::tempdir().unwrap();
    for exp in ["sensitivity", "stark", "density"] {
        let cfg = write(dir.path(), "c.toml", &format!("experiment = \"{exp}\"\n"));
        let out = bin().arg("dump-sequence").arg(&cfg).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{exp}");
    }
}

#[test]
fn bundled_configs_parse() {
    for id in spinbath::cli::FIGURES.iter().chain(["ratio-test"].iter()) {
        let text = spinbath::cli::bundled_config(id).unwrap();
        let cfg = ExperimentConfig::parse(text).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.seed, 1);
    }
}

#[test]
fn stark_reproduce_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["reproduce", "s2d", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("PASS"), "{stdout}");
    for f in ["report.txt", "manifest.txt"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}
