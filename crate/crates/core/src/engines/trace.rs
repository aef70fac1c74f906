use std::fmt::Write;

use super::config::EngineKind;
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherencePoint {
    pub coherence: f64,
    pub stderr: f64,
}

/// Coherence against a strictly increasing sweep axis.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceTrace {
    pub axis_name: String,
    pub axis: Vec<f64>,
    pub coherence: Vec<f64>,
    pub stderr: Vec<f64>,
    pub engine: EngineKind,
    pub seed: u64,
    pub n_trajectories: usize,
    pub descriptor: String,
}

impl CoherenceTrace {
    pub fn new(
        axis_name: impl Into<String>,
        axis: Vec<f64>,
        points: Vec<CoherencePoint>,
        engine: EngineKind,
        seed: u64,
        n_trajectories: usize,
        descriptor: impl Into<String>,
    ) -> Result<Self> {
        if axis.len() != points.len() {
            return Err(Error::DimensionMismatch {
                expected: axis.len(),
                found: points.len(),
            });
        }
        if axis.windows(2).any(|w| !(w[1] > w[0])) {
            return invalid("trace axis must be strictly increasing");
        }
        Ok(CoherenceTrace {
            axis_name: axis_name.into(),
            axis,
            coherence: points.iter().map(|p| p.coherence).collect(),
            stderr: points.iter().map(|p| p.stderr).collect(),
            engine,
            seed,
            n_trajectories,
            descriptor: descriptor.into(),
        })
    }

    /// Trace built from plain columns, tagged as analytic with seed 0.
    pub fn from_columns(
        axis_name: impl Into<String>,
        axis: Vec<f64>,
        coherence: Vec<f64>,
        stderr: Vec<f64>,
    ) -> Result<Self> {
        if coherence.len() != stderr.len() {
            return Err(Error::DimensionMismatch {
                expected: coherence.len(),
                found: stderr.len(),
            });
        }
        let points = coherence
            .into_iter()
            .zip(stderr)
            .map(|(coherence, stderr)| CoherencePoint { coherence, stderr })
            .collect();
        CoherenceTrace::new(axis_name, axis, points, EngineKind::Analytic, 0, 0, "")
    }

    pub fn len(&self) -> usize {
        self.axis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axis.is_empty()
    }

    /// Three columns `axis_name,coherence,stderr` with round-trip float formatting.
    pub fn to_csv(&self) -> String {
        let mut s = format!("{},coherence,stderr\n", self.axis_name);
        for i in 0..self.len() {
            let _ = writeln!(s, "{},{},{}", self.axis[i], self.coherence[i], self.stderr[i]);
        }
        s
    }

    /// Parses the CSV form; engine metadata is not stored in the CSV and is set to defaults.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidInput("empty CSV".into()))?;
        let cols: Vec<&str> = header.split(',').collect();
        if cols.len() != 3 || cols[1] != "coherence" || cols[2] != "stderr" {
            return invalid(format!("unexpected CSV header `{header}`"));
        }
        let mut axis = Vec::new();
        let mut points = Vec::new();
        for (i, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let v = line
                .split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<f64>, _>>()
                .map_err(|e| Error::InvalidInput(format!("row {}: {e}", i + 1)))?;
            if v.len() != 3 {
                return invalid(format!("row {} has {} fields", i + 1, v.len()));
            }
            axis.push(v[0]);
            points.push(CoherencePoint {
                coherence: v[1],
                stderr: v[2],
            });
        }
        CoherenceTrace::new(cols[0], axis, points, EngineKind::Semiclassical, 0, 0, "")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let pts = vec![
            CoherencePoint {
                coherence: 0.9,
                stderr: 0.01,
            },
            CoherencePoint {
                coherence: 1.0 / 3.0,
                stderr: 0.02,
            },
        ];
        let t = CoherenceTrace::new("two_tau_us", vec![1.0, 2.5], pts, EngineKind::Analytic, 0, 0, "")
            .unwrap();
        let csv = t.to_csv();
        assert!(csv.starts_with("two_tau_us,coherence,stderr\n"));
        let back = CoherenceTrace::from_csv(&csv).unwrap();
        assert_eq!(back.coherence, t.coherence);
        assert_eq!(back.axis, t.axis);
    }

    #[test]
    fn rejects_unsorted_axis() {
        let p = CoherencePoint {
            coherence: 1.0,
            stderr: 0.0,
        };
        assert!(CoherenceTrace::new("x", vec![2.0, 1.0], vec![p, p], EngineKind::Analytic, 0, 0, "").is_err());
    }
}
