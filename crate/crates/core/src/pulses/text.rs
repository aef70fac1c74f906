use std::fmt::Write;

use super::sequence::{Basis, Pulse, PulseSequence};
use crate::error::{Error, Result};

/// One event per line: `channel start_us duration_us carrier_MHz rabi_MHz phase_rad target`,
/// closed by a `READOUT` line. Numbers use shortest round-trip formatting.
pub fn to_text(seq: &PulseSequence) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# basis={} differential={}", seq.basis, seq.differential);
    for p in &seq.pulses {
        let _ = writeln!(
            s,
            "{} {} {} {} {} {} {}",
            p.channel, p.start, p.duration, p.carrier, p.rabi, p.phase, p.target
        );
    }
    let _ = writeln!(s, "READOUT {} 0 0 0 0 -", seq.readout_time);
    s
}

fn num(tok: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>()
        .map_err(|_| Error::InvalidInput(format!("line {line}: bad number `{tok}`")))
}

pub fn from_text(text: &str) -> Result<PulseSequence> {
    let mut basis = None;
    let mut differential = None;
    let mut pulses = Vec::new();
    let mut readout = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix('#') {
            for kv in header.split_whitespace() {
                match kv.split_once('=') {
                    Some(("basis", v)) => basis = Some(v.parse::<Basis>()?),
                    Some(("differential", v)) => {
                        differential = Some(v.parse::<bool>().map_err(|_| {
                            Error::InvalidInput(format!("line {}: bad flag `{v}`", i + 1))
                        })?)
                    }
                    _ => {}
                }
            }
            continue;
        }
        let tok: Vec<&str> = line.split_whitespace().collect();
        if tok.len() != 7 {
            return Err(Error::InvalidInput(format!(
                "line {}: expected 7 fields, found {}",
                i + 1,
                tok.len()
            )));
        }
        if tok[0] == "READOUT" {
            readout = Some(num(tok[1], i + 1)?);
            continue;
        }
        pulses.push(Pulse {
            channel: tok[0].parse()?,
            start: num(tok[1], i + 1)?,
            duration: num(tok[2], i + 1)?,
            carrier: num(tok[3], i + 1)?,
            rabi: num(tok[4], i + 1)?,
            phase: num(tok[5], i + 1)?,
            target: tok[6].parse()?,
        });
    }
    Ok(PulseSequence {
        pulses,
        readout_time: readout.ok_or_else(|| Error::InvalidInput("missing READOUT line".into()))?,
        basis: basis.ok_or_else(|| Error::InvalidInput("missing basis header".into()))?,
        differential: differential.unwrap_or(false),
    })
}
