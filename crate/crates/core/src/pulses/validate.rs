use std::fmt;

use super::sequence::{Basis, Channel, PulseSequence, Target};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    NonFinite,
    NonPositiveDuration,
    NonPositiveRabi,
    NegativeStart,
    ChannelTarget,
    Unordered,
    Overlap,
    ReadoutBeforeLastPulse,
    SqOnPlusTransition,
    DqSimultaneousTones,
    DqMissingPlusTransition,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::NonFinite => "non-finite pulse parameter",
            Rule::NonPositiveDuration => "pulse duration must be positive",
            Rule::NonPositiveRabi => "Rabi frequency must be positive",
            Rule::NegativeStart => "pulse starts before t = 0",
            Rule::ChannelTarget => "channel does not match target transition",
            Rule::Unordered => "pulses are not time-ordered",
            Rule::Overlap => "overlapping pulses on one channel",
            Rule::ReadoutBeforeLastPulse => "readout precedes the end of a pulse",
            Rule::SqOnPlusTransition => "single-quantum sequence drives the 0 -> +1 transition",
            Rule::DqSimultaneousTones => "double-quantum pulses must be single-tone",
            Rule::DqMissingPlusTransition => "double-quantum sequence never drives 0 -> +1",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub channel: Option<Channel>,
    pub time: f64,
    pub rule: Rule,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.channel {
            Some(c) => write!(f, "{} at t = {} us on {}", self.rule, self.time, c),
            None => write!(f, "{} at t = {} us", self.rule, self.time),
        }
    }
}

const EPS: f64 = 1e-12;

/// Returns every rule violation; an empty list means the sequence is executable.
pub fn validate(seq: &PulseSequence) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |channel: Option<Channel>, time: f64, rule: Rule| {
        out.push(Violation {
            channel,
            time,
            rule,
        })
    };
    for (k, p) in seq.pulses.iter().enumerate() {
        let ch = Some(p.channel);
        if ![p.carrier, p.rabi, p.phase, p.start, p.duration]
            .iter()
            .all(|v| v.is_finite())
        {
            push(ch, p.start, Rule::NonFinite);
            continue;
        }
        if p.duration <= 0.0 {
            push(ch, p.start, Rule::NonPositiveDuration);
        }
        if p.rabi <= 0.0 {
            push(ch, p.start, Rule::NonPositiveRabi);
        }
        if p.start < 0.0 {
            push(ch, p.start, Rule::NegativeStart);
        }
        if p.target.natural_channel() != p.channel {
            push(ch, p.start, Rule::ChannelTarget);
        }
        if k > 0 && p.start < seq.pulses[k - 1].start {
            push(ch, p.start, Rule::Unordered);
        }
        if p.end() > seq.readout_time + EPS {
            push(ch, p.end(), Rule::ReadoutBeforeLastPulse);
        }
        if seq.basis == Basis::Sq && p.target == Target::ZeroToPlus1 {
            push(ch, p.start, Rule::SqOnPlusTransition);
        }
    }
    for c in [Channel::NvA, Channel::NvB, Channel::Ss] {
        let mut on: Vec<_> = seq.pulses.iter().filter(|p| p.channel == c).collect();
        on.sort_by(|a, b| a.start.total_cmp(&b.start));
        for w in on.windows(2) {
            if w[1].start < w[0].end() - EPS {
                push(Some(c), w[1].start, Rule::Overlap);
            }
        }
    }
    if seq.basis == Basis::Dq {
        let a: Vec<_> = seq.pulses.iter().filter(|p| p.channel == Channel::NvA).collect();
        let b: Vec<_> = seq.pulses.iter().filter(|p| p.channel == Channel::NvB).collect();
        if b.is_empty() {
            push(Some(Channel::NvB), 0.0, Rule::DqMissingPlusTransition);
        }
        for pa in &a {
            for pb in &b {
                if pa.start < pb.end() - EPS && pb.start < pa.end() - EPS {
                    push(Some(Channel::NvB), pb.start, Rule::DqSimultaneousTones);
                }
            }
        }
    }
    out
}
