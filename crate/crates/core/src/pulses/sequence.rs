use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    NvA,
    NvB,
    Ss,
}

impl Channel {
    pub fn is_nv(self) -> bool {
        matches!(self, Channel::NvA | Channel::NvB)
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Channel::NvA => "NV_A",
            Channel::NvB => "NV_B",
            Channel::Ss => "SS",
        })
    }
}

impl FromStr for Channel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "NV_A" => Ok(Channel::NvA),
            "NV_B" => Ok(Channel::NvB),
            "SS" => Ok(Channel::Ss),
            _ => Err(Error::InvalidInput(format!("unknown channel `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Target {
    ZeroToMinus1,
    ZeroToPlus1,
    SurfaceSpin,
}

impl Target {
    pub fn natural_channel(self) -> Channel {
        match self {
            Target::ZeroToMinus1 => Channel::NvA,
            Target::ZeroToPlus1 => Channel::NvB,
            Target::SurfaceSpin => Channel::Ss,
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Target::ZeroToMinus1 => "0->-1",
            Target::ZeroToPlus1 => "0->+1",
            Target::SurfaceSpin => "ss",
        })
    }
}

impl FromStr for Target {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "0->-1" => Ok(Target::ZeroToMinus1),
            "0->+1" => Ok(Target::ZeroToPlus1),
            "ss" => Ok(Target::SurfaceSpin),
            _ => Err(Error::InvalidInput(format!("unknown target `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Sq,
    Dq,
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Basis::Sq => "SQ",
            Basis::Dq => "DQ",
        })
    }
}

impl FromStr for Basis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_uppercase().as_str() {
            "SQ" => Ok(Basis::Sq),
            "DQ" => Ok(Basis::Dq),
            _ => Err(Error::InvalidInput(format!("unknown basis `{s}`"))),
        }
    }
}

/// Rectangular RF pulse. Carrier and Rabi frequency in MHz, times in us, phase in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pulse {
    pub channel: Channel,
    pub carrier: f64,
    pub rabi: f64,
    pub phase: f64,
    pub start: f64,
    pub duration: f64,
    pub target: Target,
}

impl Pulse {
    pub fn end(&self) -> f64 {
        self.start + self.duration
    }

    /// Nutation angle `2 pi rabi duration` on the addressed two-level transition.
    pub fn angle(&self) -> f64 {
        2.0 * PI * self.rabi * self.duration
    }
}

/// Time-ordered pulses followed by a readout marker. `differential` marks the
/// swapped-readout member of a differential pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSequence {
    pub pulses: Vec<Pulse>,
    pub readout_time: f64,
    pub basis: Basis,
    pub differential: bool,
}

impl PulseSequence {
    pub fn total_duration(&self) -> f64 {
        self.readout_time
    }

    pub fn nv_pulses(&self) -> impl Iterator<Item = &Pulse> {
        self.pulses.iter().filter(|p| p.channel.is_nv())
    }

    pub fn ss_pulses(&self) -> impl Iterator<Item = &Pulse> {
        self.pulses.iter().filter(|p| p.channel == Channel::Ss)
    }

    pub(crate) fn sort(&mut self) {
        self.pulses.sort_by(|a, b| a.start.total_cmp(&b.start));
    }
}
