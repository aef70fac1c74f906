//! Multi-channel pulse timelines: builders, validation, readout and text form.

mod builders;
mod readout;
mod sequence;
mod text;
mod validate;

pub use builders::{
    build_decoupling, build_deer, expand_dq, with_continuous_drive, DecouplingKind,
    PulseCalibration, TransitionCal, DEER_DEAD_TIME,
};
pub use readout::{differential_coherence, differential_pair, photoluminescence, DEFAULT_CONTRAST};
pub use sequence::{Basis, Channel, Pulse, PulseSequence, Target};
pub use text::{from_text, to_text};
pub use validate::{validate, Rule, Violation};
