//! Simulation and analysis toolkit for NV-center spin coherence in the presence of
//! a bath of surface electron spins that can be driven and decoupled.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod engines;
pub mod error;
pub mod model;
pub mod pulses;
pub mod qcore;

pub use error::{Error, Result};
