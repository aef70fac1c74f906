//! Dense complex linear algebra and open-system evolution for small spin registers.

mod evolve;
mod matrix;
mod spin;
mod state;

pub use evolve::{evolve, propagator, Dephaser, Segment};
pub use matrix::{
    commutator, dagger, embed, hermitian_deviation, identity, kron, require_hermitian, trace,
    ComplexMatrix, ComplexVector, HERMITIAN_TOL,
};
pub use spin::{spin_operators, SpinOps};
pub use state::QuantumState;

pub use num_complex::Complex64;
