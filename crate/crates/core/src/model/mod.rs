//! Physical model: NV ground-state Hamiltonian, surface-spin parameters,
//! dipolar couplings and random bath geometries.

mod bath;
mod dipolar;
mod nv;
mod surface;

pub use bath::{default_nv_axis, sample_bath, SpinBathSample, MAGIC_ANGLE};
pub use dipolar::{dipolar_constant, dipolar_coupling, MIN_DISTANCE_NM};
pub use nv::{
    exact_transition_frequencies, nv_hamiltonian, nv_levels, transition_frequencies, NvLevels,
    NvParams, TransitionFrequencies,
};
pub use surface::{surface_spin_larmor, SurfaceSpinParams, GAMMA_ELECTRON_MHZ_PER_G};
