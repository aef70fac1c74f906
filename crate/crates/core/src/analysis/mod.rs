//! Fits and closed-form estimators built on coherence traces.

mod density;
mod fits;
pub mod lsq;
mod ratio;
mod sensitivity;
mod stark;

pub use density::{
    decoupled_rate, density_from_stats, density_lower_bound, density_upper_bound,
    linewidth_fwhm_from_density, linewidth_rms_from_density, second_moment, second_moment_default,
    DensityEstimate, SECOND_MOMENT_PREFACTOR, UPPER_BOUND_PREFACTOR,
};
pub use fits::{
    damped_rabi, dominant_frequency, fit_damped_rabi, fit_damped_rabi_with, fit_lorentzian,
    fit_power_law, fit_stretched_exp, fits_to_csv, lorentzian, stretched_exp, FitParam, FitResult,
    RabiFitOptions, FIT_CSV_HEADER,
};
pub use ratio::{
    dq_sq_ratio, dq_sq_ratio_with_tolerance, RatioTest, RatioVerdict, DEFAULT_RATIO_TOLERANCE,
    MAGNETIC_ONLY_RATIO,
};
pub use sensitivity::{enhancement, sensitivity_curve, DecayFit, SensitivityCurve};
pub use stark::{stark_shift, stark_shift_leading, StarkInputs};
