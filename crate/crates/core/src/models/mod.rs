//! Exact action-spectrum computations for the three model Hamiltonian
//! systems: the torus-stabilized deformation, contact-type bump profiles,
//! and toric fibers.

mod contact;
mod pl;
mod toric;
mod torus;

pub use contact::{
    bump_profile, contact_spectrum, scaled_profile, spectrum_gap, ContactProfile, GapVerdict, SpectrumElement,
    SpectrumProvenance,
};
pub use pl::PiecewiseLinear;
pub use toric::{toric_bound, fiber_hbar_lower, ToricWindow};
pub use torus::{
    deformed_spectrum, k_threshold, no_spurious_zero_certified, spurious_zero_search,
    TorusDeformation,
};

/// Errors in model validation and preconditions.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("invalid deformation data: {0}")]
    InvalidDeformation(String),
    #[error("k = {k} is not above the certified threshold k* = {k_star}")]
    ThresholdNotMet {
        k: crate::exponent::Exponent,
        k_star: crate::exponent::Exponent,
    },
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("profile construction infeasible: {0}")]
    Infeasible(String),
}
