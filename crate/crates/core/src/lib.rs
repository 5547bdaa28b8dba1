//! Exact dynamics of a single excited state coupled to a dense, discrete
//! reservoir spectrum, plus the standard generalizations of that problem:
//! deformed and mixed reservoir spectra, finite-temperature ensembles,
//! two-level systems symmetrically coupled to two reservoirs, and finite
//! tight-binding chains with an impurity site.
//!
//! The library computes the time evolution of the initial-state amplitude by
//! three mutually independent routes (dense eigendecomposition, secular-root
//! Fourier sums, recurrence-cycle partial amplitudes) and cross-validates
//! them, exposes the recurrence-cycle (Loschmidt echo) decomposition and its
//! metrics, and tracks reservoir-state double resonances.
//!
//! Units: energies are measured in units of the mean unperturbed inter-level
//! spacing, ħ = 1, so one recurrence cycle is 2π time units. The interaction
//! region width is `Γ = πC²`.

mod error;
pub mod linalg;
pub mod model;
pub mod quadrature;
pub mod spectrum;

pub use error::Error;
pub use model::{HamiltonianMatrix, Level, ReservoirSpec, ReservoirVariant};

/// Complex amplitude type used throughout.
pub type C64 = num_complex::Complex64;

/// Interaction-region width `Γ = πC²` for coupling `C`.
pub fn interaction_width(coupling: f64) -> f64 {
    std::f64::consts::PI * coupling * coupling
}

/// Result alias for fallible operations in this crate.
pub type Result<T> = std::result::Result<T, Error>;
