//! Finite-coupling quantum thermometry.
//!
//! A probe `S` weakly-but-not-negligibly coupled to a sample `B` through
//! `H_int = γ S ⊗ B` equilibrates to the mean-force Gibbs state rather than
//! to its bare Gibbs state. This crate computes, to second order in `γ`:
//!
//! * the mean-force state `π̃_S = π_S (1 + γ² X_S)` and its traceless
//!   correction `X_S` ([`perturbation`]),
//! * the symmetric logarithmic derivative and the quantum Fisher information
//!   in both its correlation-integral and eigen-sum forms ([`metrology`]),
//! * the classical Fisher information of bare-energy measurements, which
//!   agrees with the quantum one up to `O(γ⁴)`,
//! * the signal-to-noise decomposition `β²F = C_S + γ² ξ` for bosonic
//!   samples with an Ohmic-family spectral density.
//!
//! Everything perturbative is checked against an exact brute-force
//! reference for small joint systems in [`oracle`].
//!
//! The [`cli`] module drives the `thermometry` binary (`report`, `sweep`,
//! `scaling`); the crate's `examples/` directory has one runnable program per
//! capability.

pub mod cli;
pub mod config;
pub mod error;
pub mod linalg;
pub mod metrology;
pub mod models;
pub mod oracle;
pub mod perturbation;
pub mod quadrature;
pub mod special;
pub mod tolerance;

pub use error::{Error, Result};
pub use tolerance::Tolerances;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
