//! Simulation toolkit for a quadratically coupled optomechanical system used
//! as a photon-phonon converter.
//!
//! The crate is layered bottom-up:
//!
//! - [`fock`]: truncated Fock-space operators, states, partial traces and
//!   fidelity functionals on an ordered tensor-product basis.
//! - [`model`]: declarative system specifications and the Hamiltonians and
//!   collapse operators built from them (full membrane model, adiabatically
//!   eliminated cross-Kerr model, star-shaped multi-path network).
//! - [`engine`]: Lindblad master-equation integration and the exact phase
//!   propagator for number-diagonal Hamiltonians.
//! - [`protocols`]: control-phase-flip gate, measurement-based converter and
//!   multi-path conversion fidelity.
//!
//! All frequencies and rates are expressed in units of one caller-chosen
//! reference frequency; times are in inverse reference units.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod engine;
pub mod error;
pub mod fock;
pub mod model;
pub mod protocols;
pub mod tolerance;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
