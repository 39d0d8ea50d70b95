//! Process-wide numeric tolerances.
//!
//! The defaults are the validation thresholds of the operator and state
//! types. They can be replaced only as a whole, through [`set_global`].

use std::sync::RwLock;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Maximum `|M - M^dag|` entry for operators flagged Hermitian.
    pub hermitian: f64,
    /// Allowed deviation of `||psi||` from 1.
    pub pure_norm: f64,
    /// Allowed deviation of `tr rho` from 1, and of `rho` from `rho^dag`.
    pub density_trace: f64,
    /// Most negative eigenvalue accepted for a density matrix.
    pub density_min_eigenvalue: f64,
    /// Largest off-diagonal magnitude for an operator to count as diagonal.
    pub diagonal: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        hermitian: 1e-12,
        pure_norm: 1e-10,
        density_trace: 1e-10,
        density_min_eigenvalue: -1e-8,
        diagonal: 1e-12,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

static GLOBAL: RwLock<Tolerances> = RwLock::new(Tolerances::DEFAULT);

/// Current global tolerances.
pub fn get() -> Tolerances {
    *GLOBAL.read().unwrap_or_else(|e| e.into_inner())
}

/// Replace the global tolerances. Affects every validation performed after
/// the call, in every thread.
pub fn set_global(tol: Tolerances) {
    *GLOBAL.write().unwrap_or_else(|e| e.into_inner()) = tol;
}
