use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::fock::{OperatorMatrix, QuantumState};
use crate::{tolerance, C64};

/// `exp(-i H t) |psi>` for a number-diagonal `H`, phase by phase.
pub fn propagate_diagonal(psi0: &QuantumState, h: &OperatorMatrix, t: f64) -> Result<QuantumState> {
    if psi0.basis() != h.basis() {
        return Err(Error::BasisMismatch);
    }
    let offdiag = h.max_offdiag();
    if offdiag > tolerance::get().diagonal {
        return Err(Error::NotDiagonal { offdiag });
    }
    let psi = psi0
        .as_vector()
        .ok_or_else(|| Error::InvalidState("diagonal propagation needs a pure state".into()))?;
    let energies = h.diagonal();
    let out = DVector::from_fn(psi.len(), |k, _| {
        psi[k] * (C64::new(0.0, -t) * energies[k]).exp()
    });
    QuantumState::pure(psi0.basis().clone(), out)
}
