use crate::error::{Error, Result};
use crate::fock::{OperatorMatrix, QuantumState, StateForm, Storage};
use crate::C64;

/// `tr(rho O)` or `<psi|O|psi>`.
pub fn expectation(state: &QuantumState, op: &OperatorMatrix) -> Result<C64> {
    if state.basis() != op.basis() {
        return Err(Error::BasisMismatch);
    }
    let value = match (state.form(), op.storage()) {
        (StateForm::Pure(psi), Storage::Dense(m)) => psi.dotc(&(m * psi)),
        (StateForm::Pure(psi), Storage::Sparse(s)) => s
            .iter()
            .map(|(r, c, v)| psi[r].conj() * v * psi[c])
            .sum(),
        (StateForm::Density(rho), Storage::Dense(m)) => (m * rho).trace(),
        // tr(O rho) = sum_{r,c} O[r,c] rho[c,r]
        (StateForm::Density(rho), Storage::Sparse(s)) => {
            s.iter().map(|(r, c, v)| v * rho[(c, r)]).sum()
        }
    };
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{number_op, thermal_state, BasisDescriptor};

    #[test]
    fn basic_values() {
        let basis = BasisDescriptor::single(3).unwrap();
        let n = number_op(3).unwrap();
        let s = QuantumState::fock(basis.clone(), &[2]).unwrap();
        assert_eq!(expectation(&s, &OperatorMatrix::identity(basis)).unwrap(), C64::new(1.0, 0.0));
        assert!((expectation(&s, &n).unwrap().re - 2.0).abs() < 1e-15);
        let th = thermal_state(1.0, 2).unwrap();
        let v = expectation(&th, &number_op(2).unwrap()).unwrap();
        assert!((v.re - 1.0 / 3.0).abs() < 1e-15 && v.im.abs() < 1e-15);
    }

    #[test]
    fn sparse_matches_dense() {
        let basis = BasisDescriptor::new([("a", 8), ("b", 8), ("c", 9)]).unwrap();
        let n = crate::fock::embed(&number_op(9).unwrap(), &basis, "c").unwrap();
        let s = QuantumState::fock(basis.clone(), &[1, 2, 5]).unwrap();
        assert!((expectation(&s, &n).unwrap().re - 5.0).abs() < 1e-13);
        assert!((expectation(&s.to_density(), &n).unwrap().re - 5.0).abs() < 1e-13);
    }
}
