use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fock::{BasisDescriptor, CsrMatrix, OperatorMatrix, QuantumState};
use crate::model::CollapseOp;
use crate::C64;

/// Lindblad generator in the form
/// `L rho = -i (H_nh rho - rho H_nh^dag) + sum_k r_k J_k rho J_k^dag`
/// with `H_nh = H - (i/2) sum_k r_k J_k^dag J_k`, held as sparse matrices.
#[derive(Clone, Debug)]
pub struct Liouvillian {
    basis: BasisDescriptor,
    h_nh: CsrMatrix,
    jumps: Vec<(CsrMatrix, f64)>,
}

impl Liouvillian {
    pub fn new(h: &OperatorMatrix, collapse: &[CollapseOp]) -> Result<Self> {
        let basis = h.basis().clone();
        let n = basis.total_dim();
        let mut h_nh = h.to_csr();
        let mut jumps = Vec::with_capacity(collapse.len());
        for c in collapse {
            if c.op.basis() != &basis {
                return Err(Error::BasisMismatch);
            }
            if !(c.rate >= 0.0) || !c.rate.is_finite() {
                return Err(Error::InvalidParameter(format!("collapse rate {} must be >= 0", c.rate)));
            }
            if c.rate == 0.0 {
                continue;
            }
            let j = c.op.to_csr();
            let jdj = j.adjoint().matmul(&j);
            h_nh = h_nh.lincomb(C64::new(1.0, 0.0), &jdj, C64::new(0.0, -0.5 * c.rate));
            jumps.push((j, c.rate));
        }
        debug_assert_eq!(h_nh.dim(), n);
        Ok(Self { basis, h_nh, jumps })
    }

    pub fn basis(&self) -> &BasisDescriptor {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.total_dim()
    }

    pub(crate) fn h_nh(&self) -> &CsrMatrix {
        &self.h_nh
    }

    pub(crate) fn jumps(&self) -> &[(CsrMatrix, f64)] {
        &self.jumps
    }

    /// `out = L rho`; `scratch` must be `n x n` and is overwritten.
    pub fn apply(&self, rho: &DMatrix<C64>, out: &mut DMatrix<C64>, scratch: &mut DMatrix<C64>) {
        let zero = C64::new(0.0, 0.0);
        out.fill(zero);
        self.h_nh.gemm_into(C64::new(0.0, -1.0), rho, out);
        self.h_nh.gemm_adjoint_right_into(C64::new(0.0, 1.0), rho, out);
        for (j, rate) in &self.jumps {
            scratch.fill(zero);
            j.gemm_into(C64::new(1.0, 0.0), rho, scratch);
            j.gemm_adjoint_right_into(C64::new(*rate, 0.0), scratch, out);
        }
    }
}

/// `d rho / dt` of the master equation for one state.
pub fn lindblad_rhs(rho: &QuantumState, h: &OperatorMatrix, collapse: &[CollapseOp]) -> Result<DMatrix<C64>> {
    if rho.basis() != h.basis() {
        return Err(Error::BasisMismatch);
    }
    let l = Liouvillian::new(h, collapse)?;
    let n = l.dim();
    let r = rho.to_density_matrix();
    let (mut out, mut scratch) = (DMatrix::zeros(n, n), DMatrix::zeros(n, n));
    l.apply(&r, &mut out, &mut scratch);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{embed, ladder_lower, number_op, thermal_state};

    fn direct(rho: &DMatrix<C64>, h: &DMatrix<C64>, ops: &[(DMatrix<C64>, f64)]) -> DMatrix<C64> {
        let i = C64::new(0.0, 1.0);
        let mut out = (h * rho - rho * h) * (-i);
        for (o, r) in ops {
            let od = o.adjoint();
            let odo = &od * o;
            out += (o * rho * &od - (&odo * rho + rho * &odo) * C64::new(0.5, 0.0)) * C64::new(*r, 0.0);
        }
        out
    }

    #[test]
    fn stationary_diagonal() {
        let basis = crate::fock::BasisDescriptor::single(4).unwrap();
        let h = number_op(4).unwrap().rebased(basis.clone()).unwrap();
        let rho = thermal_state(0.7, 4).unwrap();
        let d = lindblad_rhs(&rho, &h, &[]).unwrap();
        assert_eq!(d.camax(), 0.0);
    }

    #[test]
    fn damped_photon_rate() {
        let a = ladder_lower(3).unwrap();
        let h = OperatorMatrix::zeros(a.basis().clone());
        let rho = QuantumState::fock(a.basis().clone(), &[1]).unwrap();
        let kappa = 0.37;
        let d = lindblad_rhs(&rho, &h, &[CollapseOp { op: a.clone(), rate: kappa }]).unwrap();
        let dn = (number_op(3).unwrap().to_dense() * d).trace();
        assert!((dn.re + kappa).abs() < 1e-15);
    }

    #[test]
    fn matches_direct_formula_and_is_linear_in_channels() {
        let basis = crate::fock::BasisDescriptor::new([("a", 2), ("b", 3)]).unwrap();
        let a = embed(&ladder_lower(2).unwrap(), &basis, "a").unwrap();
        let b = embed(&ladder_lower(3).unwrap(), &basis, "b").unwrap();
        let x = a.adjoint().matmul(&b).unwrap();
        let h = x.add(&x.adjoint()).unwrap().add(&b.adjoint().matmul(&b).unwrap().scale_real(0.3)).unwrap();
        let mut seed = 7u64;
        let psi = nalgebra::DVector::from_fn(6, |_, _| {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
            C64::new(((seed >> 20) % 97) as f64 / 97.0 - 0.5, ((seed >> 40) % 89) as f64 / 89.0 - 0.5)
        });
        let st = QuantumState::pure_normalized(basis, psi).unwrap();
        let c1 = CollapseOp { op: a.clone(), rate: 0.2 };
        let c2 = CollapseOp { op: b.adjoint(), rate: 0.05 };
        let both = lindblad_rhs(&st, &h, &[c1.clone(), c2.clone()]).unwrap();
        let only1 = lindblad_rhs(&st, &h, std::slice::from_ref(&c1)).unwrap();
        let only2 = lindblad_rhs(&st, &h, std::slice::from_ref(&c2)).unwrap();
        let ham = lindblad_rhs(&st, &h, &[]).unwrap();
        assert!((&both - (only1 + only2 - ham)).camax() < 1e-14);
        let r = st.to_density_matrix();
        let expect = direct(&r, &h.to_dense(), &[(a.to_dense(), 0.2), (b.adjoint().to_dense(), 0.05)]);
        assert!((&both - expect).camax() < 1e-14);
        assert!(both.trace().norm() < 1e-12);
    }
}
