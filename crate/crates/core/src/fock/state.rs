use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::basis::BasisDescriptor;
use crate::error::{Error, Result};
use crate::{tolerance, C64};

#[derive(Clone, Debug, PartialEq)]
pub enum StateForm {
    Pure(DVector<C64>),
    Density(DMatrix<C64>),
}

/// A pure state vector or density matrix on a fixed basis.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    basis: BasisDescriptor,
    form: StateForm,
}

impl QuantumState {
    /// Pure state; the norm must already be 1 within tolerance.
    pub fn pure(basis: BasisDescriptor, psi: DVector<C64>) -> Result<Self> {
        check_len(&basis, psi.len())?;
        let norm = psi.norm();
        if (norm - 1.0).abs() > tolerance::get().pure_norm {
            return Err(Error::InvalidState(format!("state norm {norm} is not 1")));
        }
        Ok(Self { basis, form: StateForm::Pure(psi) })
    }

    pub fn pure_normalized(basis: BasisDescriptor, psi: DVector<C64>) -> Result<Self> {
        check_len(&basis, psi.len())?;
        let norm = psi.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        Ok(Self { basis, form: StateForm::Pure(psi / C64::new(norm, 0.0)) })
    }

    /// Number state `|n_0, n_1, ..>` with levels in label order.
    pub fn fock(basis: BasisDescriptor, levels: &[usize]) -> Result<Self> {
        let idx = basis.index_of(levels)?;
        let mut psi = DVector::zeros(basis.total_dim());
        psi[idx] = C64::new(1.0, 0.0);
        Ok(Self { basis, form: StateForm::Pure(psi) })
    }

    /// Density matrix, checked for unit trace, Hermiticity and positivity.
    pub fn density(basis: BasisDescriptor, rho: DMatrix<C64>) -> Result<Self> {
        let state = Self::density_unchecked(basis, rho)?;
        state.check_density()?;
        Ok(state)
    }

    /// Density matrix with only the shape checked. Callers producing states
    /// from trusted dynamics use this and validate selectively.
    pub fn density_unchecked(basis: BasisDescriptor, rho: DMatrix<C64>) -> Result<Self> {
        check_len(&basis, rho.nrows())?;
        if !rho.is_square() {
            return Err(Error::InvalidState("density matrix is not square".into()));
        }
        Ok(Self { basis, form: StateForm::Density(rho) })
    }

    fn check_density(&self) -> Result<()> {
        let tol = tolerance::get();
        let rho = match &self.form {
            StateForm::Density(r) => r,
            StateForm::Pure(_) => return Ok(()),
        };
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > tol.density_trace || tr.im.abs() > tol.density_trace {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let herm = (rho - rho.adjoint()).iter().map(|v| v.norm()).fold(0.0, f64::max);
        if herm > tol.density_trace {
            return Err(Error::InvalidState(format!("density not Hermitian ({herm:e})")));
        }
        let min_eig = min_eigenvalue(rho);
        if min_eig < tol.density_min_eigenvalue {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig:e}")));
        }
        Ok(())
    }

    pub fn basis(&self) -> &BasisDescriptor {
        &self.basis
    }

    pub(crate) fn density_mut(&mut self) -> Option<&mut DMatrix<C64>> {
        match &mut self.form {
            StateForm::Density(r) => Some(r),
            StateForm::Pure(_) => None,
        }
    }

    pub fn form(&self) -> &StateForm {
        &self.form
    }

    pub fn is_pure_form(&self) -> bool {
        matches!(self.form, StateForm::Pure(_))
    }

    pub fn as_vector(&self) -> Option<&DVector<C64>> {
        match &self.form {
            StateForm::Pure(v) => Some(v),
            StateForm::Density(_) => None,
        }
    }

    /// Density matrix, promoting pure states to projectors.
    pub fn to_density_matrix(&self) -> DMatrix<C64> {
        match &self.form {
            StateForm::Pure(v) => v * v.adjoint(),
            StateForm::Density(r) => r.clone(),
        }
    }

    pub fn to_density(&self) -> QuantumState {
        Self {
            basis: self.basis.clone(),
            form: StateForm::Density(self.to_density_matrix()),
        }
    }

    pub fn trace(&self) -> f64 {
        match &self.form {
            StateForm::Pure(v) => v.norm_squared(),
            StateForm::Density(r) => r.trace().re,
        }
    }

    /// `tr rho^2`.
    pub fn purity(&self) -> f64 {
        match &self.form {
            StateForm::Pure(v) => v.norm_squared().powi(2),
            StateForm::Density(r) => r.as_slice().iter().map(|v| v.norm_sqr()).sum(),
        }
    }

    /// Smallest eigenvalue (0 for pure states).
    pub fn min_eigenvalue(&self) -> f64 {
        match &self.form {
            StateForm::Pure(_) => 0.0,
            StateForm::Density(r) => min_eigenvalue(r),
        }
    }

    /// Tensor product `self (x) other` on the concatenated basis.
    pub fn tensor(&self, other: &QuantumState) -> Result<QuantumState> {
        let basis = BasisDescriptor::new(
            self.basis
                .labels()
                .iter()
                .zip(self.basis.dims())
                .chain(other.basis.labels().iter().zip(other.basis.dims()))
                .map(|(l, &d)| (l.clone(), d)),
        )?;
        let form = match (&self.form, &other.form) {
            (StateForm::Pure(a), StateForm::Pure(b)) => StateForm::Pure(a.kronecker(b)),
            _ => StateForm::Density(self.to_density_matrix().kronecker(&other.to_density_matrix())),
        };
        Ok(QuantumState { basis, form })
    }
}

fn check_len(basis: &BasisDescriptor, n: usize) -> Result<()> {
    if n != basis.total_dim() {
        return Err(Error::DimensionMismatch { expected: basis.total_dim(), found: n });
    }
    Ok(())
}

/// Index sets on which `m` is block diagonal: the connected components of
/// its nonzero pattern, in ascending order of their smallest index.
pub fn decoupled_blocks(m: &DMatrix<C64>) -> Vec<Vec<usize>> {
    let n = m.nrows();
    let zero = C64::new(0.0, 0.0);
    let mut edges = Vec::new();
    for c in 0..n {
        for r in 0..c {
            if m[(r, c)] != zero || m[(c, r)] != zero {
                edges.push((r, c));
            }
        }
    }
    blocks_from_edges(n, edges)
}

/// Connected components of the graph on `0..n` with the given edges.
pub fn blocks_from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Vec<Vec<usize>> {
    fn root(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    let mut parent: Vec<usize> = (0..n).collect();
    for (r, c) in edges {
        let (a, b) = (root(&mut parent, r), root(&mut parent, c));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut blocks: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = root(&mut parent, i);
        blocks.entry(r).or_default().push(i);
    }
    blocks.into_values().collect()
}

fn hermitian_block(m: &DMatrix<C64>, idx: &[usize]) -> DMatrix<C64> {
    let k = idx.len();
    DMatrix::from_fn(k, k, |a, b| (m[(idx[a], idx[b])] + m[(idx[b], idx[a])].conj()) * 0.5)
}

/// Smallest eigenvalue of the Hermitian part of `m`, which must be block
/// diagonal on `blocks`.
pub fn min_eigenvalue_on(m: &DMatrix<C64>, blocks: &[Vec<usize>]) -> f64 {
    let mut min = f64::INFINITY;
    for idx in blocks {
        let lo = if idx.len() == 1 {
            m[(idx[0], idx[0])].re
        } else {
            SymmetricEigen::new(hermitian_block(m, idx)).eigenvalues.min()
        };
        min = min.min(lo);
    }
    min
}

/// Whether no eigenvalue of the Hermitian part of `m` lies below `-tol`,
/// decided by a Cholesky factorisation of each shifted block.
pub fn positive_within_on(m: &DMatrix<C64>, blocks: &[Vec<usize>], tol: f64) -> bool {
    blocks.iter().all(|idx| {
        if idx.len() == 1 {
            return m[(idx[0], idx[0])].re > -tol;
        }
        let mut h = hermitian_block(m, idx);
        for i in 0..idx.len() {
            h[(i, i)] += tol;
        }
        is_positive_definite(h)
    })
}

/// In-place Cholesky of a Hermitian matrix that stops at the first
/// non-positive pivot.
fn is_positive_definite(mut h: DMatrix<C64>) -> bool {
    let k = h.nrows();
    for j in 0..k {
        let mut d = h[(j, j)].re;
        for p in 0..j {
            d -= h[(j, p)].norm_sqr();
        }
        if !(d > 0.0) {
            return false;
        }
        let l = d.sqrt();
        h[(j, j)] = C64::new(l, 0.0);
        for i in j + 1..k {
            let mut s = h[(i, j)];
            for p in 0..j {
                s -= h[(i, p)] * h[(j, p)].conj();
            }
            h[(i, j)] = s / l;
        }
    }
    true
}

/// Smallest eigenvalue of the Hermitian part of `m`. Decoupled blocks are
/// diagonalised separately.
pub fn min_eigenvalue(m: &DMatrix<C64>) -> f64 {
    min_eigenvalue_on(m, &decoupled_blocks(m))
}

/// Thermal state of one mode truncated to `dim` levels:
/// `p_n ~ (n_th / (1 + n_th))^n`, renormalized over the kept levels.
pub fn thermal_state(n_th: f64, dim: usize) -> Result<QuantumState> {
    if !(n_th >= 0.0) || !n_th.is_finite() {
        return Err(Error::InvalidParameter(format!("thermal occupancy {n_th} must be >= 0")));
    }
    let basis = BasisDescriptor::single(dim)?;
    let x = n_th / (1.0 + n_th);
    let weights: Vec<f64> = (0..dim).map(|n| x.powi(n as i32)).collect();
    let z: f64 = weights.iter().sum();
    let rho = DMatrix::from_fn(dim, dim, |i, j| {
        if i == j { C64::new(weights[i] / z, 0.0) } else { C64::new(0.0, 0.0) }
    });
    QuantumState::density_unchecked(basis, rho)
}

/// `sqrt(<psi|rho|psi>)`, with round-off below zero clamped to 0.
pub fn fidelity_pure_vs_density(psi: &QuantumState, rho: &QuantumState) -> Result<f64> {
    if psi.basis() != rho.basis() {
        return Err(Error::BasisMismatch);
    }
    let v = psi
        .as_vector()
        .ok_or_else(|| Error::InvalidState("fidelity target must be a pure state".into()))?;
    let overlap = match rho.form() {
        StateForm::Pure(phi) => v.dotc(phi).norm_sqr(),
        StateForm::Density(r) => v.dotc(&(r * v)).re,
    };
    Ok(overlap.max(0.0).sqrt().min(1.0))
}

/// Reduced density matrix over `keep` (kept in basis order).
pub fn partial_trace(state: &QuantumState, keep: &[&str]) -> Result<QuantumState> {
    if keep.is_empty() {
        return Err(Error::InvalidParameter("partial trace needs a non-empty keep set".into()));
    }
    let basis = state.basis();
    let kept_basis = basis.restrict(keep)?;
    let kept_slots: Vec<usize> = kept_basis
        .labels()
        .iter()
        .map(|l| basis.slot(l))
        .collect::<Result<_>>()?;
    let traced_slots: Vec<usize> = (0..basis.num_modes()).filter(|s| !kept_slots.contains(s)).collect();

    let nk = kept_basis.total_dim();
    let nt: usize = traced_slots.iter().map(|&s| basis.dims()[s]).product();
    // full_index[a * nt + t] for kept index a, traced index t
    let mut full_index = vec![0usize; nk * nt];
    for (i, slot) in (0..basis.total_dim()).map(|i| (i, basis.levels_of(i))) {
        let mut a = 0;
        for &s in &kept_slots {
            a = a * basis.dims()[s] + slot[s];
        }
        let mut t = 0;
        for &s in &traced_slots {
            t = t * basis.dims()[s] + slot[s];
        }
        full_index[a * nt + t] = i;
    }

    let mut out = DMatrix::<C64>::zeros(nk, nk);
    match state.form() {
        StateForm::Pure(psi) => {
            for a in 0..nk {
                for b in 0..nk {
                    let mut acc = C64::new(0.0, 0.0);
                    for t in 0..nt {
                        acc += psi[full_index[a * nt + t]] * psi[full_index[b * nt + t]].conj();
                    }
                    out[(a, b)] = acc;
                }
            }
        }
        StateForm::Density(rho) => {
            for b in 0..nk {
                for a in 0..nk {
                    let mut acc = C64::new(0.0, 0.0);
                    for t in 0..nt {
                        acc += rho[(full_index[a * nt + t], full_index[b * nt + t])];
                    }
                    out[(a, b)] = acc;
                }
            }
        }
    }
    QuantumState::density_unchecked(kept_basis, out)
}
