use nalgebra::DMatrix;

use super::basis::BasisDescriptor;
use super::sparse::CsrMatrix;
use crate::error::{Error, Result};
use crate::{tolerance, C64};

/// Total dimension from which operators are stored sparse.
pub const DENSE_LIMIT: usize = 512;

#[derive(Clone, Debug, PartialEq)]
pub enum Storage {
    Dense(DMatrix<C64>),
    Sparse(CsrMatrix),
}

/// Square complex matrix acting on a [`BasisDescriptor`].
///
/// Storage is chosen from the basis size alone (dense below
/// [`DENSE_LIMIT`]), so two operators on the same basis always share a
/// representation. The `hermitian` flag is only ever set after a check
/// against the global Hermiticity tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    basis: BasisDescriptor,
    storage: Storage,
    hermitian: bool,
}

fn uses_dense(basis: &BasisDescriptor) -> bool {
    basis.total_dim() < DENSE_LIMIT
}

impl OperatorMatrix {
    pub fn from_dense(basis: BasisDescriptor, m: DMatrix<C64>) -> Result<Self> {
        let n = basis.total_dim();
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: m.nrows().max(m.ncols()),
            });
        }
        let storage = if uses_dense(&basis) {
            Storage::Dense(m)
        } else {
            Storage::Sparse(CsrMatrix::from_dense(&m))
        };
        Ok(Self { basis, storage, hermitian: false })
    }

    pub fn from_csr(basis: BasisDescriptor, m: CsrMatrix) -> Result<Self> {
        let n = basis.total_dim();
        if m.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: m.dim() });
        }
        let storage = if uses_dense(&basis) {
            Storage::Dense(m.to_dense())
        } else {
            Storage::Sparse(m)
        };
        Ok(Self { basis, storage, hermitian: false })
    }

    pub fn from_triplets(
        basis: BasisDescriptor,
        triplets: impl IntoIterator<Item = (usize, usize, C64)>,
    ) -> Result<Self> {
        let n = basis.total_dim();
        let trip: Vec<_> = triplets.into_iter().collect();
        if let Some(&(r, c, _)) = trip.iter().find(|(r, c, _)| *r >= n || *c >= n) {
            return Err(Error::DimensionMismatch { expected: n, found: r.max(c) + 1 });
        }
        Self::from_csr(basis, CsrMatrix::from_triplets(n, trip))
    }

    /// Real diagonal operator; flagged Hermitian.
    pub fn from_real_diagonal(basis: BasisDescriptor, diag: &[f64]) -> Result<Self> {
        let trip = diag.iter().enumerate().map(|(i, &d)| (i, i, C64::new(d, 0.0)));
        let mut op = Self::from_triplets(basis, trip)?;
        if diag.len() != op.dim() {
            return Err(Error::DimensionMismatch { expected: op.dim(), found: diag.len() });
        }
        op.hermitian = true;
        Ok(op)
    }

    pub fn identity(basis: BasisDescriptor) -> Self {
        let n = basis.total_dim();
        let mut op = Self::from_csr(basis, CsrMatrix::identity(n)).expect("identity dimension");
        op.hermitian = true;
        op
    }

    pub fn zeros(basis: BasisDescriptor) -> Self {
        let n = basis.total_dim();
        let mut op = Self::from_csr(basis, CsrMatrix::zeros(n)).expect("zero dimension");
        op.hermitian = true;
        op
    }

    pub fn basis(&self) -> &BasisDescriptor {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.total_dim()
    }

    pub fn storage(&self) -> &Storage {
        &self.storage
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        match &self.storage {
            Storage::Dense(m) => m.clone(),
            Storage::Sparse(s) => s.to_dense(),
        }
    }

    pub fn to_csr(&self) -> CsrMatrix {
        match &self.storage {
            Storage::Dense(m) => CsrMatrix::from_dense(m),
            Storage::Sparse(s) => s.clone(),
        }
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        match &self.storage {
            Storage::Dense(m) => m[(r, c)],
            Storage::Sparse(s) => s.get(r, c),
        }
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.dim()).map(|i| self.get(i, i)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        match &self.storage {
            Storage::Dense(m) => m.iter().map(|v| v.norm()).fold(0.0, f64::max),
            Storage::Sparse(s) => s.iter().map(|(_, _, v)| v.norm()).fold(0.0, f64::max),
        }
    }

    pub fn max_offdiag(&self) -> f64 {
        match &self.storage {
            Storage::Dense(m) => {
                let mut best = 0.0f64;
                for j in 0..m.ncols() {
                    for i in 0..m.nrows() {
                        if i != j {
                            best = best.max(m[(i, j)].norm());
                        }
                    }
                }
                best
            }
            Storage::Sparse(s) => s
                .iter()
                .filter(|(r, c, _)| r != c)
                .map(|(_, _, v)| v.norm())
                .fold(0.0, f64::max),
        }
    }

    pub fn is_diagonal(&self) -> bool {
        self.max_offdiag() <= tolerance::get().diagonal
    }

    /// `max |M - M^dag|` over all entries.
    pub fn hermitian_deviation(&self) -> f64 {
        match &self.storage {
            Storage::Dense(m) => (m - m.adjoint()).iter().map(|v| v.norm()).fold(0.0, f64::max),
            Storage::Sparse(s) => s
                .lincomb(C64::new(1.0, 0.0), &s.adjoint(), C64::new(-1.0, 0.0))
                .iter()
                .map(|(_, _, v)| v.norm())
                .fold(0.0, f64::max),
        }
    }

    /// Checks Hermiticity against the global tolerance and sets the flag.
    pub fn into_hermitian(mut self) -> Result<Self> {
        let deviation = self.hermitian_deviation();
        if deviation > tolerance::get().hermitian {
            return Err(Error::NotHermitian { deviation });
        }
        self.hermitian = true;
        Ok(self)
    }

    fn same_basis(&self, other: &Self) -> Result<()> {
        if self.basis != other.basis {
            return Err(Error::BasisMismatch);
        }
        Ok(())
    }

    fn with_storage(&self, storage: Storage, hermitian: bool) -> Self {
        Self {
            basis: self.basis.clone(),
            storage,
            hermitian,
        }
    }

    pub fn adjoint(&self) -> Self {
        let storage = match &self.storage {
            Storage::Dense(m) => Storage::Dense(m.adjoint()),
            Storage::Sparse(s) => Storage::Sparse(s.adjoint()),
        };
        self.with_storage(storage, self.hermitian)
    }

    pub fn scale(&self, s: C64) -> Self {
        let storage = match &self.storage {
            Storage::Dense(m) => Storage::Dense(m * s),
            Storage::Sparse(m) => Storage::Sparse(m.scale(s)),
        };
        self.with_storage(storage, self.hermitian && s.im == 0.0)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// `a * self + b * other`.
    pub fn lincomb(&self, a: C64, other: &Self, b: C64) -> Result<Self> {
        self.same_basis(other)?;
        let storage = match (&self.storage, &other.storage) {
            (Storage::Dense(x), Storage::Dense(y)) => Storage::Dense(x * a + y * b),
            _ => Storage::Sparse(self.to_csr().lincomb(a, &other.to_csr(), b)),
        };
        let herm = self.hermitian && other.hermitian && a.im == 0.0 && b.im == 0.0;
        Ok(self.with_storage(storage, herm))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.lincomb(C64::new(1.0, 0.0), other, C64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.lincomb(C64::new(1.0, 0.0), other, C64::new(-1.0, 0.0))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.same_basis(other)?;
        let storage = match (&self.storage, &other.storage) {
            (Storage::Dense(x), Storage::Dense(y)) => Storage::Dense(x * y),
            _ => Storage::Sparse(self.to_csr().matmul(&other.to_csr())),
        };
        Ok(self.with_storage(storage, false))
    }

    /// `[self, other] = self*other - other*self`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.matmul(other)?.sub(&other.matmul(self)?)
    }

    /// Same matrix re-attached to an equal-sized basis (used to relabel a
    /// single-mode operator).
    pub fn rebased(&self, basis: BasisDescriptor) -> Result<Self> {
        if basis.total_dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: basis.total_dim(),
            });
        }
        let mut op = Self::from_csr(basis, self.to_csr())?;
        op.hermitian = self.hermitian;
        Ok(op)
    }
}

/// Lowering operator `a` on `dim` Fock levels: `a|n> = sqrt(n)|n-1>`.
pub fn ladder_lower(dim: usize) -> Result<OperatorMatrix> {
    let basis = BasisDescriptor::single(dim)?;
    OperatorMatrix::from_triplets(
        basis,
        (1..dim).map(|n| (n - 1, n, C64::new((n as f64).sqrt(), 0.0))),
    )
}

pub fn ladder_raise(dim: usize) -> Result<OperatorMatrix> {
    Ok(ladder_lower(dim)?.adjoint())
}

/// `a^dag a` with diagonal `(0, 1, .., dim-1)`.
pub fn number_op(dim: usize) -> Result<OperatorMatrix> {
    let basis = BasisDescriptor::single(dim)?;
    let diag: Vec<f64> = (0..dim).map(|n| n as f64).collect();
    OperatorMatrix::from_real_diagonal(basis, &diag)
}

/// Places a single-mode operator on `slot` of `basis`, identity elsewhere.
pub fn embed(op: &OperatorMatrix, basis: &BasisDescriptor, slot: &str) -> Result<OperatorMatrix> {
    let k = basis.slot(slot)?;
    let d = basis.dims()[k];
    if op.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: op.dim() });
    }
    let left: usize = basis.dims()[..k].iter().product();
    let right: usize = basis.dims()[k + 1..].iter().product();
    let local = op.to_csr();
    let full = CsrMatrix::identity(left)
        .kron(&local)
        .kron(&CsrMatrix::identity(right));
    let mut out = OperatorMatrix::from_csr(basis.clone(), full)?;
    out.hermitian = op.hermitian;
    Ok(out)
}
