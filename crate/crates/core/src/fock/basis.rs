use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Ordered tensor-product layout of truncated Fock spaces.
///
/// The first label is the leftmost Kronecker factor: the global index of the
/// multi-index `(n_0, .., n_{k-1})` is `sum_i n_i * stride_i` with the last
/// mode varying fastest. Cloning is cheap; descriptors are immutable.
#[derive(Clone, PartialEq, Eq)]
pub struct BasisDescriptor {
    inner: Arc<BasisInner>,
}

#[derive(PartialEq, Eq)]
struct BasisInner {
    labels: Vec<String>,
    dims: Vec<usize>,
    strides: Vec<usize>,
    total: usize,
}

impl BasisDescriptor {
    pub fn new<I, S>(modes: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let mut labels = Vec::new();
        let mut dims = Vec::new();
        for (label, dim) in modes {
            let label = label.into();
            if dim < 2 {
                return Err(Error::InvalidDimension { dim });
            }
            if labels.contains(&label) {
                return Err(Error::DuplicateLabel(label));
            }
            labels.push(label);
            dims.push(dim);
        }
        if dims.is_empty() {
            return Err(Error::InvalidSpec("basis needs at least one mode".into()));
        }
        let mut strides = vec![1; dims.len()];
        for i in (0..dims.len() - 1).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        let total = dims.iter().product();
        Ok(Self {
            inner: Arc::new(BasisInner { labels, dims, strides, total }),
        })
    }

    /// One mode labelled `"mode"`.
    pub fn single(dim: usize) -> Result<Self> {
        Self::new([("mode", dim)])
    }

    pub fn labels(&self) -> &[String] {
        &self.inner.labels
    }

    pub fn dims(&self) -> &[usize] {
        &self.inner.dims
    }

    pub fn strides(&self) -> &[usize] {
        &self.inner.strides
    }

    pub fn num_modes(&self) -> usize {
        self.inner.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.inner.total
    }

    pub fn slot(&self, label: &str) -> Result<usize> {
        self.inner
            .labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        Ok(self.inner.dims[self.slot(label)?])
    }

    /// Global index of a Fock multi-index given in label order.
    pub fn index_of(&self, levels: &[usize]) -> Result<usize> {
        if levels.len() != self.num_modes() {
            return Err(Error::DimensionMismatch {
                expected: self.num_modes(),
                found: levels.len(),
            });
        }
        let mut idx = 0;
        for ((&n, &d), &s) in levels.iter().zip(self.dims()).zip(self.strides()) {
            if n >= d {
                return Err(Error::InvalidParameter(format!("level {n} outside truncation {d}")));
            }
            idx += n * s;
        }
        Ok(idx)
    }

    /// Fock multi-index of a global index.
    pub fn levels_of(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.num_modes()];
        for (slot, &s) in self.strides().iter().enumerate() {
            out[slot] = index / s;
            index %= s;
        }
        out
    }

    /// Same labels with every dimension replaced by `f(label, dim)`.
    pub fn map_dims(&self, mut f: impl FnMut(&str, usize) -> usize) -> Result<Self> {
        Self::new(
            self.labels()
                .iter()
                .zip(self.dims())
                .map(|(l, &d)| (l.clone(), f(l, d))),
        )
    }

    /// Sub-basis made of the given labels, kept in this basis' order.
    pub fn restrict(&self, keep: &[&str]) -> Result<Self> {
        for k in keep {
            self.slot(k)?;
        }
        Self::new(
            self.labels()
                .iter()
                .zip(self.dims())
                .filter(|(l, _)| keep.contains(&l.as_str()))
                .map(|(l, &d)| (l.clone(), d)),
        )
    }
}

impl fmt::Debug for BasisDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Basis[")?;
        for (i, (l, d)) in self.labels().iter().zip(self.dims()).enumerate() {
            if i > 0 {
                f.write_str(" x ")?;
            }
            write!(f, "{l}:{d}")?;
        }
        f.write_str("]")
    }
}
