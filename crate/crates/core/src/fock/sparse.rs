//! Compressed sparse row storage for square complex matrices, with the
//! sparse-times-dense kernels used by the master-equation right-hand side.

use nalgebra::DMatrix;

use crate::C64;

#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<C64>,
}

impl CsrMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            indptr: vec![0; n + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            indptr: (0..=n).collect(),
            indices: (0..n).collect(),
            values: vec![C64::new(1.0, 0.0); n],
        }
    }

    /// Builds from `(row, col, value)` triplets; duplicates are summed and
    /// exact zeros dropped.
    pub fn from_triplets(n: usize, triplets: impl IntoIterator<Item = (usize, usize, C64)>) -> Self {
        let mut t: Vec<(usize, usize, C64)> = triplets.into_iter().collect();
        t.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0usize; n + 1];
        let mut indices = Vec::with_capacity(t.len());
        let mut values: Vec<C64> = Vec::with_capacity(t.len());
        let mut rows = Vec::with_capacity(t.len());
        for (r, c, v) in t {
            assert!(r < n && c < n, "triplet ({r}, {c}) outside {n}x{n}");
            if let (Some(&lr), Some(&lc)) = (rows.last(), indices.last()) {
                if lr == r && lc == c {
                    *values.last_mut().unwrap() += v;
                    continue;
                }
            }
            rows.push(r);
            indices.push(c);
            values.push(v);
        }
        let zero = C64::new(0.0, 0.0);
        let (mut ri, mut ci, mut vi) = (Vec::new(), Vec::new(), Vec::new());
        for ((r, c), v) in rows.into_iter().zip(indices).zip(values) {
            if v != zero {
                ri.push(r);
                ci.push(c);
                vi.push(v);
            }
        }
        for &r in &ri {
            indptr[r + 1] += 1;
        }
        for i in 0..n {
            indptr[i + 1] += indptr[i];
        }
        Self {
            n,
            indptr,
            indices: ci,
            values: vi,
        }
    }

    pub fn from_dense(m: &DMatrix<C64>) -> Self {
        let n = m.nrows();
        let mut trip = Vec::new();
        for j in 0..n {
            for i in 0..n {
                let v = m[(i, j)];
                if v != C64::new(0.0, 0.0) {
                    trip.push((i, j, v));
                }
            }
        }
        Self::from_triplets(n, trip)
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for (r, c, v) in self.iter() {
            m[(r, c)] += v;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let span = self.indptr[r]..self.indptr[r + 1];
        self.indices[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.n).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.row(r)
            .find(|&(cc, _)| cc == c)
            .map(|(_, v)| v)
            .unwrap_or_default()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.n, self.iter().map(|(r, c, v)| (c, r, v.conj())))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_triplets(self.n, self.iter().map(|(r, c, v)| (r, c, v * s)))
    }

    /// `a * self + b * other`.
    pub fn lincomb(&self, a: C64, other: &Self, b: C64) -> Self {
        assert_eq!(self.n, other.n);
        Self::from_triplets(
            self.n,
            self.iter()
                .map(|(r, c, v)| (r, c, a * v))
                .chain(other.iter().map(|(r, c, v)| (r, c, b * v))),
        )
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut trip = Vec::new();
        for r in 0..self.n {
            for (k, v) in self.row(r) {
                for (c, w) in other.row(k) {
                    trip.push((r, c, v * w));
                }
            }
        }
        Self::from_triplets(self.n, trip)
    }

    /// Kronecker product `self (x) other`.
    pub fn kron(&self, other: &Self) -> Self {
        let m = other.n;
        let mut trip = Vec::with_capacity(self.nnz() * other.nnz());
        for (r1, c1, v1) in self.iter() {
            for (r2, c2, v2) in other.iter() {
                trip.push((r1 * m + r2, c1 * m + c2, v1 * v2));
            }
        }
        Self::from_triplets(self.n * m, trip)
    }

    /// `out += alpha * self * x` for a dense square `x`.
    pub fn gemm_into(&self, alpha: C64, x: &DMatrix<C64>, out: &mut DMatrix<C64>) {
        let n = self.n;
        assert_eq!(x.shape(), (n, n));
        assert_eq!(out.shape(), (n, n));
        let xs = x.as_slice();
        let os = out.as_mut_slice();
        for j in 0..n {
            let xcol = &xs[j * n..(j + 1) * n];
            let ocol = &mut os[j * n..(j + 1) * n];
            for (r, o) in ocol.iter_mut().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for p in self.indptr[r]..self.indptr[r + 1] {
                    acc += self.values[p] * xcol[self.indices[p]];
                }
                *o += alpha * acc;
            }
        }
    }

    /// `out += alpha * x * self^dag` for a dense square `x`.
    pub fn gemm_adjoint_right_into(&self, alpha: C64, x: &DMatrix<C64>, out: &mut DMatrix<C64>) {
        let n = self.n;
        assert_eq!(x.shape(), (n, n));
        assert_eq!(out.shape(), (n, n));
        let xs = x.as_slice();
        let os = out.as_mut_slice();
        // (x S^dag)[:, j] = sum_k conj(S[j, k]) x[:, k]
        for j in 0..n {
            let ocol = &mut os[j * n..(j + 1) * n];
            for p in self.indptr[j]..self.indptr[j + 1] {
                let w = alpha * self.values[p].conj();
                let k = self.indices[p];
                let xcol = &xs[k * n..(k + 1) * n];
                for (o, &xv) in ocol.iter_mut().zip(xcol) {
                    *o += w * xv;
                }
            }
        }
    }
}
