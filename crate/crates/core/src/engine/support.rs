//! Restriction of the Lindblad generator to the matrix entries reachable
//! from the initial state.
//!
//! Symmetries such as photon-number conservation keep most entries of
//! `rho` at exactly zero for all times. The reachable set is the closure of
//! the initial support under the generator's coupling graph; integrating on
//! that set alone is exact.

use nalgebra::DMatrix;

use super::rhs::Liouvillian;
use crate::fock::{blocks_from_edges, CsrMatrix};
use crate::C64;

/// Largest `n^2` for which the closure is attempted.
const MAX_ENTRIES: usize = 1 << 26;
/// Above this fill fraction the dense kernels are cheaper.
const MAX_FILL: f64 = 0.25;

/// Generator acting on the vector of reachable entries, stored row-wise
/// (one row per target entry).
#[derive(Clone, Debug)]
pub(crate) struct ReducedLiouvillian {
    /// Column-major flat index `c * n + r` of each kept entry.
    entries: Vec<usize>,
    /// Position of the transposed entry, or `usize::MAX` if it is not kept.
    partner: Vec<usize>,
    /// Positions of kept diagonal entries.
    diagonal: Vec<usize>,
    indptr: Vec<usize>,
    sources: Vec<usize>,
    coeffs: Vec<C64>,
}

fn column_patterns(m: &CsrMatrix) -> Vec<Vec<usize>> {
    let mut cols = vec![Vec::new(); m.dim()];
    for (r, c, _) in m.iter() {
        cols[c].push(r);
    }
    cols
}

impl ReducedLiouvillian {
    /// `None` when the reachable set is too large to pay off.
    pub(crate) fn build(l: &Liouvillian, rho0: &DMatrix<C64>) -> Option<Self> {
        let n = l.dim();
        if n * n > MAX_ENTRIES {
            return None;
        }
        let limit = (MAX_FILL * (n * n) as f64) as usize;
        let h_cols = column_patterns(l.h_nh());
        let j_cols: Vec<_> = l.jumps().iter().map(|(j, _)| column_patterns(j)).collect();

        let zero = C64::new(0.0, 0.0);
        let mut seen = vec![false; n * n];
        let mut queue: Vec<usize> = Vec::new();
        for (idx, v) in rho0.as_slice().iter().enumerate() {
            if *v != zero {
                seen[idx] = true;
                queue.push(idx);
            }
        }
        let mut head = 0;
        while head < queue.len() {
            if queue.len() > limit {
                return None;
            }
            let (r0, c0) = (queue[head] % n, queue[head] / n);
            head += 1;
            let mut visit = |r: usize, c: usize| {
                let idx = c * n + r;
                if !seen[idx] {
                    seen[idx] = true;
                    queue.push(idx);
                }
            };
            for &r in &h_cols[r0] {
                visit(r, c0);
            }
            for &c in &h_cols[c0] {
                visit(r0, c);
            }
            for cols in &j_cols {
                for &r in &cols[r0] {
                    for &c in &cols[c0] {
                        visit(r, c);
                    }
                }
            }
        }

        let mut entries = queue;
        entries.sort_unstable();
        let mut slot = vec![usize::MAX; n * n];
        for (i, &idx) in entries.iter().enumerate() {
            slot[idx] = i;
        }

        let mut indptr = Vec::with_capacity(entries.len() + 1);
        indptr.push(0);
        let (mut sources, mut coeffs) = (Vec::new(), Vec::new());
        let mut row: Vec<(usize, C64)> = Vec::new();
        for &idx in &entries {
            let (r, c) = (idx % n, idx / n);
            row.clear();
            let mut push = |rr: usize, cc: usize, v: C64| {
                let s = slot[cc * n + rr];
                if s != usize::MAX {
                    row.push((s, v));
                }
            };
            for (rr, v) in l.h_nh().row(r) {
                push(rr, c, C64::new(0.0, -1.0) * v);
            }
            for (cc, v) in l.h_nh().row(c) {
                push(r, cc, C64::new(0.0, 1.0) * v.conj());
            }
            for (j, rate) in l.jumps() {
                for (rr, a) in j.row(r) {
                    for (cc, b) in j.row(c) {
                        push(rr, cc, a * b.conj() * *rate);
                    }
                }
            }
            row.sort_unstable_by_key(|&(s, _)| s);
            let mut last = usize::MAX;
            for &(s, v) in row.iter() {
                if s == last {
                    *coeffs.last_mut().unwrap() += v;
                } else {
                    sources.push(s);
                    coeffs.push(v);
                    last = s;
                }
            }
            indptr.push(sources.len());
        }
        let partner = entries.iter().map(|&idx| slot[(idx % n) * n + idx / n]).collect();
        let diagonal = (0..entries.len()).filter(|&i| entries[i] % n == entries[i] / n).collect();
        Some(Self { entries, partner, diagonal, indptr, sources, coeffs })
    }

    /// Decoupled index blocks of any matrix supported on the kept entries.
    pub(crate) fn blocks(&self, n: usize) -> Vec<Vec<usize>> {
        blocks_from_edges(n, self.entries.iter().map(|&idx| (idx % n, idx / n)))
    }

    pub(crate) fn len(&self) -> usize {
        self.entries.len()
    }

    pub(crate) fn gather(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let s = rho.as_slice();
        DMatrix::from_iterator(self.len(), 1, self.entries.iter().map(|&i| s[i]))
    }

    #[cfg(test)]
    fn scatter(&self, y: &DMatrix<C64>, rho: &mut DMatrix<C64>) {
        let out = rho.as_mut_slice();
        for (&i, &v) in self.entries.iter().zip(y.as_slice()) {
            out[i] = v;
        }
    }

    pub(crate) fn trace(&self, y: &DMatrix<C64>) -> f64 {
        self.diagonal.iter().map(|&i| y[i].re).sum()
    }

    /// Writes `scale * (rho + rho^dag) / 2` into the kept entries of
    /// `rho_out` and returns the purity of what was written.
    pub(crate) fn scatter_hermitian(&self, y: &DMatrix<C64>, scale: f64, rho_out: &mut DMatrix<C64>) -> f64 {
        let (ys, out) = (y.as_slice(), rho_out.as_mut_slice());
        let mut purity = 0.0;
        for (k, (&i, &p)) in self.entries.iter().zip(&self.partner).enumerate() {
            let t = if p == usize::MAX { C64::new(0.0, 0.0) } else { ys[p].conj() };
            let v = (ys[k] + t) * (0.5 * scale);
            purity += v.norm_sqr();
            out[i] = v;
        }
        purity
    }

    pub(crate) fn apply(&self, y: &DMatrix<C64>, out: &mut DMatrix<C64>) {
        let ys = y.as_slice();
        for (k, o) in out.as_mut_slice().iter_mut().enumerate() {
            let span = self.indptr[k]..self.indptr[k + 1];
            let mut acc = C64::new(0.0, 0.0);
            for (&s, &v) in self.sources[span.clone()].iter().zip(&self.coeffs[span]) {
                acc += v * ys[s];
            }
            *o = acc;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{embed, ladder_lower, BasisDescriptor, QuantumState};
    use crate::model::CollapseOp;

    fn two_modes() -> (Liouvillian, QuantumState) {
        let basis = BasisDescriptor::new([("a", 3), ("b", 4)]).unwrap();
        let a = embed(&ladder_lower(3).unwrap(), &basis, "a").unwrap();
        let b = embed(&ladder_lower(4).unwrap(), &basis, "b").unwrap();
        let na = a.adjoint().matmul(&a).unwrap();
        let nb = b.adjoint().matmul(&b).unwrap();
        let h = na.add(&nb.scale_real(0.7)).unwrap().add(&na.matmul(&nb).unwrap().scale_real(0.2)).unwrap();
        let collapse = [
            CollapseOp { op: a.clone(), rate: 0.3 },
            CollapseOp { op: b.clone(), rate: 0.05 },
            CollapseOp { op: b.adjoint(), rate: 0.02 },
        ];
        let l = Liouvillian::new(&h, &collapse).unwrap();
        (l, QuantumState::fock(basis, &[1, 0]).unwrap())
    }

    #[test]
    fn matches_full_generator_on_reachable_states() {
        let (l, rho0) = two_modes();
        let r = ReducedLiouvillian::build(&l, &rho0.to_density_matrix()).unwrap();
        // populations only: no coherences are ever generated
        assert_eq!(r.len(), 8);
        let n = l.dim();
        let mut rho = DMatrix::<C64>::zeros(n, n);
        for (k, &i) in r.entries.iter().enumerate() {
            rho.as_mut_slice()[i] = C64::new(0.1 * k as f64, 0.0);
        }
        let (mut full, mut scratch) = (DMatrix::zeros(n, n), DMatrix::zeros(n, n));
        l.apply(&rho, &mut full, &mut scratch);
        let y = r.gather(&rho);
        let mut dy = y.clone();
        r.apply(&y, &mut dy);
        let mut back = DMatrix::<C64>::zeros(n, n);
        r.scatter(&dy, &mut back);
        assert!((back - full).camax() < 1e-14);
    }

    #[test]
    fn dense_support_is_declined() {
        let (l, _) = two_modes();
        let n = l.dim();
        let rho = DMatrix::from_element(n, n, C64::new(1.0 / n as f64, 0.0));
        assert!(ReducedLiouvillian::build(&l, &rho).is_none());
    }
}
