//! Cross-Kerr model left after eliminating the fast membrane, and its
//! star-shaped multi-port extension.

use serde::{Deserialize, Serialize};

use super::collapse::{mode_collapse_ops, CollapseOp};
use super::spec::ModeKind;
use crate::error::{Error, Result};
use crate::fock::{embed, ladder_lower, BasisDescriptor, OperatorMatrix};

/// Ratio `max(omega_m2, |V|, |g|) / omega_m1` above which the elimination is
/// flagged as unreliable.
pub const VALIDITY_THRESHOLD: f64 = 0.1;

/// Physical parameters of the cavity, fast membrane and slow auxiliary
/// oscillator. `detuning` is already `omega_c - omega_d - g`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceParams {
    pub g: f64,
    pub omega_m1: f64,
    pub omega_m2: f64,
    #[serde(default)]
    pub v: f64,
    #[serde(default)]
    pub gamma1: f64,
    #[serde(default)]
    pub gamma2: f64,
    #[serde(default)]
    pub detuning: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EffectiveParams {
    #[serde(default)]
    pub detuning: f64,
    pub omega_eff: f64,
    pub g_eff: f64,
    #[serde(default)]
    pub gamma_eff: f64,
}

pub fn validity_ratio(d: &DeviceParams) -> f64 {
    d.omega_m2.abs().max(d.v.abs()).max(d.g.abs()) / d.omega_m1
}

/// `omega_eff = omega_m2 - V^2/omega_m1`, `g_eff = 2 g V^2/omega_m1^2`,
/// `gamma_eff = gamma2 + (V/omega_m1)^2 gamma1`. Logs a warning outside the
/// regime `omega_m1 >> omega_m2, V, g`.
pub fn effective_params(d: &DeviceParams) -> Result<EffectiveParams> {
    if d.omega_m1 == 0.0 || !d.omega_m1.is_finite() {
        return Err(Error::InvalidParameter("omega_m1 must be finite and nonzero".into()));
    }
    if [d.g, d.omega_m2, d.v, d.gamma1, d.gamma2, d.detuning].iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter("device parameters must be finite".into()));
    }
    if d.gamma1 < 0.0 || d.gamma2 < 0.0 {
        return Err(Error::InvalidParameter("mechanical damping rates must be >= 0".into()));
    }
    let ratio = validity_ratio(d);
    if ratio > VALIDITY_THRESHOLD {
        log::warn!(
            "adiabatic elimination outside its regime: max(omega_m2, V, g)/omega_m1 = {ratio:.3e}"
        );
    }
    let s = (d.v / d.omega_m1).powi(2);
    Ok(EffectiveParams {
        detuning: d.detuning,
        omega_eff: d.omega_m2 - d.v * d.v / d.omega_m1,
        g_eff: 2.0 * d.g * s,
        gamma_eff: d.gamma2 + s * d.gamma1,
    })
}

/// Sign of the cross-Kerr term `+/- g_eff n_a n_b`.
///
/// `Plus` is the effective Hamiltonian as usually written. `Minus` matches
/// the gate phase `theta_11 = (omega_eff + detuning - g_eff) t` and is also
/// what eliminating the membrane from the RWA model actually produces,
/// because the quadratic coupling enters with `-g`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KerrSign {
    #[default]
    Plus,
    Minus,
}

impl KerrSign {
    pub fn factor(self) -> f64 {
        match self {
            KerrSign::Plus => 1.0,
            KerrSign::Minus => -1.0,
        }
    }
}

pub const CAVITY: &str = "a";
pub const AUX: &str = "b";

pub fn effective_basis(dims: [usize; 2]) -> Result<BasisDescriptor> {
    BasisDescriptor::new([(CAVITY, dims[0]), (AUX, dims[1])])
}

/// `detuning n_a + omega_eff n_b + g_eff n_a n_b` on `(cavity, aux)`.
pub fn build_effective_hamiltonian(p: &EffectiveParams, dims: [usize; 2]) -> Result<OperatorMatrix> {
    build_effective_hamiltonian_signed(p, dims, KerrSign::Plus)
}

pub fn build_effective_hamiltonian_signed(
    p: &EffectiveParams,
    dims: [usize; 2],
    sign: KerrSign,
) -> Result<OperatorMatrix> {
    let basis = effective_basis(dims)?;
    let k = sign.factor() * p.g_eff;
    let mut diag = Vec::with_capacity(basis.total_dim());
    for na in 0..dims[0] {
        for nb in 0..dims[1] {
            let (na, nb) = (na as f64, nb as f64);
            diag.push(p.detuning * na + p.omega_eff * nb + k * na * nb);
        }
    }
    OperatorMatrix::from_real_diagonal(basis, &diag)
}

/// Effective model with its dissipation: cavity loss `kappa` and the
/// auxiliary oscillator damped at `gamma_eff` into a bath with `n_th`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectiveModel {
    pub params: EffectiveParams,
    pub kappa: f64,
    pub n_th: f64,
    pub dims: [usize; 2],
    #[serde(default)]
    pub kerr_sign: KerrSign,
}

impl EffectiveModel {
    pub fn basis(&self) -> Result<BasisDescriptor> {
        effective_basis(self.dims)
    }

    pub fn hamiltonian(&self) -> Result<OperatorMatrix> {
        build_effective_hamiltonian_signed(&self.params, self.dims, self.kerr_sign)
    }

    pub fn collapse_ops(&self) -> Result<Vec<CollapseOp>> {
        let basis = self.basis()?;
        let mut ops = mode_collapse_ops(&basis, CAVITY, ModeKind::Optical, self.kappa, 0.0)?;
        ops.extend(mode_collapse_ops(&basis, AUX, ModeKind::Mechanical, self.params.gamma_eff, self.n_th)?);
        Ok(ops)
    }
}

pub fn port_cavity(j: usize) -> String {
    format!("a{}", j + 1)
}

pub fn port_aux(j: usize) -> String {
    format!("b{}", j + 1)
}

/// Basis `a1, b1, a2, b2, ...` with `dims[j] = [cavity, aux]`.
pub fn multipath_basis(dims: &[[usize; 2]]) -> Result<BasisDescriptor> {
    BasisDescriptor::new(
        dims.iter()
            .enumerate()
            .flat_map(|(j, d)| [(port_cavity(j), d[0]), (port_aux(j), d[1])]),
    )
}

/// Sum of per-port effective Hamiltonians plus hopping
/// `J_s (a1^dag a_{s+1} + h.c.)` from cavity 1 to every other cavity.
pub fn build_multipath_effective(
    ports: &[EffectiveParams],
    hops: &[f64],
    dims: &[[usize; 2]],
) -> Result<OperatorMatrix> {
    let n = ports.len();
    if n == 0 {
        return Err(Error::InvalidParameter("multipath network needs at least one port".into()));
    }
    if hops.len() != n - 1 {
        return Err(Error::DimensionMismatch { expected: n - 1, found: hops.len() });
    }
    if dims.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: dims.len() });
    }
    let basis = multipath_basis(dims)?;
    let total = basis.total_dim();
    let mut diag = vec![0.0; total];
    for (i, e) in diag.iter_mut().enumerate() {
        let lv = basis.levels_of(i);
        for (j, p) in ports.iter().enumerate() {
            let (na, nb) = (lv[2 * j] as f64, lv[2 * j + 1] as f64);
            *e += p.detuning * na + p.omega_eff * nb + p.g_eff * na * nb;
        }
    }
    let mut h = OperatorMatrix::from_real_diagonal(basis.clone(), &diag)?;
    if n > 1 {
        let a1 = embed(&ladder_lower(dims[0][0])?, &basis, &port_cavity(0))?;
        for (s, &j) in hops.iter().enumerate() {
            if j == 0.0 {
                continue;
            }
            let label = port_cavity(s + 1);
            let a = embed(&ladder_lower(basis.dim_of(&label)?)?, &basis, &label)?;
            let hop = a1.adjoint().matmul(&a)?;
            h = h.add(&hop.add(&hop.adjoint())?.scale_real(j))?;
        }
    }
    h.into_hermitian()
}

/// One port of a multipath network.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Port {
    pub params: EffectiveParams,
    pub kappa: f64,
    pub n_th: f64,
    pub dims: [usize; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultipathModel {
    pub ports: Vec<Port>,
    pub hops: Vec<f64>,
}

impl MultipathModel {
    fn dims(&self) -> Vec<[usize; 2]> {
        self.ports.iter().map(|p| p.dims).collect()
    }

    pub fn basis(&self) -> Result<BasisDescriptor> {
        multipath_basis(&self.dims())
    }

    pub fn hamiltonian(&self) -> Result<OperatorMatrix> {
        let params: Vec<EffectiveParams> = self.ports.iter().map(|p| p.params).collect();
        build_multipath_effective(&params, &self.hops, &self.dims())
    }

    pub fn collapse_ops(&self) -> Result<Vec<CollapseOp>> {
        let basis = self.basis()?;
        let mut ops = Vec::new();
        for (j, p) in self.ports.iter().enumerate() {
            ops.extend(mode_collapse_ops(&basis, &port_cavity(j), ModeKind::Optical, p.kappa, 0.0)?);
            ops.extend(mode_collapse_ops(
                &basis,
                &port_aux(j),
                ModeKind::Mechanical,
                p.params.gamma_eff,
                p.n_th,
            )?);
        }
        Ok(ops)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn device(v: f64) -> DeviceParams {
        DeviceParams { g: 1e-4, omega_m1: 1.0, omega_m2: 1e-3, v, gamma1: 1e-6, gamma2: 1e-9, detuning: 0.0 }
    }

    #[test]
    fn rejects_negative_damping_and_non_finite_input() {
        assert!(effective_params(&DeviceParams { gamma1: -1e-6, ..device(0.01) }).is_err());
        assert!(effective_params(&DeviceParams { g: f64::NAN, ..device(0.01) }).is_err());
    }

    #[test]
    fn zero_crossing_and_decoupled_limit() {
        let p = effective_params(&device(1e-3f64.sqrt())).unwrap();
        assert!(p.omega_eff.abs() < 1e-15);
        let p = effective_params(&device(0.0)).unwrap();
        assert_eq!((p.omega_eff, p.g_eff, p.gamma_eff), (1e-3, 0.0, 1e-9));
        let mut d = device(0.01);
        d.omega_m1 = 0.0;
        assert!(effective_params(&d).is_err());
    }

    #[test]
    fn kerr_ratio_near_one_percent() {
        let p = effective_params(&device(3.131e-2)).unwrap();
        let r = (p.g_eff / p.omega_eff).abs();
        assert!((r - 0.01).abs() < 0.0005, "{r}");
    }

    #[test]
    fn effective_entries() {
        let p = EffectiveParams { detuning: 0.3, omega_eff: 1.1, g_eff: 0.25, gamma_eff: 0.0 };
        let h = build_effective_hamiltonian(&p, [3, 4]).unwrap();
        let basis = h.basis().clone();
        assert!((h.get(basis.index_of(&[1, 1]).unwrap(), basis.index_of(&[1, 1]).unwrap()).re - 1.65).abs() < 1e-15);
        for n in 0..4 {
            let i = basis.index_of(&[0, n]).unwrap();
            assert!((h.get(i, i).re - 1.1 * n as f64).abs() < 1e-15);
        }
        assert_eq!(h.max_offdiag(), 0.0);
        let hm = build_effective_hamiltonian_signed(&p, [3, 4], KerrSign::Minus).unwrap();
        let i = basis.index_of(&[2, 3]).unwrap();
        assert!((hm.get(i, i).re - (0.6 + 3.3 - 1.5)).abs() < 1e-14);
    }

    #[test]
    fn single_port_network_is_effective_model() {
        let p = EffectiveParams { detuning: 0.2, omega_eff: 1.0, g_eff: 0.4, gamma_eff: 0.0 };
        let a = build_multipath_effective(&[p], &[], &[[3, 3]]).unwrap();
        let b = build_effective_hamiltonian(&p, [3, 3]).unwrap();
        assert_eq!(a.to_dense(), b.to_dense());
        assert!(matches!(
            build_multipath_effective(&[p, p], &[], &[[2, 2], [2, 2]]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn uncoupled_ports_are_a_direct_sum() {
        let p1 = EffectiveParams { detuning: 0.2, omega_eff: 1.0, g_eff: 0.4, gamma_eff: 0.0 };
        let p2 = EffectiveParams { detuning: -0.1, omega_eff: 0.7, g_eff: 0.9, gamma_eff: 0.0 };
        let h = build_multipath_effective(&[p1, p2], &[0.0], &[[2, 3], [2, 2]]).unwrap();
        let h1 = build_effective_hamiltonian(&p1, [2, 3]).unwrap().to_dense();
        let h2 = build_effective_hamiltonian(&p2, [2, 2]).unwrap().to_dense();
        let id1 = nalgebra::DMatrix::identity(6, 6);
        let id2 = nalgebra::DMatrix::identity(4, 4);
        let expect = h1.kronecker(&id2) + id1.kronecker(&h2);
        assert!((h.to_dense() - expect).camax() < 1e-14);
    }

    #[test]
    fn hop_block_splits_by_two_j() {
        let p = EffectiveParams { detuning: 0.0, omega_eff: 1.0, g_eff: 0.0, gamma_eff: 0.0 };
        let j = 0.15;
        let h = build_multipath_effective(&[p, p], &[j], &[[2, 2], [2, 2]]).unwrap();
        let basis = h.basis().clone();
        let i1 = basis.index_of(&[1, 0, 0, 0]).unwrap();
        let i2 = basis.index_of(&[0, 0, 1, 0]).unwrap();
        let block = nalgebra::Matrix2::new(h.get(i1, i1).re, h.get(i1, i2).re, h.get(i2, i1).re, h.get(i2, i2).re);
        let ev = block.symmetric_eigenvalues();
        // a photon starting in cavity 1 oscillates with angular frequency 2J
        assert!(((ev[0] - ev[1]).abs() - 2.0 * j).abs() < 1e-14);
        assert!(h.hermitian_deviation() == 0.0);
    }

    #[test]
    fn effective_collapse_channels() {
        let m = EffectiveModel {
            params: EffectiveParams { detuning: 0.0, omega_eff: 1.0, g_eff: 0.1, gamma_eff: 0.01 },
            kappa: 0.02,
            n_th: 1.0,
            dims: [3, 4],
            kerr_sign: KerrSign::Minus,
        };
        let rates: Vec<f64> = m.collapse_ops().unwrap().iter().map(|c| c.rate).collect();
        assert_eq!(rates, vec![0.02, 0.02, 0.01]);
    }

    fn reference(g: f64, w1: f64, w2: f64, v: f64, y1: f64, y2: f64) -> (f64, f64, f64) {
        let k = v * v / (w1 * w1);
        (w2 - v * v / w1, 2.0 * g * k, y2 + k * y1)
    }

    proptest! {
        #[test]
        fn mapping_matches_reference(
            g in 0.0..1e-2f64, w1 in 0.5..2.0f64, w2 in 0.0..1e-2f64,
            v in 0.0..0.1f64, y1 in 0.0..1e-3f64, y2 in 0.0..1e-3f64,
        ) {
            let d = DeviceParams { g, omega_m1: w1, omega_m2: w2, v, gamma1: y1, gamma2: y2, detuning: 0.0 };
            let p = effective_params(&d).unwrap();
            let (w, ge, ye) = reference(g, w1, w2, v, y1, y2);
            prop_assert!((p.omega_eff - w).abs() <= 1e-14 * w.abs().max(1e-3));
            prop_assert!((p.g_eff - ge).abs() <= 1e-14 * ge.max(1e-12));
            prop_assert!((p.gamma_eff - ye).abs() <= 1e-14 * ye.max(1e-12));
            prop_assert!(p.gamma_eff >= 0.0 && p.g_eff >= 0.0);
        }

        #[test]
        fn kerr_and_damping_increase_with_v(v in 1e-4..0.2f64, dv in 1e-4..0.1f64) {
            let a = effective_params(&device(v)).unwrap();
            let b = effective_params(&device(v + dv)).unwrap();
            prop_assert!(b.g_eff > a.g_eff);
            prop_assert!(b.gamma_eff > a.gamma_eff);
        }
    }
}
