//! Measurement-based photon-to-phonon converter: Hadamard on the phonon,
//! control-phase-flip, Hadamards on both qubits, photon readout and a
//! parity correction on the phonon.

use nalgebra::{DMatrix, DVector};

use crate::engine::{evolve, propagate_diagonal, EvolveConfig};
use crate::error::{Error, Result};
use crate::fock::{embed, BasisDescriptor, OperatorMatrix, QuantumState, StateForm};
use crate::model::effective::{effective_basis, AUX, CAVITY};
use crate::model::EffectiveModel;
use crate::{tolerance, C64};

/// Hadamard on levels `{0, 1}` of `label`, identity on the levels above.
pub fn hadamard(basis: &BasisDescriptor, label: &str) -> Result<OperatorMatrix> {
    let d = basis.dim_of(label)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let local = DMatrix::from_fn(d, d, |i, j| match (i, j) {
        (1, 1) => C64::new(-s, 0.0),
        (0..=1, 0..=1) => C64::new(s, 0.0),
        _ if i == j => C64::new(1.0, 0.0),
        _ => C64::new(0.0, 0.0),
    });
    embed(&OperatorMatrix::from_dense(BasisDescriptor::single(d)?, local)?, basis, label)
}

/// `(-1)^n` on `label`.
fn parity(basis: &BasisDescriptor, label: &str) -> Result<OperatorMatrix> {
    let d = basis.dim_of(label)?;
    let diag: Vec<f64> = (0..d).map(|n| if n % 2 == 0 { 1.0 } else { -1.0 }).collect();
    embed(&OperatorMatrix::from_real_diagonal(BasisDescriptor::single(d)?, &diag)?, basis, label)
}

fn apply(op: &OperatorMatrix, s: &QuantumState) -> Result<QuantumState> {
    let m = op.to_dense();
    match s.form() {
        StateForm::Pure(v) => QuantumState::pure_normalized(s.basis().clone(), &m * v),
        StateForm::Density(r) => QuantumState::density_unchecked(s.basis().clone(), &m * r * m.adjoint()),
    }
}

/// How the control-phase-flip step is realised.
#[derive(Clone, Debug, PartialEq)]
pub enum GateModel {
    /// `diag(1, 1, 1, -1)` on two qubits.
    Ideal,
    /// Evolution of an effective model for `gate_time`, dissipation included.
    Simulated { model: EffectiveModel, gate_time: f64 },
}

fn check_input(alpha: C64, beta: C64) -> Result<()> {
    let n = alpha.norm_sqr() + beta.norm_sqr();
    if (n - 1.0).abs() > tolerance::get().pure_norm {
        return Err(Error::InvalidState(format!("converter input has norm^2 {n}")));
    }
    Ok(())
}

/// Joint photon-phonon state just before the photon is measured, for a
/// photon `alpha|0> + beta|1>` and a phonon cooled to `|0>`. The photon is
/// the first mode.
pub fn converter_postgate_state(alpha: C64, beta: C64, gate: &GateModel) -> Result<QuantumState> {
    check_input(alpha, beta)?;
    let basis = match gate {
        GateModel::Ideal => effective_basis([2, 2])?,
        GateModel::Simulated { model, .. } => model.basis()?,
    };
    let mut psi = DVector::zeros(basis.total_dim());
    psi[basis.index_of(&[0, 0])?] = alpha;
    psi[basis.index_of(&[1, 0])?] = beta;
    let s = QuantumState::pure(basis.clone(), psi)?;
    let s = apply(&hadamard(&basis, AUX)?, &s)?;

    let s = match gate {
        GateModel::Ideal => {
            let cz = OperatorMatrix::from_real_diagonal(basis.clone(), &[1.0, 1.0, 1.0, -1.0])?;
            apply(&cz, &s)?
        }
        GateModel::Simulated { model, gate_time } => {
            let h = model.hamiltonian()?;
            let collapse = model.collapse_ops()?;
            if collapse.is_empty() {
                propagate_diagonal(&s, &h, *gate_time)?
            } else {
                let traj = evolve(&s, &h, &collapse, &EvolveConfig::new(vec![0.0, *gate_time]))?;
                traj.states.into_iter().last().expect("two samples")
            }
        }
    };

    let s = apply(&hadamard(&basis, CAVITY)?, &s)?;
    apply(&hadamard(&basis, AUX)?, &s)
}

/// `alpha|0> + beta|1>` on the single-mode `basis`.
pub fn converter_target(basis: &BasisDescriptor, alpha: C64, beta: C64) -> Result<QuantumState> {
    check_input(alpha, beta)?;
    let mut psi = DVector::zeros(basis.total_dim());
    psi[basis.index_of(&[0])?] = alpha;
    psi[basis.index_of(&[1])?] = beta;
    QuantumState::pure(basis.clone(), psi)
}

/// Projects the photon (first mode) onto `|outcome>` and returns the
/// conditional phonon state, with `(-1)^n` applied when `outcome == 1`,
/// together with the outcome probability.
pub fn measure_and_correct(joint: &QuantumState, outcome: usize) -> Result<(QuantumState, f64)> {
    let basis = joint.basis();
    if basis.num_modes() != 2 {
        return Err(Error::InvalidParameter("converter state must have exactly two modes".into()));
    }
    let (photon_dim, phonon_dim) = (basis.dims()[0], basis.dims()[1]);
    if outcome >= photon_dim {
        return Err(Error::InvalidParameter(format!("outcome {outcome} outside photon dimension {photon_dim}")));
    }
    let phonon_label = basis.labels()[1].clone();
    let phonon_basis = basis.restrict(&[phonon_label.as_str()])?;
    let row = |n: usize| outcome * phonon_dim + n;

    let (state, p) = match joint.form() {
        StateForm::Pure(v) => {
            let phi = DVector::from_fn(phonon_dim, |n, _| v[row(n)]);
            let p = phi.norm_squared();
            check_probability(outcome, p)?;
            (QuantumState::pure_normalized(phonon_basis.clone(), phi)?, p)
        }
        StateForm::Density(r) => {
            let sub = DMatrix::from_fn(phonon_dim, phonon_dim, |m, n| r[(row(m), row(n))]);
            let p = sub.trace().re;
            check_probability(outcome, p)?;
            (QuantumState::density_unchecked(phonon_basis.clone(), sub / C64::new(p, 0.0))?, p)
        }
    };
    let state = if outcome == 1 { apply(&parity(&phonon_basis, &phonon_label)?, &state)? } else { state };
    Ok((state, p))
}

fn check_probability(outcome: usize, p: f64) -> Result<()> {
    if !(p >= 1e-12) {
        return Err(Error::ImpossibleOutcome { outcome, probability: p });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{fidelity_pure_vs_density, partial_trace};
    use crate::model::{EffectiveParams, KerrSign};
    use crate::protocols::solve_phase_conditions;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn vacuum_photon_leaves_phonon_alone() {
        let s = converter_postgate_state(c(1.0, 0.0), c(0.0, 0.0), &GateModel::Ideal).unwrap();
        let v = s.as_vector().unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        // |+>|0>
        let expect = [h, 0.0, h, 0.0];
        for (x, e) in v.iter().zip(expect) {
            assert!((x - c(e, 0.0)).norm() < 1e-15);
        }
        for outcome in [0, 1] {
            let (ph, p) = measure_and_correct(&s, outcome).unwrap();
            assert!((p - 0.5).abs() < 1e-15);
            let target = converter_target(ph.basis(), c(1.0, 0.0), c(0.0, 0.0)).unwrap();
            assert!((fidelity_pure_vs_density(&target, &ph).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn postgate_state_and_marginal() {
        let (a, b) = (c(0.6, 0.0), c(0.0, 0.8));
        let s = converter_postgate_state(a, b, &GateModel::Ideal).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expect = [a * h, b * h, a * h, -b * h];
        let v = s.as_vector().unwrap();
        let overlap: C64 = v.iter().zip(expect).map(|(x, e)| e.conj() * x).sum();
        assert!(overlap.norm() > 1.0 - 1e-12);
        let rho = partial_trace(&s, &["b"]).unwrap().to_density_matrix();
        assert!((rho[(0, 0)].re - 0.36).abs() < 1e-12 && (rho[(1, 1)].re - 0.64).abs() < 1e-12);
        assert!(rho[(0, 1)].norm() < 1e-12);
    }

    #[test]
    fn both_branches_convert() {
        let (a, b) = (c(0.28, -0.6), c(0.5, 0.55));
        let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let (a, b) = (a / n, b / n);
        let s = converter_postgate_state(a, b, &GateModel::Ideal).unwrap();
        let mut total = 0.0;
        for outcome in [0, 1] {
            let (ph, p) = measure_and_correct(&s, outcome).unwrap();
            total += p;
            let target = converter_target(ph.basis(), a, b).unwrap();
            assert!(fidelity_pure_vs_density(&target, &ph).unwrap() >= 1.0 - 1e-10);
        }
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn impossible_outcome() {
        let basis = effective_basis([2, 2]).unwrap();
        let s = QuantumState::fock(basis, &[0, 1]).unwrap();
        assert!(matches!(measure_and_correct(&s, 1), Err(Error::ImpossibleOutcome { outcome: 1, .. })));
        assert!(measure_and_correct(&s, 2).is_err());
    }

    #[test]
    fn simulated_closed_gate_matches_ideal() {
        let g = solve_phase_conditions(1, 0, 0, 1.0).unwrap();
        let model = EffectiveModel { params: g.params(), kappa: 0.0, n_th: 0.0, dims: [3, 4], kerr_sign: KerrSign::Minus };
        let gate = GateModel::Simulated { model, gate_time: g.gate_time };
        let (a, b) = (c(0.8, 0.0), c(0.0, -0.6));
        let s = converter_postgate_state(a, b, &gate).unwrap();
        for outcome in [0, 1] {
            let (ph, p) = measure_and_correct(&s, outcome).unwrap();
            assert!((p - 0.5).abs() < 1e-10);
            let target = converter_target(ph.basis(), a, b).unwrap();
            assert!(fidelity_pure_vs_density(&target, &ph).unwrap() > 1.0 - 1e-10);
        }
    }

    #[test]
    fn simulated_lossy_gate_is_imperfect() {
        let g = solve_phase_conditions(1, 0, 0, 1.0).unwrap();
        let params = EffectiveParams { gamma_eff: 0.01, ..g.params() };
        let model = EffectiveModel { params, kappa: 0.05, n_th: 1.0, dims: [2, 3], kerr_sign: KerrSign::Minus };
        let gate = GateModel::Simulated { model, gate_time: g.gate_time };
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = converter_postgate_state(c(h, 0.0), c(h, 0.0), &gate).unwrap();
        let (ph, _) = measure_and_correct(&s, 0).unwrap();
        let target = converter_target(ph.basis(), c(h, 0.0), c(h, 0.0)).unwrap();
        let f = fidelity_pure_vs_density(&target, &ph).unwrap();
        assert!(f < 0.999 && f > 0.5, "{f}");
    }
}
