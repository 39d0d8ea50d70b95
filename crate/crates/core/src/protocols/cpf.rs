//! Control-phase-flip gate from the cross-Kerr phase.

use std::f64::consts::{PI, TAU};

use nalgebra::DVector;

use super::{Diagnostics, RunOptions};
use crate::engine::{evolve_observed, propagate_diagonal, EvolveConfig};
use crate::error::{Error, Result};
use crate::fock::{fidelity_pure_vs_density, BasisDescriptor, OperatorMatrix, QuantumState};
use crate::model::{CollapseOp, EffectiveParams};
use crate::{tolerance, C64};

/// Amplitudes of `|00>, |01>, |10>, |11>` (cavity first).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitAmplitudes {
    pub alpha: C64,
    pub beta: C64,
    pub gamma: C64,
    pub delta: C64,
}

impl QubitAmplitudes {
    pub fn new(alpha: C64, beta: C64, gamma: C64, delta: C64) -> Result<Self> {
        let a = Self { alpha, beta, gamma, delta };
        let norm: f64 = a.as_array().iter().map(|v| v.norm_sqr()).sum();
        if (norm - 1.0).abs() > tolerance::get().pure_norm {
            return Err(Error::InvalidState(format!("qubit amplitudes have norm^2 {norm}")));
        }
        Ok(a)
    }

    /// Scales arbitrary amplitudes to unit norm.
    pub fn normalized(v: [C64; 4]) -> Result<Self> {
        let n = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidState("zero amplitude vector".into()));
        }
        Self::new(v[0] / n, v[1] / n, v[2] / n, v[3] / n)
    }

    pub fn uniform() -> Self {
        let h = C64::new(0.5, 0.0);
        Self { alpha: h, beta: h, gamma: h, delta: h }
    }

    pub fn as_array(&self) -> [C64; 4] {
        [self.alpha, self.beta, self.gamma, self.delta]
    }
}

/// Phases picked up by the four basis states; `theta00` is always 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseTuple {
    pub theta00: f64,
    pub theta01: f64,
    pub theta10: f64,
    pub theta11: f64,
}

/// `theta01 = omega_eff t`, `theta10 = detuning t`,
/// `theta11 = (omega_eff + detuning - g_eff) t`.
pub fn cpf_phases(p: &EffectiveParams, t: f64) -> PhaseTuple {
    PhaseTuple {
        theta00: 0.0,
        theta01: p.omega_eff * t,
        theta10: p.detuning * t,
        theta11: (p.omega_eff + p.detuning - p.g_eff) * t,
    }
}

/// `|  |a|^2 + |b|^2 e^{-i theta01} + |c|^2 e^{-i theta10} - |d|^2 e^{-i theta11} |`.
pub fn analytic_cpf_fidelity(a: &QubitAmplitudes, ph: &PhaseTuple) -> f64 {
    let e = |theta: f64| C64::new(0.0, -theta).exp();
    let sum = e(ph.theta00) * a.alpha.norm_sqr() + e(ph.theta01) * a.beta.norm_sqr()
        + e(ph.theta10) * a.gamma.norm_sqr()
        - e(ph.theta11) * a.delta.norm_sqr();
    sum.norm().min(1.0)
}

/// Distance of `x` from the nearest point of `target + 2 pi Z`.
fn wrapped(x: f64, target: f64) -> f64 {
    let d = (x - target).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Largest violation of `theta01 = theta10 = 0`, `theta11 = pi` (mod 2 pi).
pub fn phase_residual(ph: &PhaseTuple) -> f64 {
    wrapped(ph.theta01, 0.0).max(wrapped(ph.theta10, 0.0)).max(wrapped(ph.theta11, PI))
}

/// Integers and parameters for which the gate phases are exact.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GateConditions {
    pub n1: i32,
    pub n2: i32,
    pub n3: i32,
    pub gate_time: f64,
    pub omega_eff: f64,
    pub detuning: f64,
    pub g_eff: f64,
}

impl GateConditions {
    pub fn params(&self) -> EffectiveParams {
        EffectiveParams {
            detuning: self.detuning,
            omega_eff: self.omega_eff,
            g_eff: self.g_eff,
            gamma_eff: 0.0,
        }
    }

    pub fn residual(&self) -> f64 {
        phase_residual(&cpf_phases(&self.params(), self.gate_time))
    }
}

/// Solves `omega_eff t = 2 pi n1`, `detuning t = 2 pi n2`,
/// `(omega_eff + detuning - g_eff) t = (2 n3 + 1) pi` for a given `omega_eff`.
///
/// The result is `t = 2 pi n1 / omega_eff`, `detuning = (n2/n1) omega_eff`
/// and `g_eff = (2 (n1 + n2 - n3) - 1) / (2 n1) omega_eff`. The ratio form
/// `g_eff : omega_eff : detuning = n1 : n2 : (n1 + n2 - n3 - 1/2)` that is
/// sometimes quoted does not satisfy these equations and is not used.
pub fn solve_phase_conditions(n1: i32, n2: i32, n3: i32, omega_eff: f64) -> Result<GateConditions> {
    if n1 < 1 {
        return Err(Error::InvalidParameter(format!("n1 = {n1} must be >= 1")));
    }
    if !(omega_eff > 0.0) || !omega_eff.is_finite() {
        return Err(Error::InvalidParameter(format!("omega_eff = {omega_eff} must be > 0")));
    }
    let g_eff = f64::from(2 * (n1 + n2 - n3) - 1) / f64::from(2 * n1) * omega_eff;
    if g_eff <= 0.0 {
        return Err(Error::InconsistentConditions(format!(
            "(n1, n2, n3) = ({n1}, {n2}, {n3}) needs g_eff = {g_eff:.6e} <= 0"
        )));
    }
    Ok(GateConditions {
        n1,
        n2,
        n3,
        gate_time: TAU * f64::from(n1) / omega_eff,
        omega_eff,
        detuning: f64::from(n2) / f64::from(n1) * omega_eff,
        g_eff,
    })
}

fn qubit_indices(basis: &BasisDescriptor) -> Result<[usize; 4]> {
    if basis.num_modes() != 2 {
        return Err(Error::InvalidParameter(format!(
            "gate basis needs exactly two modes, found {}",
            basis.num_modes()
        )));
    }
    Ok([
        basis.index_of(&[0, 0])?,
        basis.index_of(&[0, 1])?,
        basis.index_of(&[1, 0])?,
        basis.index_of(&[1, 1])?,
    ])
}

fn embed_qubits(basis: &BasisDescriptor, v: [C64; 4]) -> Result<QuantumState> {
    let idx = qubit_indices(basis)?;
    let mut psi = DVector::zeros(basis.total_dim());
    for (i, a) in idx.into_iter().zip(v) {
        psi[i] = a;
    }
    QuantumState::pure(basis.clone(), psi)
}

/// `alpha|00> + beta|01> + gamma|10> - delta|11>` on `basis`.
pub fn cpf_target(basis: &BasisDescriptor, a: &QubitAmplitudes) -> Result<QuantumState> {
    embed_qubits(basis, [a.alpha, a.beta, a.gamma, -a.delta])
}

#[derive(Clone, Debug, PartialEq)]
pub struct FidelitySeries {
    pub times: Vec<f64>,
    pub fidelity: Vec<f64>,
    pub diagnostics: Diagnostics,
}

impl FidelitySeries {
    /// `(t, F)` at the first maximum.
    pub fn max(&self) -> (f64, f64) {
        let mut best = (f64::NAN, f64::NEG_INFINITY);
        for (&t, &f) in self.times.iter().zip(&self.fidelity) {
            if f > best.1 {
                best = (t, f);
            }
        }
        best
    }
}

/// Prepares the amplitudes in the `{0,1} x {0,1}` subspace, evolves under
/// `h` and the collapse channels, and records `sqrt(<Phi|rho(t)|Phi>)`
/// against the phase-flipped target at every grid time.
///
/// Closed systems with a number-diagonal `h` use the exact phase propagator
/// unless `opts.force_integrator` is set.
pub fn run_cpf_gate(
    h: &OperatorMatrix,
    collapse: &[CollapseOp],
    amps: &QubitAmplitudes,
    config: &EvolveConfig,
    opts: &RunOptions,
) -> Result<FidelitySeries> {
    let basis = h.basis();
    let psi0 = embed_qubits(basis, amps.as_array())?;
    let target = cpf_target(basis, amps)?;
    let closed = collapse.iter().all(|c| c.rate == 0.0);

    if closed && h.is_diagonal() && !opts.force_integrator {
        config.validate()?;
        let mut fidelity = Vec::with_capacity(config.t_grid.len());
        for &t in &config.t_grid {
            let psi = propagate_diagonal(&psi0, h, t)?;
            fidelity.push(fidelity_pure_vs_density(&target, &psi)?);
        }
        let n = fidelity.len();
        return Ok(FidelitySeries {
            times: config.t_grid.clone(),
            fidelity,
            diagnostics: Diagnostics::closed(n, std::iter::repeat_n(1.0, n)),
        });
    }

    let mut fidelity = Vec::with_capacity(config.t_grid.len());
    let mut diag = Diagnostics::default();
    let report = evolve_observed(&psi0, h, collapse, config, |s| {
        fidelity.push(fidelity_pure_vs_density(&target, s.state)?);
        diag.record(&s, opts.positivity_stride);
        Ok(())
    })?;
    diag.report = report;
    Ok(FidelitySeries { times: config.t_grid.clone(), fidelity, diagnostics: diag })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_effective_hamiltonian_signed, EffectiveModel, KerrSign};
    use proptest::prelude::*;

    fn p(detuning: f64, omega_eff: f64, g_eff: f64) -> EffectiveParams {
        EffectiveParams { detuning, omega_eff, g_eff, gamma_eff: 0.0 }
    }

    #[test]
    fn phase_examples() {
        let ph = cpf_phases(&p(0.3, 1.0, 0.1), 0.0);
        assert_eq!(ph, PhaseTuple { theta00: 0.0, theta01: 0.0, theta10: 0.0, theta11: 0.0 });
        let ph = cpf_phases(&p(0.0, 2.0, 0.5), TAU / 2.0);
        assert!((ph.theta01 - TAU).abs() < 1e-15);
        assert!((ph.theta11 - (TAU - TAU * 0.25)).abs() < 1e-14);
        let ph = cpf_phases(&p(0.4, 1.1, 1.5), 7.3);
        assert!(ph.theta11.abs() < 1e-14);
    }

    #[test]
    fn fidelity_examples() {
        let a = QubitAmplitudes::uniform();
        let zero = PhaseTuple { theta00: 0.0, theta01: 0.0, theta10: 0.0, theta11: 0.0 };
        assert!((analytic_cpf_fidelity(&a, &zero) - 0.5).abs() < 1e-15);
        let ok = PhaseTuple { theta11: PI, ..zero };
        assert!((analytic_cpf_fidelity(&a, &ok) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn solver_examples() {
        let c = solve_phase_conditions(1, 0, 0, 2.0).unwrap();
        assert!((c.gate_time - PI).abs() < 1e-15);
        assert_eq!(c.detuning, 0.0);
        assert!((c.g_eff - 1.0).abs() < 1e-15);
        assert!((cpf_phases(&c.params(), c.gate_time).theta11 - PI).abs() < 1e-14);

        let c = solve_phase_conditions(1, 1, 1, 1.0).unwrap();
        assert_eq!((c.g_eff, c.omega_eff, c.detuning), (0.5, 1.0, 1.0));

        assert!(matches!(solve_phase_conditions(1, 0, 1, 1.0), Err(Error::InconsistentConditions(_))));
        assert!(solve_phase_conditions(0, 0, 0, 1.0).is_err());
        assert!(solve_phase_conditions(1, 0, 0, 0.0).is_err());
    }

    #[test]
    fn closed_gate_hits_unit_fidelity() {
        let c = solve_phase_conditions(2, 1, 0, 0.8).unwrap();
        let model = EffectiveModel { params: c.params(), kappa: 0.0, n_th: 0.0, dims: [2, 2], kerr_sign: KerrSign::Minus };
        let amps = QubitAmplitudes::normalized([C64::new(0.3, 0.1), C64::new(-0.5, 0.2), C64::new(0.1, 0.6), C64::new(0.4, -0.2)]).unwrap();
        let cfg = EvolveConfig::new(vec![0.0, c.gate_time]);
        let s = run_cpf_gate(&model.hamiltonian().unwrap(), &[], &amps, &cfg, &RunOptions::default()).unwrap();
        assert!((s.fidelity[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cavity_loss_lowers_gate_fidelity() {
        let c = solve_phase_conditions(1, 0, 0, 1.0).unwrap();
        let model = EffectiveModel { params: c.params(), kappa: 0.05, n_th: 0.0, dims: [2, 2], kerr_sign: KerrSign::Minus };
        let cfg = EvolveConfig::new(vec![0.0, c.gate_time]);
        let s = run_cpf_gate(
            &model.hamiltonian().unwrap(),
            &model.collapse_ops().unwrap(),
            &QubitAmplitudes::uniform(),
            &cfg,
            &RunOptions::default(),
        )
        .unwrap();
        assert!(s.fidelity[1] < 1.0 - 1e-3);
        assert!(s.diagnostics.max_trace_deviation() < 1e-12);
    }

    #[test]
    fn non_two_mode_basis_rejected() {
        let h = build_effective_hamiltonian_signed(&p(0.0, 1.0, 0.5), [2, 2], KerrSign::Minus).unwrap();
        let h3 = OperatorMatrix::identity(BasisDescriptor::new([("x", 2), ("y", 2), ("z", 2)]).unwrap());
        let cfg = EvolveConfig::new(vec![0.0, 1.0]);
        assert!(run_cpf_gate(&h3, &[], &QubitAmplitudes::uniform(), &cfg, &RunOptions::default()).is_err());
        assert!(run_cpf_gate(&h, &[], &QubitAmplitudes::uniform(), &cfg, &RunOptions::default()).is_ok());
    }

    proptest! {
        #[test]
        fn solver_back_substitution(n1 in 1i32..=5, n2 in -5i32..=5, n3 in -5i32..=5, w in 0.05..5.0f64) {
            if let Ok(c) = solve_phase_conditions(n1, n2, n3, w) {
                prop_assert!(c.residual() <= 1e-10, "residual {}", c.residual());
                prop_assert!(c.g_eff > 0.0);
            }
        }

        #[test]
        fn no_flip_amplitude_bound(
            re in proptest::collection::vec(-1.0..1.0f64, 3),
            th in proptest::collection::vec(0.0..TAU, 3),
        ) {
            let a = QubitAmplitudes::normalized([
                C64::new(re[0], 0.0), C64::new(re[1], 0.0), C64::new(re[2], 0.0), C64::new(0.0, 0.0),
            ]);
            prop_assume!(a.is_ok());
            let a = a.unwrap();
            let ph = PhaseTuple { theta00: 0.0, theta01: th[0], theta10: th[1], theta11: th[2] };
            prop_assert!(analytic_cpf_fidelity(&a, &ph) <= 1.0 + 1e-15);
            let aligned = PhaseTuple { theta01: 0.0, theta10: TAU, ..ph };
            prop_assert!((analytic_cpf_fidelity(&a, &aligned) - 1.0).abs() < 1e-12);
        }
    }
}
