//! Gate, converter and network protocols built on the engine.

pub mod converter;
pub mod cpf;
pub mod multipath;

use crate::engine::{EvolveReport, Sample};
use crate::fock::{decoupled_blocks, min_eigenvalue_on, positive_within_on, StateForm};

pub use converter::{
    converter_postgate_state, converter_target, hadamard, measure_and_correct, GateModel,
};
pub use cpf::{
    analytic_cpf_fidelity, cpf_phases, cpf_target, phase_residual, run_cpf_gate, solve_phase_conditions,
    FidelitySeries, GateConditions, PhaseTuple, QubitAmplitudes,
};
pub use multipath::{conversion_fidelity, run_multipath_conversion, ConversionFidelity, MultipathSeries, PortSeries};

/// Eigenvalue floor certified at every sample between exact checks.
pub const POSITIVITY_TOL: f64 = 1e-6;

/// Options shared by the protocol runners.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunOptions {
    /// Integrate the master equation even when the closed-system diagonal
    /// propagator would apply.
    pub force_integrator: bool,
    /// Compute the smallest eigenvalue of every `n`-th stored state. The
    /// states in between are certified to have none below
    /// `-POSITIVITY_TOL`; any that fail are diagonalised as well. 0 disables
    /// both checks.
    pub positivity_stride: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { force_integrator: false, positivity_stride: 1 }
    }
}

/// Per-sample state diagnostics.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Diagnostics {
    /// Trace before renormalisation.
    pub trace: Vec<f64>,
    pub purity: Vec<f64>,
    /// Smallest eigenvalue over the checked samples.
    pub min_eigenvalue: Option<f64>,
    pub report: EvolveReport,
}

impl Diagnostics {
    fn record(&mut self, s: &Sample<'_>, stride: usize) {
        self.trace.push(s.raw_trace);
        self.purity.push(s.purity);
        if stride == 0 {
            return;
        }
        let StateForm::Density(r) = s.state.form() else {
            self.note_eigenvalue(0.0);
            return;
        };
        let owned;
        let blocks = match s.blocks {
            Some(b) => b,
            None => {
                owned = decoupled_blocks(r);
                &owned
            }
        };
        if s.index.is_multiple_of(stride) || !positive_within_on(r, blocks, POSITIVITY_TOL) {
            self.note_eigenvalue(min_eigenvalue_on(r, blocks));
        }
    }

    fn note_eigenvalue(&mut self, m: f64) {
        self.min_eigenvalue = Some(self.min_eigenvalue.map_or(m, |x| x.min(m)));
    }

    fn closed(n: usize, purity: impl Iterator<Item = f64>) -> Self {
        Self {
            trace: vec![1.0; n],
            purity: purity.collect(),
            min_eigenvalue: Some(0.0),
            report: EvolveReport::default(),
        }
    }

    /// Largest `|tr rho - 1|` over all samples.
    pub fn max_trace_deviation(&self) -> f64 {
        self.trace.iter().map(|t| (t - 1.0).abs()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{BasisDescriptor, QuantumState};
    use nalgebra::DMatrix;

    fn sample_of(state: &QuantumState, index: usize) -> Sample<'_> {
        Sample { index, time: index as f64, state, raw_trace: 1.0, purity: state.purity(), blocks: None }
    }

    #[test]
    fn negative_state_between_strides_is_caught() {
        let basis = BasisDescriptor::single(2).unwrap();
        let good = QuantumState::fock(basis.clone(), &[0]).unwrap().to_density();
        let mut m = DMatrix::<crate::C64>::zeros(2, 2);
        m[(0, 0)] = crate::C64::new(1.01, 0.0);
        m[(1, 1)] = crate::C64::new(-0.01, 0.0);
        let bad = QuantumState::density_unchecked(basis, m).unwrap();
        let mut d = Diagnostics::default();
        d.record(&sample_of(&good, 0), 100);
        assert_eq!(d.min_eigenvalue, Some(0.0));
        d.record(&sample_of(&good, 1), 100);
        d.record(&sample_of(&bad, 2), 100);
        assert_eq!(d.min_eigenvalue, Some(-0.01));
        let mut off = Diagnostics::default();
        off.record(&sample_of(&bad, 0), 0);
        assert_eq!(off.min_eigenvalue, None);
    }
}
