//! Conversion fidelity at every output port of the star network.
//!
//! The photon enters cavity 1; every auxiliary oscillator starts in
//! `(|0> + |1>)/sqrt(2)`, the state the converter prepares before its
//! phase gate. Port targets are taken in the frame of the free part
//! `detuning_j n_aj + omega_ej n_bj`, so only the conditional Kerr phase
//! and the photon transfer are scored.

use nalgebra::DVector;

use super::{Diagnostics, RunOptions};
use crate::engine::{evolve_observed, EvolveConfig};
use crate::error::{Error, Result};
use crate::fock::{fidelity_pure_vs_density, partial_trace, BasisDescriptor, QuantumState};
use crate::model::effective::{port_aux, port_cavity};
use crate::model::MultipathModel;
use crate::{tolerance, C64};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConversionFidelity {
    /// `sqrt(F_G F_S)`.
    pub f_c: f64,
    /// Gate fidelity `sqrt(<psi_f|rho_j|psi_f>)`.
    pub f_g: f64,
    /// Transfer fidelity `sqrt(<psi_0|rho_aj|psi_0>)`.
    pub f_s: f64,
}

/// `(<psi_f|rho_j|psi_f> <psi_0|rho_aj|psi_0>)^(1/4)` with both factors.
pub fn conversion_fidelity(
    rho_j: &QuantumState,
    psi_f: &QuantumState,
    rho_aj: &QuantumState,
    psi_0: &QuantumState,
) -> Result<ConversionFidelity> {
    let f_g = fidelity_pure_vs_density(psi_f, rho_j)?;
    let f_s = fidelity_pure_vs_density(psi_0, rho_aj)?;
    Ok(ConversionFidelity { f_c: (f_g * f_s).sqrt(), f_g, f_s })
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PortSeries {
    pub f_c: Vec<f64>,
    pub f_g: Vec<f64>,
    pub f_s: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultipathSeries {
    pub times: Vec<f64>,
    pub ports: Vec<PortSeries>,
    pub diagnostics: Diagnostics,
}

fn plus() -> [C64; 2] {
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [h, h]
}

fn padded(dim: usize, head: [C64; 2]) -> DVector<C64> {
    let mut v = DVector::zeros(dim);
    v[0] = head[0];
    v[1] = head[1];
    v
}

fn initial_state(basis: &BasisDescriptor, alpha: C64, beta: C64) -> Result<QuantumState> {
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let mut psi = DVector::from_element(1, one);
    for (slot, &d) in basis.dims().iter().enumerate() {
        let (port, is_aux) = (slot / 2, slot % 2 == 1);
        let local = match (port, is_aux) {
            (_, true) => padded(d, plus()),
            (0, false) => padded(d, [alpha, beta]),
            (_, false) => padded(d, [one, zero]),
        };
        psi = psi.kronecker(&local);
    }
    QuantumState::pure(basis.clone(), psi)
}

/// Evolves the network from a photon `alpha|0> + beta|1>` in cavity 1 and
/// records `F_C`, `F_G` and `F_S` of every port at every grid time.
pub fn run_multipath_conversion(
    model: &MultipathModel,
    alpha: C64,
    beta: C64,
    config: &EvolveConfig,
    opts: &RunOptions,
) -> Result<MultipathSeries> {
    let n_in = alpha.norm_sqr() + beta.norm_sqr();
    if (n_in - 1.0).abs() > tolerance::get().pure_norm {
        return Err(Error::InvalidState(format!("input photon has norm^2 {n_in}")));
    }
    if model.ports.is_empty() {
        return Err(Error::InvalidParameter("network has no ports".into()));
    }
    let basis = model.basis()?;
    let h = model.hamiltonian()?;
    let collapse = model.collapse_ops()?;
    let psi0 = initial_state(&basis, alpha, beta)?;

    let labels: Vec<(String, String)> =
        (0..model.ports.len()).map(|j| (port_cavity(j), port_aux(j))).collect();
    let pair_bases: Vec<BasisDescriptor> = labels
        .iter()
        .map(|(a, b)| basis.restrict(&[a.as_str(), b.as_str()]))
        .collect::<Result<_>>()?;
    let cavity_bases: Vec<BasisDescriptor> =
        labels.iter().map(|(a, _)| basis.restrict(&[a.as_str()])).collect::<Result<_>>()?;

    let mut ports = vec![PortSeries::default(); model.ports.len()];
    let mut diag = Diagnostics::default();
    let report = evolve_observed(&psi0, &h, &collapse, config, |s| {
        let t = s.time;
        for (j, port) in model.ports.iter().enumerate() {
            let (a, b) = (&labels[j].0, &labels[j].1);
            let rho_j = partial_trace(s.state, &[a.as_str(), b.as_str()])?;
            let rho_aj = partial_trace(&rho_j, &[a.as_str()])?;

            let ph_a = C64::new(0.0, -port.params.detuning * t).exp();
            let ph_b = C64::new(0.0, -port.params.omega_eff * t).exp();
            let psi_0 = QuantumState::pure(cavity_bases[j].clone(), padded(port.dims[0], [alpha, beta * ph_a]))?;
            let pb = plus();
            let mut f = DVector::zeros(pair_bases[j].total_dim());
            let idx = |na: usize, nb: usize| pair_bases[j].index_of(&[na, nb]);
            f[idx(0, 0)?] = alpha * pb[0];
            f[idx(0, 1)?] = alpha * pb[1] * ph_b;
            f[idx(1, 0)?] = beta * ph_a * pb[0];
            f[idx(1, 1)?] = -beta * ph_a * pb[1] * ph_b;
            let psi_f = QuantumState::pure(pair_bases[j].clone(), f)?;

            let c = conversion_fidelity(&rho_j, &psi_f, &rho_aj, &psi_0)?;
            ports[j].f_c.push(c.f_c);
            ports[j].f_g.push(c.f_g);
            ports[j].f_s.push(c.f_s);
        }
        diag.record(&s, opts.positivity_stride);
        Ok(())
    })?;
    diag.report = report;
    Ok(MultipathSeries { times: config.t_grid.clone(), ports, diagnostics: diag })
}
