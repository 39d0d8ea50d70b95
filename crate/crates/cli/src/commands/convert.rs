use optomech_core::fock::fidelity_pure_vs_density;
use optomech_core::model::{EffectiveModel, EffectiveParams, KerrSign};
use optomech_core::protocols::{
    converter_postgate_state, converter_target, cpf_phases, measure_and_correct, phase_residual,
    solve_phase_conditions, GateModel,
};
use optomech_core::Error;

use crate::config::{complex, ConvertConfig, GateConfig};
use crate::error::CliResult;
use crate::table::ResultTable;

/// Phase error, in radians, above which the `pi / g_eff` readout is flagged.
pub const READOUT_PHASE_TOL: f64 = 1e-3;

pub fn gate_model(g: &GateConfig) -> CliResult<GateModel> {
    Ok(match *g {
        GateConfig::Ideal => GateModel::Ideal,
        GateConfig::Simulated { n1, n2, n3, omega_eff, gamma_eff, kappa, n_th, dims } => {
            let c = solve_phase_conditions(n1, n2, n3, omega_eff)?;
            let params = EffectiveParams { gamma_eff, ..c.params() };
            let residual = phase_residual(&cpf_phases(&params, std::f64::consts::PI / params.g_eff.abs()));
            if residual > READOUT_PHASE_TOL {
                log::warn!(
                    "reading out at pi/g_eff misses the gate phases by {residual:.3e} rad; using the solved time {}",
                    c.gate_time
                );
            }
            let model = EffectiveModel { params, kappa, n_th, dims, kerr_sign: KerrSign::Minus };
            GateModel::Simulated { model, gate_time: c.gate_time }
        }
    })
}

/// Both measurement branches of the converter.
///
/// Columns: `outcome, probability, fidelity`, the fidelity being that of the
/// corrected phonon state to `alpha|0> + beta|1>`. Outcomes that cannot
/// occur are left out.
pub fn cmd_convert(cfg: &ConvertConfig) -> CliResult<ResultTable> {
    let (alpha, beta) = (complex(cfg.alpha), complex(cfg.beta));
    let joint = converter_postgate_state(alpha, beta, &gate_model(&cfg.gate)?)?;
    let mut t = ResultTable::new("convert", ["outcome", "probability", "fidelity"]);
    let mut min_f = f64::INFINITY;
    for outcome in 0..2 {
        match measure_and_correct(&joint, outcome) {
            Ok((phonon, p)) => {
                let target = converter_target(phonon.basis(), alpha, beta)?;
                let f = fidelity_pure_vs_density(&target, &phonon)?;
                min_f = min_f.min(f);
                t.push(vec![outcome as f64, p, f])?;
            }
            Err(Error::ImpossibleOutcome { outcome, probability }) => {
                log::warn!("outcome {outcome} has probability {probability:e}; skipped");
            }
            Err(e) => return Err(e.into()),
        }
    }
    t.summary.insert("min_fidelity".into(), min_f);
    t.summary.insert("total_probability".into(), t.column("probability").unwrap_or_default().iter().sum());
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ideal_gate_is_exact() {
        let t = cmd_convert(&ConvertConfig { alpha: [0.6, 0.0], beta: [0.0, 0.8], gate: GateConfig::Ideal }).unwrap();
        assert_eq!(t.len(), 2);
        for r in t.rows() {
            assert!((r[1] - 0.5).abs() < 1e-12 && (r[2] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn lossy_gate_is_reported_per_branch() {
        let gate = GateConfig::Simulated {
            n1: 1,
            n2: 0,
            n3: 0,
            omega_eff: 1.0,
            gamma_eff: 0.01,
            kappa: 0.05,
            n_th: 1.0,
            dims: [2, 3],
        };
        let t = cmd_convert(&ConvertConfig { alpha: [0.6, 0.0], beta: [0.8, 0.0], gate }).unwrap();
        assert_eq!(t.len(), 2);
        for r in t.rows() {
            assert!(r[2] < 1.0 - 1e-4 && r[2] > 0.5, "{r:?}");
        }
        assert!((t.summary["total_probability"] - 1.0).abs() < 1e-9);
    }
}
