//! Built-in parameter sets. Rates and times are in units of `omega_m1`
//! (figure 2 and 3 sets) or `omega_e` (network sets).

use optomech_core::model::{DeviceParams, KerrSign};

use crate::config::{
    Axis, ConvertConfig, CouplingSweep, CpfConfig, GateConfig, KappaConvention, MultipathConfig, PortConfig,
    RunConfig, SweepConfig, TimeGrid, TimeUnit, ValidateConfig, HOT_MECHANICAL_DIM, MECHANICAL_DIM, PHOTON_DIM,
};
use crate::error::{CliError, CliResult};

pub const PRESETS: &[&str] = &["fig2", "fig3a", "fig3b", "fig3c", "fig3d", "fig7", "fig8", "convert", "validate"];

/// Tunnel couplings `V / omega_m1` of the three dissipative gate runs.
pub const FIG3_COUPLINGS: [f64; 3] = [3.131e-2, 3.156e-2, 3.159e-2];
/// Target `|g_eff / omega_eff|` at those couplings.
pub const FIG3_RATIOS: [f64; 3] = [0.01, 0.05, 0.1];
/// Reported maximal fidelities at those couplings.
pub const FIG3_FMAX: [f64; 3] = [0.83, 0.94, 0.97];

pub const FIG8_COUPLINGS: [f64; 3] = [0.1, 0.2, 0.3];

pub fn fig2_device() -> DeviceParams {
    DeviceParams { g: 1e-4, omega_m1: 1.0, omega_m2: 1e-3, v: 0.0, gamma1: 1e-6, gamma2: 1e-6 * 1e-3, detuning: 0.0 }
}

/// Gate run at coupling `v`; `kappa_ratio == 0` also drops mechanical damping.
fn cpf(v: f64, kappa_ratio: f64, n_th: f64, points: usize, force: bool) -> CpfConfig {
    let mut device = DeviceParams { v, ..fig2_device() };
    if kappa_ratio == 0.0 {
        device.gamma1 = 0.0;
        device.gamma2 = 0.0;
    }
    CpfConfig {
        device: Some(device),
        effective: None,
        amplitudes: None,
        kappa: 0.0,
        kappa_ratio,
        kappa_convention: KappaConvention::Geff,
        n_th,
        dims: [PHOTON_DIM, MECHANICAL_DIM],
        kerr_sign: KerrSign::Minus,
        time: TimeGrid { end: 1.2, points, unit: TimeUnit::KerrPi, rel_tol: None, abs_tol: None },
        force_integrator: force,
        positivity_stride: 1,
    }
}

fn port(g_eff: f64, kappa: f64, gamma_eff: f64, n_th: f64) -> PortConfig {
    PortConfig { omega_eff: 1.0, g_eff, detuning: 0.0, gamma_eff, kappa, n_th, dims: None }
}

pub fn preset(name: &str) -> CliResult<RunConfig> {
    let mut cfg = RunConfig { preset: Some(name.to_string()), ..RunConfig::empty() };
    match name {
        "fig2" => {
            cfg.effective_sweep = Some(SweepConfig {
                device: fig2_device(),
                axis: Axis {
                    start: 0.0,
                    stop: 5e-2,
                    count: 501,
                    extra: FIG3_COUPLINGS.iter().copied().chain([1e-3f64.sqrt()]).collect(),
                },
            })
        }
        "fig3a" => cfg.cpf = Some(cpf(FIG3_COUPLINGS[0], 0.0, 0.0, 1000, true)),
        "fig3b" => cfg.cpf = Some(cpf(FIG3_COUPLINGS[0], 0.2, 1.0, 4001, false)),
        "fig3c" => cfg.cpf = Some(cpf(FIG3_COUPLINGS[1], 0.2, 1.0, 4001, false)),
        "fig3d" => cfg.cpf = Some(cpf(FIG3_COUPLINGS[2], 0.2, 1.0, 4001, false)),
        "fig7" => {
            cfg.multipath = Some(MultipathConfig {
                ports: vec![port(1.0, 0.0, 0.0, 0.0), port(1.0, 0.0, 0.0, 0.0)],
                hops: vec![0.1],
                alpha: [0.0, 0.0],
                beta: [1.0, 0.0],
                time: TimeGrid { end: 120.0, points: 12001, unit: TimeUnit::Reference, rel_tol: None, abs_tol: None },
                sweep: None,
                positivity_stride: 100,
                peak_prominence: 1e-3,
            })
        }
        "fig8" => {
            let mut hot = [port(1.0, 0.1, 1e-5, 5.0), port(FIG8_COUPLINGS[0], 0.1, 1e-6, 5.0)];
            for p in &mut hot {
                p.dims = Some([PHOTON_DIM, HOT_MECHANICAL_DIM]);
            }
            cfg.multipath = Some(MultipathConfig {
                ports: hot.to_vec(),
                hops: vec![0.1],
                alpha: [0.0, 0.0],
                beta: [1.0, 0.0],
                time: TimeGrid { end: 90.0, points: 9001, unit: TimeUnit::Reference, rel_tol: None, abs_tol: None },
                sweep: Some(CouplingSweep { port: 2, values: FIG8_COUPLINGS.to_vec() }),
                positivity_stride: 250,
                peak_prominence: 1e-3,
            })
        }
        "convert" => {
            cfg.convert = Some(ConvertConfig { alpha: [0.6, 0.0], beta: [0.0, 0.8], gate: GateConfig::Ideal })
        }
        "validate" => {
            cfg.validate = Some(ValidateConfig {
                separations: vec![20.0, 50.0, 100.0],
                omega_m1: 1.0,
                g: 0.01,
                v_factor: 0.1,
                dims: [PHOTON_DIM, MECHANICAL_DIM, MECHANICAL_DIM],
                alpha: [std::f64::consts::FRAC_1_SQRT_2, 0.0],
                beta: [std::f64::consts::FRAC_1_SQRT_2, 0.0],
                periods: 1.0,
                points: 401,
                rel_tol: None,
                abs_tol: None,
            })
        }
        _ => {
            return Err(CliError::Config(format!("unknown preset `{name}` (known: {})", PRESETS.join(", "))));
        }
    }
    Ok(cfg)
}
