//! Re-run at one more level per mode and compare.

use super::{run, Command};
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::table::ResultTable;

pub const CONVERGENCE_THRESHOLD: f64 = 1e-4;

/// `cfg` with every photon and oscillator truncation raised by one.
pub fn bump_dims(cfg: &RunConfig) -> RunConfig {
    let mut out = cfg.clone();
    if let Some(c) = &mut out.cpf {
        c.dims = c.dims.map(|d| d + 1);
    }
    if let Some(c) = &mut out.convert {
        if let crate::config::GateConfig::Simulated { dims, .. } = &mut c.gate {
            *dims = dims.map(|d| d + 1);
        }
    }
    if let Some(c) = &mut out.multipath {
        for p in &mut c.ports {
            p.dims = Some(p.dims().map(|d| d + 1));
        }
    }
    if let Some(c) = &mut out.validate {
        c.dims = c.dims.map(|d| d + 1);
    }
    out
}

#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    pub base: Vec<ResultTable>,
    pub rerun: Vec<ResultTable>,
    /// One row: the largest absolute difference of every primary column.
    pub differences: ResultTable,
    pub max_difference: f64,
    pub worst_column: String,
}

impl ConvergenceReport {
    pub fn passed(&self) -> bool {
        self.max_difference <= CONVERGENCE_THRESHOLD
    }

    pub fn into_result(self) -> CliResult<Self> {
        if self.passed() {
            Ok(self)
        } else {
            Err(CliError::Convergence {
                column: self.worst_column.clone(),
                difference: self.max_difference,
                threshold: CONVERGENCE_THRESHOLD,
            })
        }
    }
}

fn gap(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs()
    }
}

/// Runs `cmd` on `cfg` and on [`bump_dims`]`(cfg)` and compares the primary
/// tables column by column. Pass or fail is left to the caller.
pub fn convergence_recheck(cmd: Command, cfg: &RunConfig) -> CliResult<ConvergenceReport> {
    let base = run(cmd, cfg)?;
    let rerun = run(cmd, &bump_dims(cfg))?;
    compare(base, rerun)
}

pub fn compare(base: Vec<ResultTable>, rerun: Vec<ResultTable>) -> CliResult<ConvergenceReport> {
    let (a, b) = (&base[0], &rerun[0]);
    if a.columns() != b.columns() || a.len() != b.len() {
        return Err(CliError::Table("re-run produced a table of a different shape".into()));
    }
    let mut worst = vec![0.0f64; a.columns().len()];
    for (ra, rb) in a.rows().iter().zip(b.rows()) {
        for (k, (x, y)) in ra.iter().zip(rb).enumerate() {
            worst[k] = worst[k].max(gap(*x, *y));
        }
    }
    let (mut max_difference, mut worst_column) = (0.0, String::new());
    for (c, &w) in a.columns().iter().zip(&worst) {
        if w > max_difference || worst_column.is_empty() {
            max_difference = w;
            worst_column = c.clone();
        }
    }
    let mut differences = ResultTable::new("convergence", a.columns().to_vec()).with_sentinel_all();
    differences.push(worst)?;
    differences.summary.insert("max_difference".into(), max_difference);
    differences.summary.insert("threshold".into(), CONVERGENCE_THRESHOLD);
    Ok(ConvergenceReport { base, rerun, differences, max_difference, worst_column })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::preset;

    #[test]
    fn bump_touches_every_truncation() {
        let c = bump_dims(&preset("fig8").unwrap());
        for p in &c.multipath.unwrap().ports {
            assert_eq!(p.dims, Some([4, 9]));
        }
        assert_eq!(bump_dims(&preset("fig3b").unwrap()).cpf.unwrap().dims, [4, 5]);
        assert_eq!(bump_dims(&preset("validate").unwrap()).validate.unwrap().dims, [4, 5, 5]);
    }

    #[test]
    fn dimension_free_command_converges_exactly() {
        let r = convergence_recheck(Command::EffectiveSweep, &preset("fig2").unwrap()).unwrap();
        assert_eq!(r.max_difference, 0.0);
        assert!(r.passed());
    }

    #[test]
    fn closed_diagonal_run_converges_to_rounding() {
        let mut cfg = preset("fig3a").unwrap();
        let c = cfg.cpf.as_mut().unwrap();
        c.force_integrator = false;
        c.time.points = 50;
        let r = convergence_recheck(Command::CpfDynamics, &cfg).unwrap();
        assert!(r.max_difference < 1e-12, "{}", r.max_difference);
    }

    #[test]
    fn hot_bath_in_small_space_fails() {
        let text = r#"
            schema_version = 1
            [multipath]
            hops = []
            alpha = [0.0, 0.0]
            beta = [1.0, 0.0]
            time = { end = 40.0, points = 81 }
            [[multipath.ports]]
            omega_eff = 1.0
            g_eff = 0.5
            gamma_eff = 0.05
            n_th = 5.0
            dims = [2, 6]
        "#;
        let cfg = RunConfig::from_toml(text).unwrap();
        let r = convergence_recheck(Command::Multipath, &cfg).unwrap();
        assert!(!r.passed(), "{}", r.max_difference);
        assert!(matches!(r.into_result(), Err(CliError::Convergence { .. })));
    }
}
