use optomech_core::model::{effective_params, validity_ratio, DeviceParams, VALIDITY_THRESHOLD};
use rayon::prelude::*;

use crate::config::SweepConfig;
use crate::error::CliResult;
use crate::table::ResultTable;

/// `|omega_eff|` below which the ratio column carries the `inf` sentinel.
pub const EPS_SING: f64 = 1e-12;

fn omega_eff(d: &DeviceParams, v: f64) -> f64 {
    d.omega_m2 - v * v / d.omega_m1
}

/// Bisects `omega_eff(V)` on a bracket with a sign change.
fn bisect_zero(d: &DeviceParams, mut lo: f64, mut hi: f64) -> f64 {
    let s_lo = omega_eff(d, lo).signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if omega_eff(d, mid).signum() == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if omega_eff(d, lo).abs() <= omega_eff(d, hi).abs() {
        lo
    } else {
        hi
    }
}

/// Effective parameters along the `V` axis.
///
/// Columns: `V, omega_eff, g_eff, ratio, gamma_eff, warning`, where `ratio`
/// is `|g_eff / omega_eff|` (`inf` when `|omega_eff| < EPS_SING`) and
/// `warning` is 1 where the elimination leaves its regime. The summary holds
/// the first zero of `omega_eff` bracketed by the axis.
pub fn cmd_effective_sweep(cfg: &SweepConfig) -> CliResult<ResultTable> {
    let axis = cfg.axis.points()?;
    let rows: Vec<Vec<f64>> = axis
        .par_iter()
        .map(|&v| {
            let d = DeviceParams { v, ..cfg.device };
            let e = effective_params(&d)?;
            let ratio = if e.omega_eff.abs() < EPS_SING { f64::INFINITY } else { (e.g_eff / e.omega_eff).abs() };
            let warn = if validity_ratio(&d) > VALIDITY_THRESHOLD { 1.0 } else { 0.0 };
            Ok(vec![v, e.omega_eff, e.g_eff, ratio, e.gamma_eff, warn])
        })
        .collect::<CliResult<_>>()?;

    let mut t = ResultTable::new("effective_sweep", ["V", "omega_eff", "g_eff", "ratio", "gamma_eff", "warning"])
        .with_sentinel("ratio");
    for r in rows {
        t.push(r)?;
    }
    for w in axis.windows(2) {
        let (a, b) = (omega_eff(&cfg.device, w[0]), omega_eff(&cfg.device, w[1]));
        if a == 0.0 || a.signum() != b.signum() {
            let v0 = if a == 0.0 { w[0] } else { bisect_zero(&cfg.device, w[0], w[1]) };
            t.summary.insert("omega_eff_zero_v".into(), v0);
            break;
        }
    }
    let singular = t.column("ratio").unwrap_or_default().iter().filter(|r| r.is_infinite()).count();
    t.summary.insert("singular_rows".into(), singular as f64);
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Axis;
    use crate::presets::fig2_device;

    fn sweep(extra: Vec<f64>) -> ResultTable {
        cmd_effective_sweep(&SweepConfig { device: fig2_device(), axis: Axis { start: 0.0, stop: 0.05, count: 11, extra } })
            .unwrap()
    }

    #[test]
    fn zero_coupling_row() {
        let t = sweep(vec![]);
        let d = fig2_device();
        assert_eq!(t.rows()[0], vec![0.0, d.omega_m2, 0.0, 0.0, d.gamma2, 0.0]);
    }

    #[test]
    fn sentinel_only_at_singularity() {
        let v0 = 1e-3f64.sqrt();
        let t = sweep(vec![v0]);
        let v = t.column("V").unwrap();
        let r = t.column("ratio").unwrap();
        let w = t.column("omega_eff").unwrap();
        for i in 0..v.len() {
            assert_eq!(r[i].is_infinite(), w[i].abs() < EPS_SING, "row {i}");
        }
        assert!(r.iter().any(|x| x.is_infinite()));
        assert!((t.summary["omega_eff_zero_v"] - v0).abs() < 1e-15);
    }

    #[test]
    fn g_eff_matches_closed_form_and_is_monotone() {
        let t = sweep(vec![]);
        let d = fig2_device();
        let g = t.column("g_eff").unwrap();
        for (v, ge) in t.column("V").unwrap().iter().zip(&g) {
            assert!((ge - 2.0 * d.g * v * v / (d.omega_m1 * d.omega_m1)).abs() < 1e-20);
        }
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }
}
