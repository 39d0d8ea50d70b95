use optomech_core::model::{EffectiveParams, MultipathModel, Port};
use optomech_core::protocols::{run_multipath_conversion, MultipathSeries, RunOptions};
use rayon::prelude::*;

use crate::config::{complex, MultipathConfig};
use crate::error::{CliError, CliResult};
use crate::table::ResultTable;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Peak {
    pub index: usize,
    pub value: f64,
    /// Drop to the higher of the two surrounding minima.
    pub prominence: f64,
}

/// Local maxima of `f` whose prominence is at least `min_prominence`.
///
/// A plateau counts once, at its first sample; the end points are never
/// peaks.
pub fn find_peaks(f: &[f64], min_prominence: f64) -> Vec<Peak> {
    let n = f.len();
    let mut out = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if f[i] > f[i - 1] {
            let mut j = i;
            while j + 1 < n && f[j + 1] == f[i] {
                j += 1;
            }
            if j + 1 < n && f[j + 1] < f[i] {
                let h = f[i];
                let left = f[..i].iter().rev().take_while(|&&x| x <= h).fold(h, |m, &x| m.min(x));
                let right = f[j + 1..].iter().take_while(|&&x| x <= h).fold(h, |m, &x| m.min(x));
                let prominence = h - left.max(right);
                if prominence >= min_prominence {
                    out.push(Peak { index: i, value: h, prominence });
                }
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    out
}

pub fn model(cfg: &MultipathConfig) -> CliResult<MultipathModel> {
    if cfg.ports.is_empty() {
        return Err(CliError::Config("multipath needs at least one port".into()));
    }
    let ports = cfg
        .ports
        .iter()
        .map(|p| Port {
            params: EffectiveParams {
                detuning: p.detuning,
                omega_eff: p.omega_eff,
                g_eff: p.g_eff,
                gamma_eff: p.gamma_eff,
            },
            kappa: p.kappa,
            n_th: p.n_th,
            dims: p.dims(),
        })
        .collect();
    Ok(MultipathModel { ports, hops: cfg.hops.clone() })
}

fn variants(cfg: &MultipathConfig) -> CliResult<Vec<(Option<f64>, MultipathModel)>> {
    let base = model(cfg)?;
    let Some(sweep) = &cfg.sweep else { return Ok(vec![(None, base)]) };
    if sweep.port == 0 || sweep.port > base.ports.len() {
        return Err(CliError::Config(format!("sweep port {} outside 1..={}", sweep.port, base.ports.len())));
    }
    if sweep.values.is_empty() || sweep.values.iter().any(|v| !v.is_finite()) {
        return Err(CliError::Config("sweep values must be finite and non-empty".into()));
    }
    Ok(sweep
        .values
        .iter()
        .map(|&g| {
            let mut m = base.clone();
            m.ports[sweep.port - 1].params.g_eff = g;
            (Some(g), m)
        })
        .collect())
}

fn key(name: &str, sweep: Option<f64>) -> String {
    match sweep {
        Some(g) => format!("{name}[g={g}]"),
        None => name.to_string(),
    }
}

/// Conversion fidelity at every output port.
///
/// The primary table has columns `t, F_C1..F_Cn, F_S2..F_Sn, trace`, led by
/// `g_sweep` when a coupling sweep is configured; sweep points run in
/// parallel and appear in axis order. The second table lists the peaks of
/// every `F_Cj` as `[g_sweep,] port, t, F_C`.
pub fn cmd_multipath(cfg: &MultipathConfig) -> CliResult<(ResultTable, ResultTable)> {
    let runs = variants(cfg)?;
    let grid = cfg.time.evolve_config(0.0)?;
    let (alpha, beta) = (complex(cfg.alpha), complex(cfg.beta));
    let opts = RunOptions { force_integrator: false, positivity_stride: cfg.positivity_stride };
    let series: Vec<MultipathSeries> = runs
        .par_iter()
        .map(|(_, m)| run_multipath_conversion(m, alpha, beta, &grid, &opts))
        .collect::<Result<_, _>>()?;

    let n = cfg.ports.len();
    let swept = cfg.sweep.is_some();
    let mut cols: Vec<String> = Vec::new();
    if swept {
        cols.push("g_sweep".into());
    }
    cols.push("t".into());
    cols.extend((1..=n).map(|j| format!("F_C{j}")));
    cols.extend((2..=n).map(|j| format!("F_S{j}")));
    cols.push("trace".into());
    let mut main = ResultTable::new("multipath", cols);

    let mut pcols: Vec<&str> = if swept { vec!["g_sweep"] } else { vec![] };
    pcols.extend(["port", "t", "F_C"]);
    let mut peaks = ResultTable::new("peaks", pcols);

    for ((g, _), s) in runs.iter().zip(&series) {
        for (i, &t) in s.times.iter().enumerate() {
            let mut row: Vec<f64> = g.iter().copied().collect();
            row.push(t);
            row.extend(s.ports.iter().map(|p| p.f_c[i]));
            row.extend(s.ports.iter().skip(1).map(|p| p.f_s[i]));
            row.push(s.diagnostics.trace[i]);
            main.push(row)?;
        }
        for (j, p) in s.ports.iter().enumerate() {
            let found = find_peaks(&p.f_c, cfg.peak_prominence);
            for pk in &found {
                let mut row: Vec<f64> = g.iter().copied().collect();
                row.extend([(j + 1) as f64, s.times[pk.index], pk.value]);
                peaks.push(row)?;
            }
            let max = p.f_c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            main.summary.insert(key(&format!("max_F_C{}", j + 1), *g), max);
            if let Some(first) = found.first() {
                main.summary.insert(key(&format!("first_peak_t_C{}", j + 1), *g), s.times[first.index]);
            }
        }
        let d = &s.diagnostics;
        main.summary.insert(key("max_trace_deviation", *g), d.max_trace_deviation());
        if let Some(m) = d.min_eigenvalue {
            main.summary.insert(key("min_eigenvalue", *g), m);
        }
    }
    Ok((main, peaks))
}
