//! Argument handling and output for the `optomech` binary.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Parser;

use crate::commands::{convergence_recheck, run, Command};
use crate::config::{KappaConvention, RunConfig};
use crate::error::{CliError, CliResult};
use crate::table::{companion_path, meta_path, Format, Provenance, ResultTable};

#[derive(Debug, Parser)]
#[command(name = "optomech", version, about = "Optomechanical photon-phonon converter simulations")]
pub struct Args {
    pub command: Command,
    /// TOML run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Built-in parameter set, used when no config is given.
    #[arg(long)]
    pub preset: Option<String>,
    /// Output path; the primary table goes to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Re-run with every truncation raised by one and compare.
    #[arg(long)]
    pub check_convergence: bool,
    #[arg(long, value_enum)]
    pub kappa_convention: Option<KappaConvention>,
    #[arg(long)]
    pub threads: Option<usize>,
}

/// Resolves the run configuration and applies command-line overrides.
pub fn resolve(args: &Args) -> CliResult<RunConfig> {
    let mut cfg = match (&args.config, &args.preset) {
        (Some(path), None) => RunConfig::load(path)?,
        (None, Some(name)) => crate::presets::preset(name)?,
        (Some(_), Some(_)) => return Err(CliError::Config("give either --config or --preset, not both".into())),
        (None, None) => return Err(CliError::Config("one of --config or --preset is required".into())),
    };
    if let (Some(k), Some(cpf)) = (args.kappa_convention, cfg.cpf.as_mut()) {
        cpf.kappa_convention = k;
    }
    if args.out.is_some() {
        cfg.output = args.out.clone();
    }
    if args.format.is_some() {
        cfg.format = args.format;
    }
    if args.threads.is_some() {
        cfg.threads = args.threads;
    }
    cfg.check_convergence |= args.check_convergence;
    if cfg.threads == Some(0) {
        return Err(CliError::Config("--threads must be >= 1".into()));
    }
    Ok(cfg)
}

/// Everything a run produced, before export.
pub struct RunOutput {
    pub tables: Vec<ResultTable>,
    pub wall_time_s: f64,
    /// Set when the convergence re-run was requested and failed.
    pub convergence_failure: Option<CliError>,
}

pub fn execute(cmd: Command, cfg: &RunConfig) -> CliResult<RunOutput> {
    let work = || -> CliResult<RunOutput> {
        let start = Instant::now();
        if !cfg.check_convergence {
            let tables = run(cmd, cfg)?;
            return Ok(RunOutput { tables, wall_time_s: start.elapsed().as_secs_f64(), convergence_failure: None });
        }
        let report = convergence_recheck(cmd, cfg)?;
        let failure = (!report.passed()).then(|| CliError::Convergence {
            column: report.worst_column.clone(),
            difference: report.max_difference,
            threshold: crate::commands::CONVERGENCE_THRESHOLD,
        });
        let mut tables = report.base;
        tables.push(report.differences);
        Ok(RunOutput { tables, wall_time_s: start.elapsed().as_secs_f64(), convergence_failure: failure })
    };
    match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(e.to_string()))?
            .install(work),
        None => work(),
    }
}

fn write_table(t: &ResultTable, path: &Path, format: Format, prov: &Provenance) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    t.write(format, BufWriter::new(File::create(path)?))?;
    let meta = Provenance {
        table: t.name().to_string(),
        columns: t.columns().to_vec(),
        rows: t.len(),
        summary: t.summary.clone(),
        ..prov.clone()
    };
    let f = BufWriter::new(File::create(meta_path(path))?);
    serde_json::to_writer_pretty(f, &meta).map_err(|e| CliError::Table(e.to_string()))?;
    Ok(())
}

/// Writes the primary table to `cfg.output` (or stdout) and any further
/// tables next to it, each with a `.meta.json` sidecar.
pub fn export(cmd: Command, cfg: &RunConfig, out: &RunOutput) -> CliResult<Vec<PathBuf>> {
    let format = cfg.format.unwrap_or_default();
    let prov = Provenance {
        command: cmd.name().to_string(),
        preset: cfg.preset.clone(),
        config_hash: cfg.hash(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        wall_time_s: out.wall_time_s,
        table: String::new(),
        columns: Vec::new(),
        rows: 0,
        summary: Default::default(),
    };
    let mut written = Vec::new();
    match &cfg.output {
        Some(path) => {
            for (i, t) in out.tables.iter().enumerate() {
                let p = if i == 0 { path.clone() } else { companion_path(path, t.name()) };
                write_table(t, &p, format, &prov)?;
                written.push(p);
            }
        }
        None => {
            out.tables[0].write(format, std::io::stdout().lock())?;
            for t in &out.tables {
                for (k, v) in &t.summary {
                    log::info!("{}: {k} = {v:.10e}", t.name());
                }
            }
        }
    }
    Ok(written)
}

/// Full binary flow; returns the process exit code.
pub fn main_with(args: Args) -> i32 {
    let result = resolve(&args).and_then(|cfg| {
        let out = execute(args.command, &cfg)?;
        export(args.command, &cfg, &out)?;
        match out.convergence_failure {
            Some(e) => Err(e),
            None => Ok(()),
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
