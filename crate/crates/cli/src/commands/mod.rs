//! One function per CLI command, each returning its result tables.

pub mod convergence;
pub mod convert;
pub mod cpf;
pub mod multipath;
pub mod sweep;
pub mod validate;

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::table::ResultTable;

pub use convergence::{bump_dims, convergence_recheck, ConvergenceReport, CONVERGENCE_THRESHOLD};
pub use convert::cmd_convert;
pub use cpf::cmd_cpf_dynamics;
pub use multipath::{cmd_multipath, find_peaks, Peak};
pub use sweep::{cmd_effective_sweep, EPS_SING};
pub use validate::cmd_validate_effective;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    EffectiveSweep,
    CpfDynamics,
    Convert,
    Multipath,
    ValidateEffective,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::EffectiveSweep => "effective-sweep",
            Command::CpfDynamics => "cpf-dynamics",
            Command::Convert => "convert",
            Command::Multipath => "multipath",
            Command::ValidateEffective => "validate-effective",
        }
    }

    /// Config section the command reads.
    pub fn section(self) -> &'static str {
        match self {
            Command::EffectiveSweep => "effective_sweep",
            Command::CpfDynamics => "cpf",
            Command::Convert => "convert",
            Command::Multipath => "multipath",
            Command::ValidateEffective => "validate",
        }
    }
}

fn missing(cmd: Command) -> CliError {
    CliError::Config(format!("command `{}` needs a [{}] section", cmd.name(), cmd.section()))
}

/// Runs `cmd` on its section of `cfg`. The first table is the primary one.
pub fn run(cmd: Command, cfg: &RunConfig) -> CliResult<Vec<ResultTable>> {
    match cmd {
        Command::EffectiveSweep => {
            Ok(vec![cmd_effective_sweep(cfg.effective_sweep.as_ref().ok_or_else(|| missing(cmd))?)?])
        }
        Command::CpfDynamics => Ok(vec![cmd_cpf_dynamics(cfg.cpf.as_ref().ok_or_else(|| missing(cmd))?)?]),
        Command::Convert => Ok(vec![cmd_convert(cfg.convert.as_ref().ok_or_else(|| missing(cmd))?)?]),
        Command::Multipath => {
            let (main, peaks) = cmd_multipath(cfg.multipath.as_ref().ok_or_else(|| missing(cmd))?)?;
            Ok(vec![main, peaks])
        }
        Command::ValidateEffective => {
            Ok(vec![cmd_validate_effective(cfg.validate.as_ref().ok_or_else(|| missing(cmd))?)?])
        }
    }
}
