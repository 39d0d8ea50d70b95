//! TOML run configuration.
//!
//! A file carries `schema_version`, optional run-level settings and one
//! section per command. When `preset` is set, sections missing from the file
//! are taken from that preset.

use std::path::{Path, PathBuf};

use optomech_core::engine::EvolveConfig;
use optomech_core::model::{effective_params, DeviceParams, EffectiveParams, KerrSign};
use optomech_core::C64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};
use crate::table::Format;

pub const SCHEMA_VERSION: u32 = 1;

/// Default truncation for photons.
pub const PHOTON_DIM: usize = 3;
/// Default truncation for the membrane and auxiliary oscillators.
pub const MECHANICAL_DIM: usize = 4;
/// Auxiliary-oscillator truncation for hot (`n_th = 5`) baths.
pub const HOT_MECHANICAL_DIM: usize = 8;

/// `[re, im]`.
pub type Amplitude = [f64; 2];

pub fn complex(a: Amplitude) -> C64 {
    C64::new(a[0], a[1])
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<Format>,
    #[serde(default)]
    pub check_convergence: bool,
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default)]
    pub effective_sweep: Option<SweepConfig>,
    #[serde(default)]
    pub cpf: Option<CpfConfig>,
    #[serde(default)]
    pub convert: Option<ConvertConfig>,
    #[serde(default)]
    pub multipath: Option<MultipathConfig>,
    #[serde(default)]
    pub validate: Option<ValidateConfig>,
}

impl RunConfig {
    pub fn empty() -> Self {
        Self { schema_version: SCHEMA_VERSION, ..Default::default() }
    }

    pub fn from_toml(text: &str) -> CliResult<Self> {
        let cfg: RunConfig = toml::from_str(text)?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(config_err(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                cfg.schema_version
            )));
        }
        cfg.resolve_preset()
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    fn resolve_preset(self) -> CliResult<Self> {
        let Some(name) = self.preset.clone() else { return Ok(self) };
        let base = crate::presets::preset(&name)?;
        Ok(Self {
            effective_sweep: self.effective_sweep.or(base.effective_sweep),
            cpf: self.cpf.or(base.cpf),
            convert: self.convert.or(base.convert),
            multipath: self.multipath.or(base.multipath),
            validate: self.validate.or(base.validate),
            ..self
        })
    }

    /// Hex SHA-256 of the canonical JSON form, leaving out the output path
    /// and thread count.
    pub fn hash(&self) -> String {
        let key = Self { output: None, threads: None, ..self.clone() };
        let canonical = serde_json::to_string(&key).expect("config serialises");
        Sha256::digest(canonical.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Uniform grid on `[start, stop]` merged with explicit `extra` points,
/// sorted ascending without duplicates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    #[serde(default)]
    pub extra: Vec<f64>,
}

impl Axis {
    pub fn points(&self) -> CliResult<Vec<f64>> {
        if self.count == 0 {
            return Err(config_err("axis count must be >= 1"));
        }
        if !(self.start.is_finite() && self.stop.is_finite()) || self.extra.iter().any(|v| !v.is_finite()) {
            return Err(config_err("axis values must be finite"));
        }
        let mut pts: Vec<f64> = if self.count == 1 {
            vec![self.start]
        } else {
            let n = (self.count - 1) as f64;
            (0..self.count).map(|i| self.start + (self.stop - self.start) * i as f64 / n).collect()
        };
        pts.extend(&self.extra);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        Ok(pts)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimeUnit {
    /// Inverse reference frequency.
    #[default]
    Reference,
    /// Multiples of `pi / |g_eff|`.
    KerrPi,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub end: f64,
    pub points: usize,
    #[serde(default)]
    pub unit: TimeUnit,
    #[serde(default)]
    pub rel_tol: Option<f64>,
    #[serde(default)]
    pub abs_tol: Option<f64>,
}

impl TimeGrid {
    pub fn evolve_config(&self, g_eff: f64) -> CliResult<EvolveConfig> {
        let scale = match self.unit {
            TimeUnit::Reference => 1.0,
            TimeUnit::KerrPi => {
                if g_eff == 0.0 {
                    return Err(config_err("time unit kerr-pi needs g_eff != 0"));
                }
                std::f64::consts::PI / g_eff.abs()
            }
        };
        let end = self.end * scale;
        if !(end > 0.0 && end.is_finite()) || self.points < 2 {
            return Err(config_err("time grid needs end > 0 and at least 2 points"));
        }
        let mut cfg = EvolveConfig::uniform(end, self.points);
        if let Some(r) = self.rel_tol {
            cfg.rel_tol = r;
        }
        if let Some(a) = self.abs_tol {
            cfg.abs_tol = a;
        }
        cfg.validate().map_err(|e| config_err(e.to_string()))?;
        Ok(cfg)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// `v` is ignored; the axis supplies it.
    pub device: DeviceParams,
    pub axis: Axis,
}

/// What a dimensionless cavity-loss ratio multiplies.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum KappaConvention {
    #[default]
    Geff,
    G,
}

fn default_cpf_dims() -> [usize; 2] {
    [PHOTON_DIM, MECHANICAL_DIM]
}

fn minus() -> KerrSign {
    KerrSign::Minus
}

fn one() -> usize {
    1
}

fn network_stride() -> usize {
    100
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CpfConfig {
    /// Physical parameters; effective ones are derived. Exclusive with
    /// `effective`.
    #[serde(default)]
    pub device: Option<DeviceParams>,
    #[serde(default)]
    pub effective: Option<EffectiveParams>,
    /// `|00>, |01>, |10>, |11>` amplitudes, normalised on load. Uniform
    /// when absent.
    #[serde(default)]
    pub amplitudes: Option<[Amplitude; 4]>,
    /// Absolute cavity loss, added to `kappa_ratio` times the convention rate.
    #[serde(default)]
    pub kappa: f64,
    #[serde(default)]
    pub kappa_ratio: f64,
    #[serde(default)]
    pub kappa_convention: KappaConvention,
    #[serde(default)]
    pub n_th: f64,
    #[serde(default = "default_cpf_dims")]
    pub dims: [usize; 2],
    #[serde(default = "minus")]
    pub kerr_sign: KerrSign,
    pub time: TimeGrid,
    #[serde(default)]
    pub force_integrator: bool,
    #[serde(default = "one")]
    pub positivity_stride: usize,
}

impl CpfConfig {
    pub fn effective(&self) -> CliResult<EffectiveParams> {
        match (&self.device, &self.effective) {
            (Some(d), None) => Ok(effective_params(d)?),
            (None, Some(e)) => Ok(*e),
            _ => Err(config_err("cpf needs exactly one of `device` or `effective`")),
        }
    }

    pub fn kappa(&self) -> CliResult<f64> {
        let base = match self.kappa_convention {
            KappaConvention::Geff => self.effective()?.g_eff.abs(),
            KappaConvention::G => match &self.device {
                Some(d) => d.g.abs(),
                None if self.kappa_ratio == 0.0 => 0.0,
                None => return Err(config_err("kappa convention `g` needs `device` parameters")),
            },
        };
        let k = self.kappa + self.kappa_ratio * base;
        if !(k >= 0.0 && k.is_finite()) {
            return Err(config_err(format!("cavity loss {k} must be finite and >= 0")));
        }
        Ok(k)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase", deny_unknown_fields)]
pub enum GateConfig {
    Ideal,
    /// Effective-model gate tuned by the integer phase conditions.
    Simulated {
        n1: i32,
        #[serde(default)]
        n2: i32,
        #[serde(default)]
        n3: i32,
        omega_eff: f64,
        #[serde(default)]
        gamma_eff: f64,
        #[serde(default)]
        kappa: f64,
        #[serde(default)]
        n_th: f64,
        #[serde(default = "default_cpf_dims")]
        dims: [usize; 2],
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvertConfig {
    pub alpha: Amplitude,
    pub beta: Amplitude,
    pub gate: GateConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PortConfig {
    pub omega_eff: f64,
    pub g_eff: f64,
    #[serde(default)]
    pub detuning: f64,
    #[serde(default)]
    pub gamma_eff: f64,
    #[serde(default)]
    pub kappa: f64,
    #[serde(default)]
    pub n_th: f64,
    /// `[cavity, aux]`; defaults depend on `n_th`.
    #[serde(default)]
    pub dims: Option<[usize; 2]>,
}

impl PortConfig {
    pub fn dims(&self) -> [usize; 2] {
        self.dims.unwrap_or(if self.n_th > 1.0 {
            [PHOTON_DIM, HOT_MECHANICAL_DIM]
        } else {
            [PHOTON_DIM, MECHANICAL_DIM]
        })
    }
}

/// Replaces `g_eff` of one port (1-based) by each value in turn.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingSweep {
    pub port: usize,
    pub values: Vec<f64>,
}

fn zero_amp() -> Amplitude {
    [0.0, 0.0]
}

fn one_amp() -> Amplitude {
    [1.0, 0.0]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultipathConfig {
    pub ports: Vec<PortConfig>,
    /// `J_s` from cavity 1 to cavity `s + 2`.
    pub hops: Vec<f64>,
    #[serde(default = "zero_amp")]
    pub alpha: Amplitude,
    #[serde(default = "one_amp")]
    pub beta: Amplitude,
    pub time: TimeGrid,
    #[serde(default)]
    pub sweep: Option<CouplingSweep>,
    /// Exact eigenvalue check every this many samples; the rest are only
    /// certified against the positivity floor.
    #[serde(default = "network_stride")]
    pub positivity_stride: usize,
    /// Smallest rise on both sides for a local maximum to count as a peak.
    #[serde(default = "default_prominence")]
    pub peak_prominence: f64,
}

fn default_prominence() -> f64 {
    1e-3
}

fn default_validate_dims() -> [usize; 3] {
    [PHOTON_DIM, MECHANICAL_DIM, MECHANICAL_DIM]
}

fn default_v_factor() -> f64 {
    0.1
}

fn default_periods() -> f64 {
    1.0
}

fn default_validate_points() -> usize {
    401
}

fn half_amp() -> Amplitude {
    [std::f64::consts::FRAC_1_SQRT_2, 0.0]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateConfig {
    /// Values of `omega_m1 / omega_m2`.
    pub separations: Vec<f64>,
    pub omega_m1: f64,
    pub g: f64,
    /// `V = v_factor sqrt(omega_m1 omega_m2)`.
    #[serde(default = "default_v_factor")]
    pub v_factor: f64,
    /// `[cavity, membrane, aux]`.
    #[serde(default = "default_validate_dims")]
    pub dims: [usize; 3],
    #[serde(default = "half_amp")]
    pub alpha: Amplitude,
    #[serde(default = "half_amp")]
    pub beta: Amplitude,
    /// Span in effective periods `2 pi / omega_eff`.
    #[serde(default = "default_periods")]
    pub periods: f64,
    #[serde(default = "default_validate_points")]
    pub points: usize,
    #[serde(default)]
    pub rel_tol: Option<f64>,
    #[serde(default)]
    pub abs_tol: Option<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_merges_extra_points() {
        let a = Axis { start: 0.0, stop: 1.0, count: 3, extra: vec![0.25, 0.5] };
        assert_eq!(a.points().unwrap(), vec![0.0, 0.25, 0.5, 1.0]);
        assert!(Axis { count: 0, ..a.clone() }.points().is_err());
        assert!(Axis { stop: f64::NAN, ..a }.points().is_err());
    }

    #[test]
    fn schema_version_is_checked() {
        assert!(matches!(RunConfig::from_toml("schema_version = 7"), Err(CliError::Config(_))));
        assert!(RunConfig::from_toml("schema_version = 1").is_ok());
        assert!(RunConfig::from_toml("schema_version = 1\nbogus = 3").is_err());
    }

    #[test]
    fn parses_cpf_section() {
        let text = r#"
            schema_version = 1
            [cpf]
            kappa_ratio = 0.2
            n_th = 1.0
            time = { end = 1.2, points = 50, unit = "kerr-pi" }
            [cpf.device]
            g = 1e-4
            omega_m1 = 1.0
            omega_m2 = 1e-3
            v = 3.131e-2
        "#;
        let cfg = RunConfig::from_toml(text).unwrap();
        let cpf = cfg.cpf.unwrap();
        assert_eq!(cpf.dims, [3, 4]);
        assert_eq!(cpf.kerr_sign, KerrSign::Minus);
        let g_eff = cpf.effective().unwrap().g_eff;
        assert!((cpf.kappa().unwrap() - 0.2 * g_eff).abs() < 1e-20);
        let grid = cpf.time.evolve_config(g_eff).unwrap();
        assert!((grid.t_grid.last().unwrap() - 1.2 * std::f64::consts::PI / g_eff).abs() < 1e-6);
    }

    #[test]
    fn preset_fills_missing_sections() {
        let cfg = RunConfig::from_toml("schema_version = 1\npreset = \"fig3b\"").unwrap();
        assert!(cfg.cpf.is_some());
        assert!(RunConfig::from_toml("schema_version = 1\npreset = \"nope\"").is_err());
    }

    #[test]
    fn hash_tracks_content() {
        let a = RunConfig::empty();
        let mut b = RunConfig::empty();
        assert_eq!(a.hash(), b.hash());
        b.check_convergence = true;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
