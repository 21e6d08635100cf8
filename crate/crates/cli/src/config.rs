//! Flat `key = value` experiment configuration.
//!
//! The file is parsed as TOML without tables, so every key sits at the top
//! level. Unknown keys are rejected.

use crate::error::{CliError, CliResult};
use ddsim_core::hamiltonian::{SpinChainParams, ThermalParams};
use ddsim_core::precision::{PrecisionPolicy, MAX_BITS};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt;
use std::path::Path;

pub const PRECISION_ENV: &str = "DDSIM_PRECISION_BITS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Experiment {
    Fig1,
    Fig2,
    Table1Scaling,
    PddCddRatio,
    ThompsonSweep,
    CpmgScaling,
    TsdsScaling,
    Custom,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Fig1 => "fig1",
            Experiment::Fig2 => "fig2",
            Experiment::Table1Scaling => "table1_scaling",
            Experiment::PddCddRatio => "pdd_cdd_ratio",
            Experiment::ThompsonSweep => "thompson_sweep",
            Experiment::CpmgScaling => "cpmg_scaling",
            Experiment::TsdsScaling => "tsds_scaling",
            Experiment::Custom => "custom",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingScheme {
    Pdd,
    Cdd,
    Tsds,
    Cpmg,
    ConcatCpmg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,

    // Spin chain (fig1, fig2, custom).
    pub n_spins: usize,
    pub j_coupling: f64,
    pub beta_coupling: f64,
    pub decay_base: f64,
    /// Bath temperature in kelvin.
    pub temperature: f64,
    /// Read every coupling as a frequency in Hz and multiply by 2π. When
    /// false the values are angular frequencies in rad/s.
    pub couplings_in_hz: bool,

    /// Total sequence duration in seconds.
    pub total_time: f64,
    pub level_min: u32,
    pub level_max: u32,
    /// Pulse widths in seconds; fig2 runs one sweep per entry.
    pub pulse_width: Vec<f64>,
    /// `adaptive`, `adaptive:<target>` or `fixed:<bits>`.
    pub precision: String,
    pub seed: u64,
    pub output_path: Option<String>,

    // Random models (scaling, ratio, thompson).
    pub model_bath_dim: usize,
    pub model_j: f64,
    pub model_beta: f64,

    // Scaling sweeps.
    pub scheme: ScalingScheme,
    pub tau_min: f64,
    pub tau_max: f64,
    pub points: usize,
    pub cdd_level: u32,
    pub tsds_order: u32,

    /// `βT` held fixed in the ratio sweep.
    pub ratio_c: f64,
    pub draws: usize,

    /// Sequence file for the custom experiment.
    pub sequence_file: Option<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let chain = SpinChainParams::gaas();
        ExperimentConfig {
            experiment: Experiment::Fig1,
            n_spins: chain.n_spins,
            j_coupling: chain.j_coupling,
            beta_coupling: chain.beta_coupling,
            decay_base: chain.decay_base,
            temperature: 1.0,
            couplings_in_hz: false,
            total_time: 1e-5,
            level_min: 1,
            level_max: 8,
            pulse_width: vec![1e-12, 1e-11, 1e-10],
            precision: "adaptive".into(),
            seed: 1,
            output_path: None,
            model_bath_dim: 2,
            model_j: 1e4,
            model_beta: 1e5,
            scheme: ScalingScheme::Pdd,
            tau_min: 1e-9,
            tau_max: 1e-7,
            points: 9,
            cdd_level: 2,
            tsds_order: 3,
            ratio_c: 0.1,
            draws: 1000,
            sequence_file: None,
        }
    }
}

/// Parsed form of the `precision` key.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PrecisionSetting {
    Fixed(u32),
    /// Target predicted per row from the level bound.
    AdaptivePredicted,
    Adaptive(f64),
}

impl PrecisionSetting {
    /// Policy for a row whose smallest expected value is `predicted`.
    pub fn policy(self, predicted: f64) -> PrecisionPolicy {
        match self {
            PrecisionSetting::Fixed(b) => PrecisionPolicy::Fixed(b),
            PrecisionSetting::AdaptivePredicted => PrecisionPolicy::Adaptive { target: predicted },
            PrecisionSetting::Adaptive(t) => PrecisionPolicy::Adaptive { target: t },
        }
    }

    /// Bits for work that has no purity observable to escalate on.
    pub fn base_bits(self) -> u32 {
        match self {
            PrecisionSetting::Fixed(b) => b,
            _ => 256,
        }
    }
}

impl ExperimentConfig {
    pub fn from_str(text: &str) -> CliResult<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_str(&text)
    }

    /// Replace the precision setting with `fixed:<bits>` when the environment
    /// override is present.
    pub fn apply_env(&mut self) -> CliResult<()> {
        if let Ok(v) = std::env::var(PRECISION_ENV) {
            let bits: u32 = v
                .trim()
                .parse()
                .map_err(|_| CliError::Config(format!("{PRECISION_ENV}={v} is not an integer")))?;
            self.precision = format!("fixed:{bits}");
            self.validate()?;
        }
        Ok(())
    }

    pub fn validate(&self) -> CliResult<()> {
        let bad = |m: String| Err(CliError::Config(m));
        if !(self.total_time > 0.0 && self.total_time.is_finite()) {
            return bad(format!("total_time must be positive, got {}", self.total_time));
        }
        if self.level_min > self.level_max {
            return bad(format!("level_min {} exceeds level_max {}", self.level_min, self.level_max));
        }
        if self.pulse_width.iter().any(|w| !(*w >= 0.0)) {
            return bad("pulse widths must be nonnegative".into());
        }
        if !(self.tau_min > 0.0 && self.tau_max > self.tau_min) {
            return bad(format!("need 0 < tau_min < tau_max, got {} and {}", self.tau_min, self.tau_max));
        }
        if self.points < 2 {
            return bad("a sweep needs at least two points".into());
        }
        if self.model_bath_dim < 1 {
            return bad("model_bath_dim must be at least 1".into());
        }
        self.precision_setting()?;
        Ok(())
    }

    pub fn precision_setting(&self) -> CliResult<PrecisionSetting> {
        let s = self.precision.trim();
        let parsed = match s.split_once(':') {
            None if s == "adaptive" => Some(PrecisionSetting::AdaptivePredicted),
            Some(("adaptive", t)) => t.trim().parse::<f64>().ok().filter(|t| *t > 0.0).map(PrecisionSetting::Adaptive),
            Some(("fixed", b)) => b.trim().parse::<u32>().ok().filter(|b| (64..=MAX_BITS).contains(b)).map(PrecisionSetting::Fixed),
            _ => None,
        };
        parsed.ok_or_else(|| CliError::Config(format!("unrecognised precision setting `{s}`")))
    }

    /// Factor taking configured couplings to rad/s.
    pub fn coupling_scale(&self) -> f64 {
        if self.couplings_in_hz {
            std::f64::consts::TAU
        } else {
            1.0
        }
    }

    /// `(model_j, model_beta)` in rad/s.
    pub fn model_couplings(&self) -> (f64, f64) {
        (self.model_j * self.coupling_scale(), self.model_beta * self.coupling_scale())
    }

    pub fn chain(&self) -> SpinChainParams {
        SpinChainParams {
            n_spins: self.n_spins,
            j_coupling: self.j_coupling * self.coupling_scale(),
            beta_coupling: self.beta_coupling * self.coupling_scale(),
            decay_base: self.decay_base,
        }
    }

    pub fn thermal(&self) -> ThermalParams {
        ThermalParams::at(self.temperature)
    }

    /// Canonical serialization used for hashing.
    pub fn canonical(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the canonical serialization, lowercase hex.
    pub fn hash(&self) -> String {
        Sha256::digest(self.canonical().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_keys() {
        let cfg = ExperimentConfig::from_str("experiment = \"fig2\"\nlevel_max = 4\npulse_width = [1e-12]\n").unwrap();
        assert_eq!(cfg.experiment, Experiment::Fig2);
        assert_eq!(cfg.level_max, 4);
        assert_eq!(cfg.pulse_width, vec![1e-12]);
        assert!(ExperimentConfig::from_str("bogus = 1").is_err());
        assert!(ExperimentConfig::from_str("[section]\nx = 1").is_err());
    }

    #[test]
    fn precision_forms() {
        let mut cfg = ExperimentConfig::default();
        assert_eq!(cfg.precision_setting().unwrap(), PrecisionSetting::AdaptivePredicted);
        cfg.precision = "fixed:320".into();
        assert_eq!(cfg.precision_setting().unwrap(), PrecisionSetting::Fixed(320));
        cfg.precision = "adaptive:1e-40".into();
        assert_eq!(cfg.precision_setting().unwrap(), PrecisionSetting::Adaptive(1e-40));
        cfg.precision = "fast".into();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn hash_tracks_every_field() {
        let a = ExperimentConfig::default();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.seed += 1;
        assert_ne!(a.hash(), b.hash());
        let mut c = a.clone();
        c.temperature = 2.0;
        assert_ne!(a.hash(), c.hash());
    }

    #[test]
    fn hz_switch_scales_couplings() {
        let cfg = ExperimentConfig::from_str("couplings_in_hz = true
j_coupling = 1.0
model_beta = 2.0
").unwrap();
        assert_eq!(cfg.chain().j_coupling, std::f64::consts::TAU);
        assert_eq!(cfg.model_couplings().1, 2.0 * std::f64::consts::TAU);
        assert_eq!(ExperimentConfig::default().chain().j_coupling, 1e6);
    }
}
