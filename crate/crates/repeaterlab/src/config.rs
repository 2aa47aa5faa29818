//! Serializable experiment description. A run writes it next to its CSV so
//! the output can be regenerated exactly.

use crate::error::{AppError, AppResult};
use repeaterlab_core::{NoiseParams, RepeaterConfig, Scheme, TimingParams};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
pub enum SchemeArg {
    A,
    B,
    C,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::A => Scheme::A,
            SchemeArg::B => Scheme::B,
            SchemeArg::C => Scheme::C,
        }
    }
}

/// Fully resolved model parameters shared by every experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub scheme: SchemeArg,
    pub p1: f64,
    pub p2: f64,
    pub eta: f64,
    /// Measurement quality follows `p2` in scans over `p2`.
    pub eta_tied: bool,
    pub segments: usize,
    pub group: usize,
    pub working_fidelity: f64,
    pub eps: f64,
    pub tau_op: f64,
    pub l_segment: f64,
    pub l0: f64,
    pub c: f64,
    pub runs: usize,
}

impl Params {
    pub fn noise(&self) -> AppResult<NoiseParams> {
        Ok(NoiseParams::new(self.p1, self.p2, self.eta)?)
    }

    pub fn timing(&self) -> AppResult<TimingParams> {
        Ok(TimingParams::from_geometry(self.tau_op, self.l_segment, self.l0, self.c)?)
    }

    pub fn repeater(&self) -> AppResult<RepeaterConfig> {
        Ok(RepeaterConfig::new(self.segments, self.group, self.scheme.into(), self.working_fidelity)
            .with_noise(self.noise()?)
            .with_eps(self.eps)
            .with_timing(self.timing()?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Experiment {
    Fixpoints { p_lo: f64, p_hi: f64, steps: usize },
    Converge { start: f64, steps: usize },
    Shape { steps: usize },
    Loop { f_lo: f64, f_hi: f64, steps: usize },
    Resources { f_lo: f64, f_hi: f64, steps: usize, error_levels: Vec<f64> },
    Repeater,
    Table,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub params: Params,
    pub experiment: Experiment,
}

impl ExperimentConfig {
    pub fn to_toml(&self) -> AppResult<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn from_toml(text: &str) -> AppResult<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> AppResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| AppError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_toml(&text)
    }
}

/// `<out>.meta.toml`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.toml");
    PathBuf::from(name)
}
