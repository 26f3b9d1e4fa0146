//! Experiment configuration and its `key = value` file form.

use std::fs;
use std::path::{Path, PathBuf};

use crate::channel::{ChannelKind, ChannelParams};
use crate::codebook::{tree_depth, Method};
use crate::error::{invalid, Error, Result};
use crate::search::{Policy, PowerMode};

/// Which per-step power the received-power experiment reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerMetric {
    /// Noiseless received power of the stage winner, `P_eff |w_Rᴴ H w_T|²`.
    Signal,
    /// Measured `|y|²` of the stage winner.
    Measured,
}

impl std::str::FromStr for PowerMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "signal" => Ok(PowerMetric::Signal),
            "measured" => Ok(PowerMetric::Measured),
            other => Err(invalid(format!("unknown power metric '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n_t: usize,
    pub n_r: usize,
    pub methods: Vec<Method>,
    pub kind: ChannelKind,
    pub paths: usize,
    pub eta_db: f64,
    pub power_mode: PowerMode,
    /// Transmit power `P_tot` or `P_per` in watts; `N₀ = power · 10^{-snr/10}`.
    pub power_w: f64,
    pub snr_db: Vec<f64>,
    pub realizations: usize,
    pub seed: u64,
    pub policies: Vec<Policy>,
    pub power_metric: PowerMetric,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n_t: 64,
            n_r: 64,
            methods: Method::ALL.to_vec(),
            kind: ChannelKind::Los,
            paths: 3,
            eta_db: 15.0,
            power_mode: PowerMode::Total,
            power_w: 1.0,
            snr_db: vec![40.0],
            realizations: 1000,
            seed: 1,
            policies: Policy::ALL.to_vec(),
            power_metric: PowerMetric::Signal,
            out: None,
        }
    }
}

/// SNR grid `-10, -5, …, 30` dB used for success-rate sweeps.
pub fn default_success_snr_grid() -> Vec<f64> {
    (0..9).map(|i| -10.0 + 5.0 * i as f64).collect()
}

/// Policy used when a single success figure is wanted: strongest path for
/// LOS channels, any path for NLOS channels.
pub fn default_policy(kind: ChannelKind) -> Policy {
    match kind {
        ChannelKind::Los => Policy::AlignStrongest,
        ChannelKind::Nlos => Policy::AlignAnyMpc,
    }
}

fn list<T>(value: &str, parse: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse)
        .collect()
}

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| invalid(format!("bad value '{value}' for {key}")))
}

/// Parses `a,b,c` or an inclusive range `start:step:stop`.
pub fn parse_snr_grid(value: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = value.split(':').collect();
    match parts.as_slice() {
        [start, step, stop] => {
            let (start, step, stop): (f64, f64, f64) = (
                number("snr_db", start)?,
                number("snr_db", step)?,
                number("snr_db", stop)?,
            );
            if step.is_nan() || step <= 0.0 || stop < start {
                return Err(invalid(format!("bad SNR range '{value}'")));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            Ok((0..count).map(|i| start + step * i as f64).collect())
        }
        [_] => list(value, |s| number("snr_db", s)),
        _ => Err(invalid(format!("bad SNR grid '{value}'"))),
    }
}

impl ExperimentConfig {
    /// Sets one field from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim().replace('-', "_").as_str() {
            "n" => {
                self.n_t = number(key, value)?;
                self.n_r = self.n_t;
            }
            "n_t" => self.n_t = number(key, value)?,
            "n_r" => self.n_r = number(key, value)?,
            "methods" | "method" => self.methods = list(value, str::parse)?,
            "channel" | "kind" => self.kind = value.parse()?,
            "paths" | "l" => self.paths = number(key, value)?,
            "eta_db" => self.eta_db = number(key, value)?,
            "power_model" | "power_mode" => self.power_mode = value.parse()?,
            "power_w" => self.power_w = number(key, value)?,
            "snr_db" => self.snr_db = parse_snr_grid(value)?,
            "realizations" | "r" => self.realizations = number(key, value)?,
            "seed" => self.seed = number(key, value)?,
            "policies" | "policy" => self.policies = list(value, str::parse)?,
            "power_metric" => self.power_metric = value.parse()?,
            "out" => self.out = Some(PathBuf::from(value)),
            other => return Err(invalid(format!("unknown configuration key '{other}'"))),
        }
        Ok(())
    }

    /// Applies a `key = value` document; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                what: "config",
                line: i + 1,
                msg: "expected 'key = value'".into(),
            })?;
            self.set(key, value).map_err(|e| Error::Parse {
                what: "config",
                line: i + 1,
                msg: e.to_string(),
            })?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        self.apply_text(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        tree_depth(self.n_t)?;
        tree_depth(self.n_r)?;
        if self.n_t < 2 || self.n_r < 2 {
            return Err(invalid("array sizes must be at least 2"));
        }
        if self.methods.is_empty() {
            return Err(invalid("at least one codebook method is required"));
        }
        if self.paths == 0 {
            return Err(invalid("channel needs at least one path"));
        }
        if self.realizations == 0 {
            return Err(invalid("realizations must be at least 1"));
        }
        if self.snr_db.is_empty() {
            return Err(invalid("SNR grid is empty"));
        }
        if self.snr_db.iter().any(|s| !s.is_finite())
            || self.snr_db.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(invalid("SNR grid must be finite and strictly ascending"));
        }
        if !(self.power_w > 0.0 && self.power_w.is_finite()) {
            return Err(invalid("transmit power must be positive"));
        }
        if self.policies.is_empty() {
            return Err(invalid("at least one adjudication policy is required"));
        }
        Ok(())
    }

    pub fn channel_params(&self) -> ChannelParams {
        ChannelParams {
            n_t: self.n_t,
            n_r: self.n_r,
            paths: self.paths,
            kind: self.kind,
            eta_db: self.eta_db,
            seed: self.seed,
        }
    }
}
