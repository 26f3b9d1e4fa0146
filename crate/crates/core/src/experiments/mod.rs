//! Monte-Carlo experiments: beam patterns, per-step received power and
//! success rate against SNR.
//!
//! Realization `r` draws its channel and its measurement noise from dedicated
//! sub-streams of the base seed. Every codebook and every SNR point reuses
//! the same noise stream, so comparisons between them see common random
//! numbers. Per-realization results are collected in index order and reduced
//! sequentially, which makes every output independent of the thread count.

mod config;
mod patterns;
mod power;
mod success;

pub use config::{
    default_policy, default_success_snr_grid, parse_snr_grid, ExperimentConfig, PowerMetric,
};
pub use patterns::{
    layer_codewords, run_beam_patterns, to_db, PatternScale, PatternTable, DB_FLOOR,
};
pub use power::{run_received_power, PowerCurve, PowerResult, PowerRow};
pub use success::{run_success_rate, SuccessResult, SuccessRow};

/// Mean and standard error (sample standard deviation over `√n`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

impl Estimate {
    /// Summary of `values` reduced in order; a single value has zero error.
    pub fn of(values: impl IntoIterator<Item = f64>) -> Self {
        let values: Vec<f64> = values.into_iter().collect();
        let n = values.len();
        assert!(n > 0, "estimate of an empty sample");
        let mean = values.iter().sum::<f64>() / n as f64;
        if n == 1 {
            return Self { mean, stderr: 0.0 };
        }
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
        Self {
            mean,
            stderr: (var / n as f64).sqrt(),
        }
    }
}

pub fn power_db(watts: f64) -> f64 {
    10.0 * watts.log10()
}
