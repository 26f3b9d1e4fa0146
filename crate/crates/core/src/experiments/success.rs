//! Search success rate against SNR.

use std::io::Write;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use super::power::codebooks;
use super::{Estimate, ExperimentConfig};
use crate::channel::sample_channel;
use crate::codebook::Method;
use crate::error::Result;
use crate::rng::{substream, Purpose};
use crate::search::{hierarchical_search, Adjudicator, Policy, PowerModel};

#[derive(Debug, Clone, PartialEq)]
pub struct SuccessRow {
    pub snr_db: f64,
    pub method: Method,
    pub policy: Policy,
    pub success: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone)]
pub struct SuccessResult {
    /// Ordered by SNR, then method, then policy.
    pub rows: Vec<SuccessRow>,
    pub realizations: usize,
    pub runtime: Duration,
}

impl SuccessResult {
    pub fn get(&self, snr_db: f64, method: Method, policy: Policy) -> Option<&SuccessRow> {
        self.rows
            .iter()
            .find(|r| r.snr_db == snr_db && r.method == method && r.policy == policy)
    }

    /// Rows of one method and policy in SNR order.
    pub fn series(&self, method: Method, policy: Policy) -> Vec<&SuccessRow> {
        self.rows
            .iter()
            .filter(|r| r.method == method && r.policy == policy)
            .collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["snr_db", "method", "policy", "success", "stderr"])?;
        for r in &self.rows {
            w.write_record([
                r.snr_db.to_string(),
                r.method.to_string(),
                r.policy.to_string(),
                r.success.to_string(),
                r.stderr.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Fraction of realizations whose found leaf pair satisfies each policy, for
/// every SNR point and method of `cfg`.
pub fn run_success_rate(cfg: &ExperimentConfig) -> Result<SuccessResult> {
    cfg.validate()?;
    let start = Instant::now();
    let books = codebooks(cfg)?;
    let params = cfg.channel_params();
    let models = cfg
        .snr_db
        .iter()
        .map(|&s| PowerModel::from_snr_db(cfg.power_mode, cfg.power_w, s))
        .collect::<Result<Vec<_>>>()?;

    // Flags per realization, laid out as [snr][method][policy].
    let flags = (0..cfg.realizations as u64)
        .into_par_iter()
        .map(|r| -> Result<Vec<bool>> {
            let ch = sample_channel(&params, &mut params.rng_for(r))?;
            let adj = Adjudicator::new(&ch);
            let mut out = Vec::with_capacity(models.len() * books.len() * cfg.policies.len());
            for pm in &models {
                for (_, cb_t, cb_r) in &books {
                    let mut rng = substream(cfg.seed, r, Purpose::Noise);
                    let found = hierarchical_search(cb_t, cb_r, &ch, pm, &mut rng)?;
                    out.extend(cfg.policies.iter().map(|&p| adj.success(&found, p)));
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    let mut slot = 0;
    for &snr_db in &cfg.snr_db {
        for (method, _, _) in &books {
            for &policy in &cfg.policies {
                let e = Estimate::of(flags.iter().map(|f| f64::from(u8::from(f[slot]))));
                rows.push(SuccessRow {
                    snr_db,
                    method: *method,
                    policy,
                    success: e.mean,
                    stderr: e.stderr,
                });
                slot += 1;
            }
        }
    }
    Ok(SuccessResult {
        rows,
        realizations: cfg.realizations,
        runtime: start.elapsed(),
    })
}
