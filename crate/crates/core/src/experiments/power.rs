//! Mean received power after each search stage.

use std::io::Write;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use super::{power_db, Estimate, ExperimentConfig, PowerMetric};
use crate::channel::sample_channel;
use crate::codebook::{generate, Codebook, Method};
use crate::error::{invalid, Result};
use crate::rng::{substream, Purpose};
use crate::search::{exhaustive_search, hierarchical_search, PowerModel};

#[derive(Debug, Clone, PartialEq)]
pub struct PowerCurve {
    pub method: Method,
    /// Stage-winner power per step (watts), step 1 first.
    pub steps: Vec<Estimate>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerRow {
    pub step: usize,
    pub method: Method,
    pub mean_power_w: f64,
    pub mean_power_db: f64,
    pub stderr_db: f64,
    pub bound_db: f64,
}

#[derive(Debug, Clone)]
pub struct PowerResult {
    pub curves: Vec<PowerCurve>,
    /// Received power of the exhaustive-search pair (watts).
    pub bound: Estimate,
    pub realizations: usize,
    pub runtime: Duration,
}

/// dB standard error of a linear mean, to first order.
fn stderr_db(e: &Estimate) -> f64 {
    10.0 / std::f64::consts::LN_10 * e.stderr / e.mean
}

impl PowerResult {
    pub fn curve(&self, method: Method) -> Option<&PowerCurve> {
        self.curves.iter().find(|c| c.method == method)
    }

    pub fn rows(&self) -> Vec<PowerRow> {
        let bound_db = power_db(self.bound.mean);
        let mut rows = Vec::new();
        for curve in &self.curves {
            for (i, e) in curve.steps.iter().enumerate() {
                rows.push(PowerRow {
                    step: i + 1,
                    method: curve.method,
                    mean_power_w: e.mean,
                    mean_power_db: power_db(e.mean),
                    stderr_db: stderr_db(e),
                    bound_db,
                });
            }
        }
        rows
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "step",
            "method",
            "mean_power_w",
            "mean_power_db",
            "stderr_db",
            "bound_db",
        ])?;
        for r in self.rows() {
            w.write_record([
                r.step.to_string(),
                r.method.to_string(),
                r.mean_power_w.to_string(),
                r.mean_power_db.to_string(),
                r.stderr_db.to_string(),
                r.bound_db.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub(super) fn codebooks(cfg: &ExperimentConfig) -> Result<Vec<(Method, Codebook, Codebook)>> {
    cfg.methods
        .iter()
        .map(|&m| Ok((m, generate(m, cfg.n_t)?, generate(m, cfg.n_r)?)))
        .collect()
}

/// Averages the stage-winner power of every method over the realizations at
/// the single SNR point of `cfg`, together with the exhaustive-search bound.
pub fn run_received_power(cfg: &ExperimentConfig) -> Result<PowerResult> {
    cfg.validate()?;
    let [snr_db] = cfg.snr_db[..] else {
        return Err(invalid(
            "received-power experiment takes exactly one SNR point",
        ));
    };
    let start = Instant::now();
    let pm = PowerModel::from_snr_db(cfg.power_mode, cfg.power_w, snr_db)?;
    let books = codebooks(cfg)?;
    let params = cfg.channel_params();

    let per_realization = (0..cfg.realizations as u64)
        .into_par_iter()
        .map(|r| -> Result<(f64, Vec<Vec<f64>>)> {
            let ch = sample_channel(&params, &mut params.rng_for(r))?;
            let bound = pm.power * exhaustive_search(&ch, &pm).gain;
            let traces = books
                .iter()
                .map(|(_, cb_t, cb_r)| {
                    let mut rng = substream(cfg.seed, r, Purpose::Noise);
                    let out = hierarchical_search(cb_t, cb_r, &ch, &pm, &mut rng)?;
                    Ok(out
                        .trace
                        .steps
                        .iter()
                        .map(|s| {
                            let m = s.winner_measurement();
                            match cfg.power_metric {
                                PowerMetric::Signal => m.signal_power,
                                PowerMetric::Measured => m.y_power,
                            }
                        })
                        .collect())
                })
                .collect::<Result<Vec<Vec<f64>>>>()?;
            Ok((bound, traces))
        })
        .collect::<Result<Vec<_>>>()?;

    let stages = per_realization[0].1[0].len();
    let curves = books
        .iter()
        .enumerate()
        .map(|(i, (method, _, _))| PowerCurve {
            method: *method,
            steps: (0..stages)
                .map(|s| Estimate::of(per_realization.iter().map(|(_, t)| t[i][s])))
                .collect(),
        })
        .collect();
    Ok(PowerResult {
        curves,
        bound: Estimate::of(per_realization.iter().map(|(b, _)| *b)),
        realizations: cfg.realizations,
        runtime: start.elapsed(),
    })
}
