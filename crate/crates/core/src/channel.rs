//! Sparse multipath channels `H = √(N_T N_R) Σ_ℓ λ_ℓ a(N_R, Ω_ℓ) a(N_T, ψ_ℓ)ᴴ`.
//!
//! Physical angles are uniform on `[0, 2π)`, so the cosine angles `Ω_ℓ` and
//! `ψ_ℓ` follow the arcsine density on `[-1, 1]`. Expected total path power is 1.

use std::f64::consts::PI;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::array::cis;
use crate::error::{invalid, Error, Result};
use crate::rng::{substream, Purpose};
use crate::search::{exhaustive_search, PowerModel};

/// One multipath component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mpc {
    pub lambda: Complex64,
    /// Cosine angle on the receive side, the argument of `a(N_R, ·)`.
    pub omega: f64,
    /// Cosine angle on the transmit side, the argument of `a(N_T, ·)`.
    pub psi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKind {
    Los,
    Nlos,
}

impl ChannelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ChannelKind::Los => "los",
            ChannelKind::Nlos => "nlos",
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ChannelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "los" => Ok(ChannelKind::Los),
            "nlos" => Ok(ChannelKind::Nlos),
            other => Err(invalid(format!("unknown channel kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelParams {
    pub n_t: usize,
    pub n_r: usize,
    /// Number of paths `L`.
    pub paths: usize,
    pub kind: ChannelKind,
    /// LOS-to-NLOS path power gap in dB; ignored for NLOS.
    pub eta_db: f64,
    pub seed: u64,
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        if self.paths == 0 {
            return Err(invalid("channel needs at least one path"));
        }
        if self.n_t == 0 || self.n_r == 0 {
            return Err(invalid("array sizes must be positive"));
        }
        if self.kind == ChannelKind::Los && !self.eta_db.is_finite() {
            return Err(invalid("LOS power gap must be finite"));
        }
        Ok(())
    }

    /// Channel stream of realization `r`.
    pub fn rng_for(&self, realization: u64) -> ChaCha8Rng {
        substream(self.seed, realization, Purpose::Channel)
    }

    /// `E|λ_ℓ|²` for each path; sums to 1.
    pub fn path_powers(&self) -> Vec<f64> {
        let l = self.paths as f64;
        match self.kind {
            ChannelKind::Nlos => vec![1.0 / l; self.paths],
            ChannelKind::Los => {
                let g = 10f64.powf(self.eta_db / 10.0);
                let total = g + l - 1.0;
                let mut p = vec![1.0 / total; self.paths];
                p[0] = g / total;
                p
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    mpcs: Vec<Mpc>,
    matrix: Array2<Complex64>,
}

impl Channel {
    /// Assembles `H` (`N_R × N_T`) from its paths.
    pub fn from_mpcs(n_t: usize, n_r: usize, mpcs: Vec<Mpc>) -> Result<Self> {
        if n_t == 0 || n_r == 0 {
            return Err(invalid("array sizes must be positive"));
        }
        if let Some(m) = mpcs
            .iter()
            .find(|m| m.omega.abs() > 1.0 || m.psi.abs() > 1.0)
        {
            return Err(invalid(format!(
                "path angles must lie in [-1, 1], got {m:?}"
            )));
        }
        let mut matrix = Array2::<Complex64>::zeros((n_r, n_t));
        for m in &mpcs {
            let rx: Vec<Complex64> = (0..n_r).map(|r| cis(PI * r as f64 * m.omega)).collect();
            let tx: Vec<Complex64> = (0..n_t).map(|t| cis(-PI * t as f64 * m.psi)).collect();
            for ((r, t), h) in matrix.indexed_iter_mut() {
                *h += m.lambda * rx[r] * tx[t];
            }
        }
        Ok(Self { mpcs, matrix })
    }

    /// A channel with no paths and `H = 0`.
    pub fn zero(n_t: usize, n_r: usize) -> Self {
        Self {
            mpcs: Vec::new(),
            matrix: Array2::zeros((n_r, n_t)),
        }
    }

    pub fn mpcs(&self) -> &[Mpc] {
        &self.mpcs
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.matrix
    }

    pub fn n_t(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn n_r(&self) -> usize {
        self.matrix.nrows()
    }

    /// Path with the largest `|λ|` (first on ties).
    pub fn strongest_mpc(&self) -> Option<&Mpc> {
        self.mpcs.iter().reduce(|a, b| {
            if b.lambda.norm() > a.lambda.norm() {
                b
            } else {
                a
            }
        })
    }
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * s, im * s)
}

/// Cosine of a physical angle drawn uniformly from `[0, 2π)`.
fn cosine_angle<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    (2.0 * PI * rng.random::<f64>()).cos()
}

pub fn sample_channel<R: Rng + ?Sized>(p: &ChannelParams, rng: &mut R) -> Result<Channel> {
    p.validate()?;
    let powers = p.path_powers();
    let mpcs = powers
        .iter()
        .enumerate()
        .map(|(i, &power)| {
            let omega = cosine_angle(rng);
            let psi = cosine_angle(rng);
            let lambda = if i == 0 && p.kind == ChannelKind::Los {
                Complex64::new(power.sqrt(), 0.0)
            } else {
                complex_gaussian(rng, power)
            };
            Mpc { lambda, omega, psi }
        })
        .collect();
    Channel::from_mpcs(p.n_t, p.n_r, mpcs)
}

/// Largest `|w_Rᴴ H w_T|²` over all pairs of last-layer steering vectors.
pub fn best_pair_gain(ch: &Channel) -> f64 {
    exhaustive_search(ch, &PowerModel::noiseless()).gain
}

pub const CHANNEL_FORMAT_TAG: &str = "beamtrain-channel 1";

/// Writes the paths of `ch`: a tag line, `n_t`, `n_r` and `paths` headers,
/// then one `mpc re im omega psi` record per path with 17 significant digits.
pub fn export_channel<W: Write>(ch: &Channel, mut out: W) -> Result<()> {
    writeln!(out, "{CHANNEL_FORMAT_TAG}")?;
    writeln!(out, "n_t {}", ch.n_t())?;
    writeln!(out, "n_r {}", ch.n_r())?;
    writeln!(out, "paths {}", ch.mpcs.len())?;
    for m in &ch.mpcs {
        writeln!(
            out,
            "mpc {:.16e} {:.16e} {:.16e} {:.16e}",
            m.lambda.re, m.lambda.im, m.omega, m.psi
        )?;
    }
    out.flush()?;
    Ok(())
}

pub fn import_channel<R: BufRead>(input: R) -> Result<Channel> {
    let err = |line: usize, msg: &str| Error::Parse {
        what: "channel",
        line,
        msg: msg.to_string(),
    };
    let mut lines = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if !t.is_empty() && !t.starts_with('#') {
            lines.push((i + 1, t.to_string()));
        }
    }
    let mut it = lines.into_iter();
    match it.next() {
        Some((_, tag)) if tag == CHANNEL_FORMAT_TAG => {}
        Some((no, _)) => return Err(err(no, "not a channel file")),
        None => return Err(err(0, "empty file")),
    }
    let mut header = |key: &str| -> Result<usize> {
        let (no, text) = it.next().ok_or_else(|| err(0, "truncated header"))?;
        match text.split_once(' ') {
            Some((k, v)) if k == key => v.trim().parse().map_err(|_| err(no, "bad header value")),
            _ => Err(err(no, "unexpected header")),
        }
    };
    let n_t = header("n_t")?;
    let n_r = header("n_r")?;
    let paths = header("paths")?;
    let mut mpcs = Vec::with_capacity(paths);
    for (no, text) in it {
        let mut toks = text.split_ascii_whitespace();
        if toks.next() != Some("mpc") {
            return Err(err(no, "expected an mpc record"));
        }
        let vals: Vec<f64> = toks
            .map(|t| t.parse().map_err(|_| err(no, "bad number")))
            .collect::<Result<_>>()?;
        if vals.len() != 4 {
            return Err(err(no, "mpc record needs 4 numbers"));
        }
        mpcs.push(Mpc {
            lambda: Complex64::new(vals[0], vals[1]),
            omega: vals[2],
            psi: vals[3],
        });
    }
    if mpcs.len() != paths {
        return Err(err(0, "path count does not match header"));
    }
    Channel::from_mpcs(n_t, n_r, mpcs)
}
