//! Measurement model, hierarchical binary-tree search and the exhaustive oracle.
//!
//! A measurement with transmit AWV `w_T` and receive AWV `w_R` is
//! `y = √P_eff w_Rᴴ H w_T + w_Rᴴ n` with `n ~ CN(0, N₀ I)`. Under the total
//! power model `P_eff = P_tot`; under the per-antenna model
//! `P_eff = P_per · N_Tact`, the number of active transmit antennas.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::array::{steering_vector, Awv};
use crate::channel::Channel;
use crate::codebook::{leaf_angle, nearest_leaf, Codebook, CodewordId};
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerMode {
    Total,
    PerAntenna,
}

impl PowerMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            PowerMode::Total => "total",
            PowerMode::PerAntenna => "per-antenna",
        }
    }
}

impl fmt::Display for PowerMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PowerMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "total" => Ok(PowerMode::Total),
            "per-antenna" | "per_antenna" | "perantenna" => Ok(PowerMode::PerAntenna),
            other => Err(invalid(format!("unknown power model '{other}'"))),
        }
    }
}

/// Signalling power and noise level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerModel {
    pub mode: PowerMode,
    /// `P_tot` or `P_per` in watts.
    pub power: f64,
    /// Noise power `N₀` per receive antenna in watts; zero gives noiseless measurements.
    pub noise: f64,
}

impl PowerModel {
    pub fn new(mode: PowerMode, power: f64, noise: f64) -> Result<Self> {
        if !(power > 0.0 && power.is_finite()) {
            return Err(invalid(format!(
                "transmit power must be positive, got {power}"
            )));
        }
        if !(noise >= 0.0 && noise.is_finite()) {
            return Err(invalid(format!(
                "noise power must be non-negative, got {noise}"
            )));
        }
        Ok(Self { mode, power, noise })
    }

    /// Noise level `N₀ = power · 10^{-snr_db/10}`, so that `power / N₀` is the SNR.
    pub fn from_snr_db(mode: PowerMode, power: f64, snr_db: f64) -> Result<Self> {
        Self::new(mode, power, power * 10f64.powf(-snr_db / 10.0))
    }

    /// Total power, unit transmit power, no noise.
    pub fn noiseless() -> Self {
        Self {
            mode: PowerMode::Total,
            power: 1.0,
            noise: 0.0,
        }
    }

    /// `P_eff` for a transmit AWV with `n_tact` active antennas.
    pub fn effective_power(&self, n_tact: usize) -> f64 {
        match self.mode {
            PowerMode::Total => self.power,
            PowerMode::PerAntenna => self.power * n_tact as f64,
        }
    }

    /// `G_tot = |w_Rᴴ H w_T|²`, or `G_per = N_Tact G_tot`.
    pub fn gain(&self, coupling: f64, n_tact: usize) -> f64 {
        match self.mode {
            PowerMode::Total => coupling,
            PowerMode::PerAntenna => n_tact as f64 * coupling,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement {
    /// Measured `|y|²` in watts.
    pub y_power: f64,
    /// `G_tot` or `G_per`, depending on the power model.
    pub noiseless_gain: f64,
    /// Noiseless received power `P_eff |w_Rᴴ H w_T|²` in watts.
    pub signal_power: f64,
}

/// `w_Rᴴ H w_T`.
pub fn coupling(w_t: &[Complex64], w_r: &[Complex64], h: &Array2<Complex64>) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (row, wr) in h.outer_iter().zip(w_r) {
        if wr.norm_sqr() == 0.0 {
            continue;
        }
        let mut hw = Complex64::new(0.0, 0.0);
        for (x, wt) in row.iter().zip(w_t) {
            hw += x * wt;
        }
        acc += wr.conj() * hw;
    }
    acc
}

pub fn measure<R: Rng + ?Sized>(
    w_t: &Awv,
    w_r: &Awv,
    ch: &Channel,
    pm: &PowerModel,
    rng: &mut R,
) -> Result<Measurement> {
    if w_t.len() != ch.n_t() || w_r.len() != ch.n_r() {
        return Err(invalid(format!(
            "AWV sizes ({}, {}) do not match a {}x{} channel",
            w_t.len(),
            w_r.len(),
            ch.n_r(),
            ch.n_t()
        )));
    }
    let n_tact = w_t.active_count();
    let z = coupling(w_t.weights(), w_r.weights(), ch.matrix());
    let p_eff = pm.effective_power(n_tact);
    let mut y = z * p_eff.sqrt();
    if pm.noise > 0.0 {
        let s = (pm.noise / 2.0).sqrt();
        for wr in w_r.weights() {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            y += wr.conj() * Complex64::new(re * s, im * s);
        }
    }
    Ok(Measurement {
        y_power: y.norm_sqr(),
        noiseless_gain: pm.gain(z.norm_sqr(), n_tact),
        signal_power: p_eff * z.norm_sqr(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Rx,
    Tx,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Rx => "rx",
            Side::Tx => "tx",
        })
    }
}

/// One stage: both children of the current node measured once.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchStep {
    /// 1-based stage number across both phases.
    pub stage: usize,
    pub side: Side,
    pub candidates: [CodewordId; 2],
    pub measurements: [Measurement; 2],
    pub winner: usize,
}

impl SearchStep {
    pub fn winner_id(&self) -> CodewordId {
        self.candidates[self.winner]
    }

    pub fn winner_measurement(&self) -> &Measurement {
        &self.measurements[self.winner]
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SearchTrace {
    pub steps: Vec<SearchStep>,
}

impl SearchTrace {
    pub fn stage_count(&self) -> usize {
        self.steps.len()
    }

    pub fn measurement_count(&self) -> usize {
        self.steps.iter().map(|s| s.candidates.len()).sum()
    }

    /// One CSV row per stage.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "stage",
            "side",
            "candidate_1",
            "candidate_2",
            "winner",
            "y_power",
            "noiseless_gain",
            "signal_power",
        ])?;
        for s in &self.steps {
            let m = s.winner_measurement();
            w.write_record([
                s.stage.to_string(),
                s.side.to_string(),
                s.candidates[0].to_string(),
                s.candidates[1].to_string(),
                s.winner_id().to_string(),
                format!("{:e}", m.y_power),
                format!("{:e}", m.noiseless_gain),
                format!("{:e}", m.signal_power),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    /// Last-layer index (1-based) of the chosen transmit codeword.
    pub tx_leaf: usize,
    pub rx_leaf: usize,
    pub trace: SearchTrace,
}

fn descend<R: Rng + ?Sized>(
    cb: &Codebook,
    side: Side,
    fixed: &Awv,
    ch: &Channel,
    pm: &PowerModel,
    rng: &mut R,
    trace: &mut SearchTrace,
) -> Result<usize> {
    let mut node = CodewordId::ROOT;
    for _ in 0..cb.depth() {
        let candidates = node.children();
        let mut measurements = [None, None];
        for (slot, id) in measurements.iter_mut().zip(&candidates) {
            let probe = cb
                .get(*id)
                .ok_or_else(|| invalid(format!("codebook lacks {id}")))?
                .awv();
            let (w_t, w_r) = match side {
                Side::Rx => (fixed, probe),
                Side::Tx => (probe, fixed),
            };
            *slot = Some(measure(w_t, w_r, ch, pm, rng)?);
        }
        let measurements = measurements.map(Option::unwrap);
        let winner = usize::from(measurements[1].y_power > measurements[0].y_power);
        node = candidates[winner];
        trace.steps.push(SearchStep {
            stage: trace.steps.len() + 1,
            side,
            candidates,
            measurements,
            winner,
        });
    }
    Ok(node.index)
}

/// Receive-side descent with the transmitter on its root codeword, then
/// transmit-side descent with the receiver on the chosen leaf.
pub fn hierarchical_search<R: Rng + ?Sized>(
    cb_t: &Codebook,
    cb_r: &Codebook,
    ch: &Channel,
    pm: &PowerModel,
    rng: &mut R,
) -> Result<SearchOutcome> {
    if cb_t.size() != ch.n_t() || cb_r.size() != ch.n_r() {
        return Err(invalid(format!(
            "codebook sizes ({}, {}) do not match a {}x{} channel",
            cb_t.size(),
            cb_r.size(),
            ch.n_r(),
            ch.n_t()
        )));
    }
    let mut trace = SearchTrace::default();
    let rx_leaf = descend(cb_r, Side::Rx, cb_t.root().awv(), ch, pm, rng, &mut trace)?;
    let w_r = cb_r.codeword(cb_r.depth(), rx_leaf).awv().clone();
    let tx_leaf = descend(cb_t, Side::Tx, &w_r, ch, pm, rng, &mut trace)?;
    Ok(SearchOutcome {
        tx_leaf,
        rx_leaf,
        trace,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExhaustiveResult {
    pub tx_leaf: usize,
    pub rx_leaf: usize,
    /// Noiseless gain of the best pair under the power model.
    pub gain: f64,
}

fn steering_columns(n: usize) -> Array2<Complex64> {
    let mut a = Array2::zeros((n, n));
    for j in 0..n {
        let v = steering_vector(n, leaf_angle(n, j + 1)).expect("n > 0");
        for (i, w) in v.weights().iter().enumerate() {
            a[[i, j]] = *w;
        }
    }
    a
}

/// `|w_Rᴴ H w_T|²` for every pair of last-layer steering vectors, indexed `[rx, tx]`.
pub fn leaf_coupling_matrix(ch: &Channel) -> Array2<f64> {
    let a_t = steering_columns(ch.n_t());
    let a_r = steering_columns(ch.n_r());
    let hr = a_r.t().mapv(|x| x.conj()).dot(ch.matrix()).dot(&a_t);
    hr.mapv(|x| x.norm_sqr())
}

/// Best leaf pair by noiseless gain; ties go to the smallest `(n_T, n_R)`.
pub fn exhaustive_search(ch: &Channel, pm: &PowerModel) -> ExhaustiveResult {
    let g = leaf_coupling_matrix(ch);
    let mut best = ExhaustiveResult {
        tx_leaf: 1,
        rx_leaf: 1,
        gain: f64::NEG_INFINITY,
    };
    for t in 0..ch.n_t() {
        for r in 0..ch.n_r() {
            if g[[r, t]] > best.gain {
                best = ExhaustiveResult {
                    tx_leaf: t + 1,
                    rx_leaf: r + 1,
                    gain: g[[r, t]],
                };
            }
        }
    }
    best.gain = pm.gain(best.gain, ch.n_t());
    best
}

/// Success rules for a found leaf pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Policy {
    /// The pair equals the exhaustive-search pair.
    MatchExhaustive,
    /// The pair equals the nearest leaf pair of some path.
    AlignAnyMpc,
    /// The pair equals the nearest leaf pair of the strongest path.
    AlignStrongest,
}

impl Policy {
    pub const ALL: [Policy; 3] = [
        Policy::MatchExhaustive,
        Policy::AlignAnyMpc,
        Policy::AlignStrongest,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Policy::MatchExhaustive => "match-exhaustive",
            Policy::AlignAnyMpc => "align-any-mpc",
            Policy::AlignStrongest => "align-strongest",
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        Policy::ALL
            .into_iter()
            .find(|p| p.as_str() == key)
            .ok_or_else(|| invalid(format!("unknown adjudication policy '{s}'")))
    }
}

/// Per-channel reference pairs, computed once and reused across searches.
#[derive(Debug, Clone)]
pub struct Adjudicator {
    exhaustive: (usize, usize),
    /// `(tx_leaf, rx_leaf)` nearest to each path.
    mpc_pairs: Vec<(usize, usize)>,
    strongest: Option<(usize, usize)>,
}

impl Adjudicator {
    pub fn new(ch: &Channel) -> Self {
        let ex = exhaustive_search(ch, &PowerModel::noiseless());
        Self::with_exhaustive(ch, &ex)
    }

    pub fn with_exhaustive(ch: &Channel, ex: &ExhaustiveResult) -> Self {
        let pair = |m: &crate::channel::Mpc| {
            (
                nearest_leaf(ch.n_t(), m.psi),
                nearest_leaf(ch.n_r(), m.omega),
            )
        };
        Self {
            exhaustive: (ex.tx_leaf, ex.rx_leaf),
            mpc_pairs: ch.mpcs().iter().map(pair).collect(),
            strongest: ch.strongest_mpc().map(pair),
        }
    }

    pub fn success(&self, outcome: &SearchOutcome, policy: Policy) -> bool {
        let found = (outcome.tx_leaf, outcome.rx_leaf);
        match policy {
            Policy::MatchExhaustive => found == self.exhaustive,
            Policy::AlignAnyMpc => self.mpc_pairs.contains(&found),
            Policy::AlignStrongest => self.strongest == Some(found),
        }
    }
}

pub fn adjudicate(outcome: &SearchOutcome, ch: &Channel, policy: Policy) -> bool {
    Adjudicator::new(ch).success(outcome, policy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::beam_gain;
    use crate::channel::{sample_channel, ChannelKind, ChannelParams, Mpc};
    use crate::codebook::{generate, generate_bmw_ss, generate_deact, Method};
    use crate::rng::{substream, Purpose};

    fn params(n: usize, paths: usize, kind: ChannelKind) -> ChannelParams {
        ChannelParams {
            n_t: n,
            n_r: n,
            paths,
            kind,
            eta_db: 15.0,
            seed: 3,
        }
    }

    fn on_grid(n: usize, rx: usize, tx: usize) -> Channel {
        let m = Mpc {
            lambda: Complex64::new(0.8, -0.6),
            omega: leaf_angle(n, rx),
            psi: leaf_angle(n, tx),
        };
        Channel::from_mpcs(n, n, vec![m]).unwrap()
    }

    #[test]
    fn noiseless_measurement_is_coupling() {
        let p = params(8, 3, ChannelKind::Nlos);
        let ch = sample_channel(&p, &mut p.rng_for(0)).unwrap();
        let cb = generate_bmw_ss(8).unwrap();
        let (wt, wr) = (cb.codeword(1, 2).awv(), cb.codeword(2, 3).awv());
        let m = measure(wt, wr, &ch, &PowerModel::noiseless(), &mut p.rng_for(1)).unwrap();
        let z = coupling(wt.weights(), wr.weights(), ch.matrix());
        assert_eq!(m.y_power, z.norm_sqr());
        assert_eq!(m.noiseless_gain, z.norm_sqr());
    }

    #[test]
    fn coupling_equals_path_sum_of_beam_gains() {
        // w_Rᴴ H w_T = Σ λ conj(A(w_R, Ω)) A(w_T, ψ).
        let p = params(16, 4, ChannelKind::Los);
        let ch = sample_channel(&p, &mut p.rng_for(4)).unwrap();
        let cb = generate_deact(16).unwrap();
        let (wt, wr) = (cb.codeword(3, 5).awv(), cb.codeword(2, 1).awv());
        let want: Complex64 = ch
            .mpcs()
            .iter()
            .map(|m| m.lambda * beam_gain(wr, m.omega).conj() * beam_gain(wt, m.psi))
            .sum();
        let got = coupling(wt.weights(), wr.weights(), ch.matrix());
        assert!((got - want).norm() < 1e-10, "{got} vs {want}");
    }

    #[test]
    fn per_antenna_gain_scales_with_active_transmitters() {
        let p = params(16, 2, ChannelKind::Nlos);
        let ch = sample_channel(&p, &mut p.rng_for(2)).unwrap();
        let cb = generate_bmw_ss(16).unwrap();
        let pm = PowerModel::new(PowerMode::PerAntenna, 1.0, 0.0).unwrap();
        for k in 0..=4 {
            let wt = cb.codeword(k, 1).awv();
            let wr = cb.leaves()[3].awv();
            let m = measure(wt, wr, &ch, &pm, &mut p.rng_for(0)).unwrap();
            let base = coupling(wt.weights(), wr.weights(), ch.matrix()).norm_sqr();
            assert_eq!(m.noiseless_gain, wt.active_count() as f64 * base);
            assert!((m.y_power - m.noiseless_gain).abs() <= 1e-12 * m.y_power.max(1.0));
        }
    }

    #[test]
    fn noise_only_power_averages_to_n0() {
        let ch = Channel::zero(8, 8);
        let cb = generate_bmw_ss(8).unwrap();
        let pm = PowerModel::new(PowerMode::Total, 1.0, 0.25).unwrap();
        let mut rng = substream(1, 0, Purpose::Noise);
        let draws = 100_000;
        let mean = (0..draws)
            .map(|_| {
                measure(cb.root().awv(), cb.codeword(1, 1).awv(), &ch, &pm, &mut rng)
                    .unwrap()
                    .y_power
            })
            .sum::<f64>()
            / draws as f64;
        // |y|² is exponential with mean N₀, so the standard error is N₀/√draws.
        assert!(
            (mean - 0.25).abs() < 4.0 * 0.25 / (draws as f64).sqrt(),
            "{mean}"
        );
    }

    #[test]
    fn measurement_rejects_size_mismatch() {
        let ch = Channel::zero(8, 4);
        let cb = generate_deact(8).unwrap();
        let w = cb.root().awv();
        assert!(measure(
            w,
            w,
            &ch,
            &PowerModel::noiseless(),
            &mut substream(0, 0, Purpose::Noise)
        )
        .is_err());
        assert!(PowerModel::new(PowerMode::Total, 0.0, 1.0).is_err());
        assert!(PowerModel::new(PowerMode::Total, 1.0, -1.0).is_err());
    }

    #[test]
    fn exhaustive_matches_double_loop() {
        let n = 16;
        for r in 0..5 {
            let p = params(n, 4, ChannelKind::Nlos);
            let ch = sample_channel(&p, &mut p.rng_for(r)).unwrap();
            let mut best = (0.0, 0, 0);
            for t in 1..=n {
                let wt = steering_vector(n, leaf_angle(n, t)).unwrap();
                for rx in 1..=n {
                    let wr = steering_vector(n, leaf_angle(n, rx)).unwrap();
                    let mut z = Complex64::new(0.0, 0.0);
                    for i in 0..n {
                        for j in 0..n {
                            z += wr.weights()[i].conj() * ch.matrix()[[i, j]] * wt.weights()[j];
                        }
                    }
                    if z.norm_sqr() > best.0 {
                        best = (z.norm_sqr(), t, rx);
                    }
                }
            }
            let ex = exhaustive_search(&ch, &PowerModel::noiseless());
            assert_eq!((ex.tx_leaf, ex.rx_leaf), (best.1, best.2));
            assert!((ex.gain - best.0).abs() < 1e-9 * best.0);
        }
    }

    #[test]
    fn exhaustive_finds_on_grid_path() {
        let ch = on_grid(8, 6, 2);
        let ex = exhaustive_search(&ch, &PowerModel::noiseless());
        assert_eq!((ex.tx_leaf, ex.rx_leaf), (2, 6));
        assert!((ex.gain - 64.0).abs() < 1e-9);
        let zero = exhaustive_search(&Channel::zero(4, 4), &PowerModel::noiseless());
        assert_eq!((zero.tx_leaf, zero.rx_leaf, zero.gain), (1, 1, 0.0));
    }

    #[test]
    fn trace_length_is_twice_the_depths() {
        let p = ChannelParams {
            n_t: 64,
            n_r: 16,
            ..params(64, 3, ChannelKind::Los)
        };
        let ch = sample_channel(&p, &mut p.rng_for(0)).unwrap();
        let pm = PowerModel::from_snr_db(PowerMode::Total, 1.0, 10.0).unwrap();
        for m in Method::ALL {
            let out = hierarchical_search(
                &generate(m, 64).unwrap(),
                &generate(m, 16).unwrap(),
                &ch,
                &pm,
                &mut substream(0, 0, Purpose::Noise),
            )
            .unwrap();
            assert_eq!(out.trace.stage_count(), 10);
            assert_eq!(out.trace.measurement_count(), 20);
            let sides: Vec<Side> = out.trace.steps.iter().map(|s| s.side).collect();
            assert!(sides[..4].iter().all(|&s| s == Side::Rx));
            assert!(sides[4..].iter().all(|&s| s == Side::Tx));
        }
    }

    #[test]
    fn zero_channel_still_runs_full_search() {
        let cb = generate_bmw_ss(64).unwrap();
        let pm = PowerModel::from_snr_db(PowerMode::Total, 1.0, 0.0).unwrap();
        let out = hierarchical_search(
            &cb,
            &cb,
            &Channel::zero(64, 64),
            &pm,
            &mut substream(5, 0, Purpose::Noise),
        )
        .unwrap();
        assert_eq!(out.trace.measurement_count(), 24);
        assert!((1..=64).contains(&out.tx_leaf) && (1..=64).contains(&out.rx_leaf));
    }

    #[test]
    fn noiseless_single_path_search_is_exact() {
        for m in Method::ALL {
            let cb = generate(m, 32).unwrap();
            let p = params(32, 1, ChannelKind::Nlos);
            for r in 0..200 {
                let ch = sample_channel(&p, &mut p.rng_for(r)).unwrap();
                let out =
                    hierarchical_search(&cb, &cb, &ch, &PowerModel::noiseless(), &mut p.rng_for(r))
                        .unwrap();
                let ex = exhaustive_search(&ch, &PowerModel::noiseless());
                assert_eq!(
                    (out.tx_leaf, out.rx_leaf),
                    (ex.tx_leaf, ex.rx_leaf),
                    "{m} realization {r}"
                );
            }
        }
    }

    #[test]
    fn policies_on_grid_single_path() {
        let ch = on_grid(16, 3, 14);
        let cb = generate_deact(16).unwrap();
        let out = hierarchical_search(
            &cb,
            &cb,
            &ch,
            &PowerModel::noiseless(),
            &mut substream(0, 0, Purpose::Noise),
        )
        .unwrap();
        assert_eq!((out.tx_leaf, out.rx_leaf), (14, 3));
        for policy in Policy::ALL {
            assert!(adjudicate(&out, &ch, policy), "{policy}");
        }
        let wrong = SearchOutcome { tx_leaf: 13, ..out };
        for policy in Policy::ALL {
            assert!(!adjudicate(&wrong, &ch, policy), "{policy}");
        }
    }

    #[test]
    fn strongest_and_any_agree_for_one_path() {
        let p = params(16, 1, ChannelKind::Nlos);
        let cb = generate_bmw_ss(16).unwrap();
        let pm = PowerModel::from_snr_db(PowerMode::Total, 1.0, 0.0).unwrap();
        for r in 0..100 {
            let ch = sample_channel(&p, &mut p.rng_for(r)).unwrap();
            let out = hierarchical_search(&cb, &cb, &ch, &pm, &mut substream(3, r, Purpose::Noise))
                .unwrap();
            let adj = Adjudicator::new(&ch);
            assert_eq!(
                adj.success(&out, Policy::AlignAnyMpc),
                adj.success(&out, Policy::AlignStrongest)
            );
        }
    }

    #[test]
    fn policy_names_round_trip() {
        for p in Policy::ALL {
            assert_eq!(p.as_str().parse::<Policy>().unwrap(), p);
        }
        assert_eq!(
            "ALIGN_STRONGEST".parse::<Policy>().unwrap(),
            Policy::AlignStrongest
        );
        assert!("best".parse::<Policy>().is_err());
        assert_eq!(
            "per-antenna".parse::<PowerMode>().unwrap(),
            PowerMode::PerAntenna
        );
    }

    #[test]
    fn trace_csv_has_one_row_per_stage() {
        let ch = on_grid(8, 1, 8);
        let cb = generate_deact(8).unwrap();
        let out = hierarchical_search(
            &cb,
            &cb,
            &ch,
            &PowerModel::noiseless(),
            &mut substream(0, 0, Purpose::Noise),
        )
        .unwrap();
        let mut buf = Vec::new();
        out.trace.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 7);
        assert!(lines[0].starts_with("stage,side,candidate_1"));
        assert!(lines[1].starts_with("1,rx,\"w(1,1)\""));
    }
}
