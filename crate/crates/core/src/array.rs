//! Uniform-linear-array primitives in the cosine-angle domain.
//!
//! Angles are cosines of the physical angle, `Ω = cos θ ∈ [-1, 1]`. Every array
//! response is periodic in `Ω` with period 2, so coverage arithmetic wraps on
//! the half-open interval `[-1, 1)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Result};

/// Relative tolerance used when checking the constant-amplitude-or-zero constraint.
const AMPLITUDE_TOL: f64 = 1e-9;

/// `e^{jx}`.
#[inline]
pub(crate) fn cis(x: f64) -> Complex64 {
    Complex64::new(x.cos(), x.sin())
}

/// Antenna weight vector: every entry has modulus `0` or a common amplitude `ν`,
/// and the vector has unit power.
#[derive(Debug, Clone)]
pub struct Awv {
    weights: Vec<Complex64>,
    amplitude: f64,
}

impl Awv {
    /// Wraps weights that already satisfy the amplitude and unit-power constraints.
    pub fn new(weights: Vec<Complex64>) -> Result<Self> {
        let awv = Self::checked(weights)?;
        let power = awv.power();
        if (power - 1.0).abs() > AMPLITUDE_TOL * awv.len() as f64 {
            return Err(invalid(format!("AWV power is {power}, expected 1")));
        }
        Ok(awv)
    }

    /// Rescales constant-modulus-or-zero weights to unit power.
    pub fn normalized(weights: Vec<Complex64>) -> Result<Self> {
        let mut awv = Self::checked(weights)?;
        let scale = 1.0 / awv.power().sqrt();
        for w in &mut awv.weights {
            *w *= scale;
        }
        awv.amplitude *= scale;
        Ok(awv)
    }

    /// Builds a unit-power AWV from an activation pattern and per-element phases (radians).
    pub fn from_phases(active: &[bool], phases: &[f64]) -> Result<Self> {
        if active.len() != phases.len() {
            return Err(invalid("activation pattern and phases differ in length"));
        }
        let weights = active
            .iter()
            .zip(phases)
            .map(|(&on, &p)| if on { cis(p) } else { Complex64::new(0.0, 0.0) })
            .collect();
        Self::normalized(weights)
    }

    fn checked(mut weights: Vec<Complex64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(invalid("AWV must have at least one element"));
        }
        if weights
            .iter()
            .any(|w| !w.re.is_finite() || !w.im.is_finite())
        {
            return Err(invalid("AWV contains a non-finite weight"));
        }
        let peak = weights.iter().map(|w| w.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            return Err(invalid("AWV has no active element"));
        }
        for w in &mut weights {
            if w.norm() <= AMPLITUDE_TOL * peak {
                *w = Complex64::new(0.0, 0.0);
            } else if (w.norm() - peak).abs() > AMPLITUDE_TOL * peak {
                return Err(invalid(format!(
                    "AWV entry modulus {} differs from the common amplitude {peak}",
                    w.norm()
                )));
            }
        }
        Ok(Self {
            weights,
            amplitude: peak,
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    /// Common modulus `ν` of the active entries.
    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn active_count(&self) -> usize {
        self.weights.iter().filter(|w| w.norm_sqr() > 0.0).count()
    }

    pub fn is_active(&self, i: usize) -> bool {
        self.weights[i].norm_sqr() > 0.0
    }

    /// `‖w‖²`.
    pub fn power(&self) -> f64 {
        self.weights.iter().map(|w| w.norm_sqr()).sum()
    }

    /// `wᴴ v`.
    pub fn inner(&self, v: &[Complex64]) -> Complex64 {
        self.weights.iter().zip(v).map(|(w, x)| w.conj() * x).sum()
    }
}

impl PartialEq for Awv {
    fn eq(&self, other: &Self) -> bool {
        self.weights == other.weights
    }
}

/// Array response `a(N, Ω)`: entry `n` (0-based) is `e^{jπnΩ}/√N`.
pub fn steering_vector(n: usize, omega: f64) -> Result<Awv> {
    if n == 0 {
        return Err(invalid("steering vector needs at least one element"));
    }
    let scale = 1.0 / (n as f64).sqrt();
    let weights = (0..n).map(|i| cis(PI * i as f64 * omega) * scale).collect();
    Ok(Awv {
        weights,
        amplitude: scale,
    })
}

/// Beam gain `A(w, Ω) = Σ_n [w]_n e^{-jπ(n-1)Ω}`.
pub fn beam_gain(w: &Awv, omega: f64) -> Complex64 {
    beam_gain_of(w.weights(), omega)
}

/// Beam gain of raw weights; evaluated with Horner's rule on `z = e^{-jπΩ}`.
pub fn beam_gain_of(weights: &[Complex64], omega: f64) -> Complex64 {
    let z = cis(-PI * omega);
    weights
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &w| acc * z + w)
}

/// `|A(w, ω)|` at every grid point.
pub fn beam_pattern(w: &Awv, grid: &AngleGrid) -> Vec<f64> {
    grid.points()
        .iter()
        .map(|&o| beam_gain(w, o).norm())
        .collect()
}

/// Coverage factor of an `N`-element steering vector: the relative gain at
/// `±1/N` from the steering angle, `(1/N)|Σ_n e^{jπ(n-1)/N}|`.
///
/// Panics if `n == 0`.
pub fn coverage_factor_rho(n: usize) -> f64 {
    assert!(n > 0, "coverage factor needs at least one element");
    let nf = n as f64;
    let sum: Complex64 = (0..n).map(|i| cis(PI * i as f64 / nf)).sum();
    sum.norm() / nf
}

/// Rotates the coverage of `w` by `ψ`: `w ∘ √N a(N, ψ)`.
pub fn rotate(w: &Awv, psi: f64) -> Awv {
    let weights = w
        .weights
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            if x.norm_sqr() == 0.0 {
                x
            } else {
                x * cis(PI * i as f64 * psi)
            }
        })
        .collect();
    Awv {
        weights,
        amplitude: w.amplitude,
    }
}

/// Sub-array junction objective
/// `f(N_S, Δθ) = Σ_i e^{-jπ(i-1)/N_S} + e^{jΔθ} Σ_i e^{jπ(i-1)/N_S}`.
pub fn subarray_phase_objective(ns: usize, delta_theta: f64) -> Result<Complex64> {
    if ns == 0 || !ns.is_multiple_of(2) {
        return Err(invalid(format!(
            "sub-array size must be even and positive, got {ns}"
        )));
    }
    let nsf = ns as f64;
    let mut lower = Complex64::new(0.0, 0.0);
    let mut upper = Complex64::new(0.0, 0.0);
    for i in 0..ns {
        let phase = PI * i as f64 / nsf;
        lower += cis(-phase);
        upper += cis(phase);
    }
    Ok(lower + cis(delta_theta) * upper)
}

/// Phase step between adjacent sub-arrays that maximises `|f(N_S, Δθ)|`: `-π(N_S-1)/N_S`.
pub fn optimal_subarray_phase_step(ns: usize) -> f64 {
    -PI * (ns as f64 - 1.0) / ns as f64
}

/// Uniform sampling of `[-1, 1)`: point `i` is `-1 + 2i/P`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleGrid {
    points: Vec<f64>,
    step: f64,
}

impl AngleGrid {
    pub const DEFAULT_POINTS: usize = 4096;

    pub fn uniform(count: usize) -> Result<Self> {
        if count < 2 {
            return Err(invalid("angle grid needs at least two points"));
        }
        let step = 2.0 / count as f64;
        let points = (0..count).map(|i| -1.0 + step * i as f64).collect();
        Ok(Self { points, step })
    }

    /// Default grid for arrays of up to `n_max` elements: 4096 points, or more
    /// when needed to keep at least 8 samples per `2/N` beam width.
    pub fn for_array(n_max: usize) -> Self {
        let count = (8 * n_max).next_power_of_two().max(Self::DEFAULT_POINTS);
        Self::uniform(count).expect("count is at least 4096")
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Whether the grid oversamples a `2/n` beam width by at least 8.
    pub fn supports(&self, n: usize) -> bool {
        self.step <= 2.0 / (8.0 * n as f64) + 1e-15
    }

    /// Index of the grid point closest to `omega`, modulo the period-2 wraparound.
    pub fn nearest_index(&self, omega: f64) -> usize {
        let p = self.len() as i64;
        let i = ((omega + 1.0) / self.step).round() as i64;
        i.rem_euclid(p) as usize
    }
}

/// Closed interval `[lo, hi]` in cosine-angle units, with endpoints on grid points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Grid-sampled beam coverage `{Ω : |A(w,Ω)| > ρ max_ω |A(w,ω)|}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageSet {
    mask: Vec<bool>,
    intervals: Vec<Interval>,
    rho: f64,
    step: f64,
}

impl CoverageSet {
    fn from_mask(mask: Vec<bool>, rho: f64, grid: &AngleGrid) -> Self {
        let intervals = runs(&mask)
            .into_iter()
            .map(|(a, b)| Interval {
                lo: grid.points[a],
                hi: grid.points[b],
            })
            .collect();
        Self {
            mask,
            intervals,
            rho,
            step: grid.step,
        }
    }

    /// Sorted disjoint intervals. A region crossing the `±1` seam appears as
    /// two pieces, one starting at `-1` and one ending at the last grid point.
    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn covers_index(&self, i: usize) -> bool {
        self.mask[i]
    }

    pub fn covered_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&m| m)
    }

    /// Total covered width (grid points times step).
    pub fn measure(&self) -> f64 {
        self.covered_count() as f64 * self.step
    }

    /// Coverage translated by `psi` (rounded to the nearest grid step), wrapping mod 2.
    pub fn shifted(&self, psi: f64, grid: &AngleGrid) -> Self {
        let p = self.mask.len() as i64;
        let s = (psi / self.step).round() as i64;
        let mut mask = vec![false; self.mask.len()];
        for (i, &m) in self.mask.iter().enumerate() {
            if m {
                mask[(i as i64 + s).rem_euclid(p) as usize] = true;
            }
        }
        Self::from_mask(mask, self.rho, grid)
    }

    /// True when every covered point of either set lies within `steps` grid
    /// steps (circularly) of a covered point of the other.
    pub fn matches_within(&self, other: &Self, steps: usize) -> bool {
        self.mask.len() == other.mask.len()
            && near_subset(&self.mask, &other.mask, steps)
            && near_subset(&other.mask, &self.mask, steps)
    }
}

fn near_subset(a: &[bool], b: &[bool], steps: usize) -> bool {
    let p = a.len() as i64;
    let reach = steps as i64;
    a.iter()
        .enumerate()
        .filter(|(_, &m)| m)
        .all(|(i, _)| (-reach..=reach).any(|d| b[(i as i64 + d).rem_euclid(p) as usize]))
}

/// Maximal runs of `true` as inclusive index pairs, in ascending order.
pub(crate) fn runs(mask: &[bool]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, &m) in mask.iter().enumerate() {
        match (m, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                out.push((s, i - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, mask.len() - 1));
    }
    out
}

/// Beam coverage of `w` on `grid` with threshold factor `rho ∈ (0, 1)`.
pub fn beam_coverage(w: &Awv, rho: f64, grid: &AngleGrid) -> Result<CoverageSet> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(invalid(format!(
            "coverage factor must lie in (0, 1), got {rho}"
        )));
    }
    Ok(coverage_from_pattern(&beam_pattern(w, grid), rho, grid))
}

pub(crate) fn coverage_from_pattern(pattern: &[f64], rho: f64, grid: &AngleGrid) -> CoverageSet {
    let peak = pattern.iter().copied().fold(0.0, f64::max);
    let mask = pattern.iter().map(|&g| g > rho * peak).collect();
    CoverageSet::from_mask(mask, rho, grid)
}
