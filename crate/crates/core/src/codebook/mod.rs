//! Binary-tree hierarchical codebooks.
//!
//! Layer `k` (`k = 0..=K`, `K = log2 N`) holds `2^k` codewords whose nominal
//! coverage is `[-1 + (2n-2)/2^k, -1 + 2n/2^k]`. The last layer is the set of
//! `N` steering vectors sampled at `-1 + (2n-1)/N`; parents map to children
//! `{2n-1, 2n}`.
//!
//! Two constructions are provided:
//!
//! * [`Method::Deact`] widens beams by switching antennas off: codeword
//!   `(k, n)` is an `2^k`-element steering vector padded with zeros.
//! * [`Method::BmwSs`] splits the array into sub-arrays steered at adjacent
//!   directions, deactivating half of them on odd widening steps, so every
//!   codeword keeps either all or half of the antennas active.

mod io;
mod validate;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::array::{cis, rotate, steering_vector, Awv};
use crate::error::{invalid, Error, Result};

pub use io::{export_codebook, import_codebook, CODEBOOK_FORMAT_TAG};
pub use validate::{
    codebook_coverages, validate_criterion1, validate_criterion2, Criterion1Report,
    Criterion2Report, LayerCoverage, ParentContainment,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Deact,
    BmwSs,
}

impl Method {
    pub const ALL: [Method; 2] = [Method::BmwSs, Method::Deact];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Deact => "deact",
            Method::BmwSs => "bmw-ss",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "deact" => Ok(Method::Deact),
            "bmw-ss" | "bmwss" | "bmw_ss" => Ok(Method::BmwSs),
            other => Err(invalid(format!("unknown codebook method '{other}'"))),
        }
    }
}

/// Position of a codeword in the tree; `index` is 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CodewordId {
    pub layer: usize,
    pub index: usize,
}

impl CodewordId {
    pub const ROOT: CodewordId = CodewordId { layer: 0, index: 1 };

    pub fn new(layer: usize, index: usize) -> Self {
        Self { layer, index }
    }

    pub fn children(&self) -> [CodewordId; 2] {
        [
            CodewordId::new(self.layer + 1, 2 * self.index - 1),
            CodewordId::new(self.layer + 1, 2 * self.index),
        ]
    }

    /// Nominal coverage interval `[-1 + (2n-2)/2^k, -1 + 2n/2^k]`.
    pub fn nominal_coverage(&self) -> (f64, f64) {
        let width = 2.0 / (1u64 << self.layer) as f64;
        let lo = -1.0 + width * (self.index - 1) as f64;
        (lo, lo + width)
    }
}

impl fmt::Display for CodewordId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w({},{})", self.layer, self.index)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Codeword {
    id: CodewordId,
    awv: Awv,
    active_count: usize,
}

impl Codeword {
    pub fn new(id: CodewordId, awv: Awv) -> Result<Self> {
        if id.index == 0 || id.layer >= 64 || id.index as u64 > 1u64 << id.layer {
            return Err(invalid(format!("codeword index {id} out of range")));
        }
        let active_count = awv.active_count();
        Ok(Self {
            id,
            awv,
            active_count,
        })
    }

    pub fn id(&self) -> CodewordId {
        self.id
    }

    pub fn layer(&self) -> usize {
        self.id.layer
    }

    pub fn index(&self) -> usize {
        self.id.index
    }

    pub fn awv(&self) -> &Awv {
        &self.awv
    }

    pub fn weights(&self) -> &[Complex64] {
        self.awv.weights()
    }

    pub fn active_count(&self) -> usize {
        self.active_count
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    size: usize,
    method: Method,
    layers: Vec<Vec<Codeword>>,
}

/// `log2 n` for a power of two, otherwise an unsupported-size error.
pub fn tree_depth(n: usize) -> Result<usize> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::UnsupportedArraySize(n));
    }
    Ok(n.trailing_zeros() as usize)
}

/// Steering angle of last-layer codeword `index` (1-based): `-1 + (2n-1)/N`.
pub fn leaf_angle(size: usize, index: usize) -> f64 {
    -1.0 + (2 * index - 1) as f64 / size as f64
}

/// Last-layer codeword whose nominal interval contains `omega` (wrapping mod 2).
pub fn nearest_leaf(size: usize, omega: f64) -> usize {
    let u = (omega + 1.0).rem_euclid(2.0);
    let i = (u * size as f64 / 2.0).floor() as usize;
    i.min(size - 1) + 1
}

impl Codebook {
    /// Assembles a codebook from explicit layers.
    ///
    /// Layer `k` may hold at most `2^k` codewords with distinct indices; missing
    /// codewords are allowed so that damaged codebooks can be validated.
    pub fn from_parts(size: usize, method: Method, mut layers: Vec<Vec<Codeword>>) -> Result<Self> {
        let depth = tree_depth(size)?;
        if layers.len() != depth + 1 {
            return Err(invalid(format!(
                "size {size} needs {} layers, got {}",
                depth + 1,
                layers.len()
            )));
        }
        for (k, layer) in layers.iter_mut().enumerate() {
            layer.sort_by_key(|c| c.index());
            for (i, cw) in layer.iter().enumerate() {
                if cw.layer() != k {
                    return Err(invalid(format!("{} stored in layer {k}", cw.id())));
                }
                if cw.awv().len() != size {
                    return Err(invalid(format!(
                        "{} has {} weights, expected {size}",
                        cw.id(),
                        cw.awv().len()
                    )));
                }
                if i > 0 && layer[i - 1].index() == cw.index() {
                    return Err(invalid(format!("duplicate codeword {}", cw.id())));
                }
            }
        }
        Ok(Self {
            size,
            method,
            layers,
        })
    }

    /// Array size `N`.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn method(&self) -> Method {
        self.method
    }

    /// Index `K` of the last layer.
    pub fn depth(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn layers(&self) -> &[Vec<Codeword>] {
        &self.layers
    }

    pub fn layer(&self, k: usize) -> &[Codeword] {
        &self.layers[k]
    }

    pub fn get(&self, id: CodewordId) -> Option<&Codeword> {
        let layer = self.layers.get(id.layer)?;
        layer
            .binary_search_by_key(&id.index, |c| c.index())
            .ok()
            .map(|i| &layer[i])
    }

    /// Codeword `(k, n)`; panics if absent.
    pub fn codeword(&self, k: usize, n: usize) -> &Codeword {
        self.get(CodewordId::new(k, n))
            .unwrap_or_else(|| panic!("codeword w({k},{n}) not present"))
    }

    pub fn root(&self) -> &Codeword {
        self.codeword(0, 1)
    }

    pub fn leaves(&self) -> &[Codeword] {
        &self.layers[self.depth()]
    }

    pub fn codeword_count(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    /// Every layer holds all `2^k` codewords.
    pub fn is_complete(&self) -> bool {
        self.layers
            .iter()
            .enumerate()
            .all(|(k, l)| l.len() == 1 << k)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Codeword> {
        self.layers.iter().flatten()
    }
}

pub fn generate(method: Method, size: usize) -> Result<Codebook> {
    match method {
        Method::Deact => generate_deact(size),
        Method::BmwSs => generate_bmw_ss(size),
    }
}

fn steering_layer(size: usize) -> Result<Vec<Codeword>> {
    let depth = tree_depth(size)?;
    (1..=size)
        .map(|n| {
            Codeword::new(
                CodewordId::new(depth, n),
                steering_vector(size, leaf_angle(size, n))?,
            )
        })
        .collect()
}

/// Deactivation codebook: `w(k,n) = [a(2^k, -1 + (2n-1)/2^k)ᵀ, 0ᵀ]ᵀ`.
pub fn generate_deact(size: usize) -> Result<Codebook> {
    let depth = tree_depth(size)?;
    let mut layers = Vec::with_capacity(depth + 1);
    for k in 0..depth {
        let active = 1usize << k;
        let layer = (1..=active)
            .map(|n| {
                let head = steering_vector(active, leaf_angle(active, n))?;
                let mut weights = head.weights().to_vec();
                weights.resize(size, Complex64::new(0.0, 0.0));
                Codeword::new(CodewordId::new(k, n), Awv::new(weights)?)
            })
            .collect::<Result<Vec<_>>>()?;
        layers.push(layer);
    }
    layers.push(steering_layer(size)?);
    Codebook::from_parts(size, Method::Deact, layers)
}

/// Sub-array layout used for one widened BMW-SS layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubarrayPlan {
    /// Widening steps above the last layer, `ℓ = K - k`.
    pub widening: usize,
    /// Number of sub-arrays `M`.
    pub subarrays: usize,
    /// Elements per sub-array `N_S = N / M`.
    pub subarray_size: usize,
    /// Active sub-arrays `N_A`: `M/2` for odd `ℓ`, `M` for even `ℓ`.
    pub active_subarrays: usize,
}

impl SubarrayPlan {
    pub fn new(size: usize, layer: usize) -> Result<Self> {
        let depth = tree_depth(size)?;
        if layer >= depth {
            return Err(invalid(format!(
                "layer {layer} is not a widened layer for N = {size}"
            )));
        }
        let widening = depth - layer;
        let subarrays = 1usize << widening.div_ceil(2);
        let active_subarrays = if widening % 2 == 1 {
            subarrays / 2
        } else {
            subarrays
        };
        Ok(Self {
            widening,
            subarrays,
            subarray_size: size / subarrays,
            active_subarrays,
        })
    }

    pub fn active_elements(&self) -> usize {
        self.active_subarrays * self.subarray_size
    }
}

/// First codeword `w(k,1)` of a widened BMW-SS layer.
///
/// Sub-array `m` (1-based) is `e^{jθ_m} a(N_S, -1 + (2m-1)/N_S)` with
/// `θ_m = -mπ(N_S-1)/N_S` for `m ≤ N_A` and zero otherwise; the result is
/// scaled to unit power.
pub fn bmw_ss_first_codeword(size: usize, layer: usize) -> Result<Awv> {
    let plan = SubarrayPlan::new(size, layer)?;
    let ns = plan.subarray_size;
    let step = -std::f64::consts::PI * (ns as f64 - 1.0) / ns as f64;
    let mut weights = vec![Complex64::new(0.0, 0.0); size];
    for m in 1..=plan.active_subarrays {
        let coeff = cis(step * m as f64);
        let sub = steering_vector(ns, leaf_angle(ns, m))?;
        let offset = (m - 1) * ns;
        for (slot, &w) in weights[offset..offset + ns].iter_mut().zip(sub.weights()) {
            *slot = coeff * w;
        }
    }
    Awv::normalized(weights)
}

/// Joint sub-array and deactivation codebook.
pub fn generate_bmw_ss(size: usize) -> Result<Codebook> {
    let depth = tree_depth(size)?;
    if depth == 0 {
        return Err(invalid("BMW-SS needs at least two antennas"));
    }
    let mut layers = Vec::with_capacity(depth + 1);
    for k in 0..depth {
        let first = bmw_ss_first_codeword(size, k)?;
        let count = 1usize << k;
        let layer = (1..=count)
            .map(|n| {
                let awv = if n == 1 {
                    first.clone()
                } else {
                    rotate(&first, (2 * n - 2) as f64 / count as f64)
                };
                Codeword::new(CodewordId::new(k, n), awv)
            })
            .collect::<Result<Vec<_>>>()?;
        layers.push(layer);
    }
    layers.push(steering_layer(size)?);
    Codebook::from_parts(size, Method::BmwSs, layers)
}
