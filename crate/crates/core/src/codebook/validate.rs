//! Grid checks of full-layer coverage (Criterion 1) and parent-in-children
//! containment (Criterion 2).

use std::collections::HashMap;

use rayon::prelude::*;

use super::{Codebook, CodewordId};
use crate::array::{beam_coverage, runs, AngleGrid, CoverageSet, Interval};
use crate::error::Result;

/// Coverage of every codeword present in `cb`.
pub fn codebook_coverages(
    cb: &Codebook,
    rho: f64,
    grid: &AngleGrid,
) -> Result<HashMap<CodewordId, CoverageSet>> {
    let all: Vec<_> = cb.iter().collect();
    all.par_iter()
        .map(|cw| Ok((cw.id(), beam_coverage(cw.awv(), rho, grid)?)))
        .collect()
}

fn intervals_of(mask: &[bool], grid: &AngleGrid) -> Vec<Interval> {
    runs(mask)
        .into_iter()
        .map(|(a, b)| Interval {
            lo: grid.points()[a],
            hi: grid.points()[b],
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct LayerCoverage {
    pub layer: usize,
    /// Grid points outside every codeword's coverage.
    pub uncovered: Vec<f64>,
    /// Uncovered points merged into intervals.
    pub gaps: Vec<Interval>,
}

impl LayerCoverage {
    pub fn passed(&self) -> bool {
        self.uncovered.is_empty()
    }

    pub fn widest_gap(&self) -> f64 {
        self.gaps.iter().map(Interval::width).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone)]
pub struct Criterion1Report {
    pub rho: f64,
    pub layers: Vec<LayerCoverage>,
}

impl Criterion1Report {
    pub fn passed(&self) -> bool {
        self.layers.iter().all(LayerCoverage::passed)
    }
}

#[derive(Debug, Clone)]
pub struct ParentContainment {
    pub parent: CodewordId,
    pub children: [CodewordId; 2],
    /// Children absent from the codebook (treated as covering nothing).
    pub missing_children: Vec<CodewordId>,
    /// Grid points covered by the parent but by neither child.
    pub violations: Vec<f64>,
}

impl ParentContainment {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct Criterion2Report {
    pub rho: f64,
    pub parents: Vec<ParentContainment>,
}

impl Criterion2Report {
    pub fn passed(&self) -> bool {
        self.parents.iter().all(ParentContainment::passed)
    }

    /// Pass flag per parent layer `k = 0..K-1`.
    pub fn layer_results(&self) -> Vec<(usize, bool)> {
        let mut out: Vec<(usize, bool)> = Vec::new();
        for p in &self.parents {
            match out.last_mut() {
                Some((k, ok)) if *k == p.parent.layer => *ok &= p.passed(),
                _ => out.push((p.parent.layer, p.passed())),
            }
        }
        out
    }

    pub fn violation_count(&self) -> usize {
        self.parents.iter().map(|p| p.violations.len()).sum()
    }
}

/// Checks that each layer's codewords jointly cover every grid point.
pub fn validate_criterion1(cb: &Codebook, rho: f64, grid: &AngleGrid) -> Result<Criterion1Report> {
    let coverages = codebook_coverages(cb, rho, grid)?;
    let layers = cb
        .layers()
        .iter()
        .enumerate()
        .map(|(k, layer)| {
            let mut union = vec![false; grid.len()];
            for cw in layer {
                for (u, &m) in union.iter_mut().zip(coverages[&cw.id()].mask()) {
                    *u |= m;
                }
            }
            let missing: Vec<bool> = union.iter().map(|&u| !u).collect();
            let uncovered = grid
                .points()
                .iter()
                .zip(&missing)
                .filter(|(_, &m)| m)
                .map(|(&p, _)| p)
                .collect();
            LayerCoverage {
                layer: k,
                uncovered,
                gaps: intervals_of(&missing, grid),
            }
        })
        .collect();
    Ok(Criterion1Report { rho, layers })
}

/// Checks `CV(w(k,n)) ⊆ CV(w(k+1,2n-1)) ∪ CV(w(k+1,2n))` for every parent.
pub fn validate_criterion2(cb: &Codebook, rho: f64, grid: &AngleGrid) -> Result<Criterion2Report> {
    let coverages = codebook_coverages(cb, rho, grid)?;
    let mut parents = Vec::new();
    for layer in &cb.layers()[..cb.depth()] {
        for cw in layer {
            let parent = cw.id();
            let children = parent.children();
            let missing_children: Vec<_> = children
                .iter()
                .copied()
                .filter(|c| !coverages.contains_key(c))
                .collect();
            let child_masks: Vec<&[bool]> = children
                .iter()
                .filter_map(|c| coverages.get(c).map(CoverageSet::mask))
                .collect();
            let violations = coverages[&parent]
                .mask()
                .iter()
                .enumerate()
                .filter(|&(i, &m)| m && !child_masks.iter().any(|c| c[i]))
                .map(|(i, _)| grid.points()[i])
                .collect();
            parents.push(ParentContainment {
                parent,
                children,
                missing_children,
                violations,
            });
        }
    }
    Ok(Criterion2Report { rho, parents })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::coverage_factor_rho;
    use crate::codebook::{generate_bmw_ss, generate_deact, leaf_angle, Codeword, Method};

    fn grid() -> AngleGrid {
        AngleGrid::uniform(4096).unwrap()
    }

    #[test]
    fn deact_layers_cover_the_angle_domain() {
        let report = validate_criterion1(&generate_deact(64).unwrap(), 0.5, &grid()).unwrap();
        assert_eq!(report.layers.len(), 7);
        assert!(report.passed());
    }

    #[test]
    fn deleted_leaf_leaves_a_gap() {
        let n = 32;
        let cb = generate_deact(n).unwrap();
        let mut layers = cb.layers().to_vec();
        let removed = 10;
        layers[5].retain(|c| c.index() != removed);
        let damaged = Codebook::from_parts(n, Method::Deact, layers).unwrap();

        let g = grid();
        // Just below ρ(N) so that intact neighbours meet exactly at their edges.
        let rho = coverage_factor_rho(n) * (1.0 - 1e-9);
        let report = validate_criterion1(&damaged, rho, &g).unwrap();
        assert!(!report.passed());
        let last = &report.layers[5];
        assert_eq!(last.gaps.len(), 1);
        let gap = last.gaps[0];
        let width = gap.width() + g.step();
        assert!(
            (width - 2.0 / n as f64).abs() <= 3.0 * g.step(),
            "gap {gap:?}"
        );
        let centre = 0.5 * (gap.lo + gap.hi);
        assert!((centre - leaf_angle(n, removed)).abs() <= g.step());
        assert!(report.layers[..5].iter().all(LayerCoverage::passed));
    }

    #[test]
    fn omni_root_is_contained_in_two_element_children() {
        // DEACT N = 2: an omni root over two 2-element beams.
        let report = validate_criterion2(&generate_deact(2).unwrap(), 0.5, &grid()).unwrap();
        assert!(report.passed());
    }

    #[test]
    fn swapped_children_break_containment() {
        let cb = generate_deact(16).unwrap();
        let mut layers = cb.layers().to_vec();
        let a = layers[2][1].awv().clone();
        let b = layers[2][2].awv().clone();
        layers[2][1] = Codeword::new(CodewordId::new(2, 2), b).unwrap();
        layers[2][2] = Codeword::new(CodewordId::new(2, 3), a).unwrap();
        let swapped = Codebook::from_parts(16, Method::Deact, layers).unwrap();
        let report = validate_criterion2(&swapped, 0.6, &grid()).unwrap();
        let parent = report
            .parents
            .iter()
            .find(|p| p.parent == CodewordId::new(1, 1))
            .unwrap();
        assert!(!parent.passed());
        assert!(parent.violations.len() > 100);
    }

    #[test]
    fn missing_children_are_reported() {
        let cb = generate_deact(8).unwrap();
        let mut layers = cb.layers().to_vec();
        layers[1].clear();
        let damaged = Codebook::from_parts(8, Method::Deact, layers).unwrap();
        let report = validate_criterion2(&damaged, 0.5, &grid()).unwrap();
        let root = &report.parents[0];
        assert_eq!(root.missing_children.len(), 2);
        assert!(!root.passed());
    }

    #[test]
    fn bmw_ss_root_has_an_endfire_null() {
        // The first and last sub-arrays of the widest BMW-SS codeword meet at
        // Ω = ±1 with opposite phase, so the grid point -1 is never covered.
        let g = grid();
        let cb = generate_bmw_ss(64).unwrap();
        let report = validate_criterion1(&cb, 0.5, &g).unwrap();
        let root = &report.layers[0];
        assert!(root.uncovered.contains(&-1.0));
        let gain = crate::array::beam_gain(cb.root().awv(), -1.0).norm();
        assert!(gain < 1e-12, "{gain}");
    }

    #[test]
    fn layer_results_group_by_parent_layer() {
        let report = validate_criterion2(&generate_deact(8).unwrap(), 0.5, &grid()).unwrap();
        let layers: Vec<usize> = report.layer_results().iter().map(|(k, _)| *k).collect();
        assert_eq!(layers, vec![0, 1, 2]);
    }
}
