//! Dempster's rule of combination and the belief/plausibility bounds.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::frame::HypothesisSet;
use crate::mass::MassFunction;

/// Combined masses at or below this are dropped after normalisation.
pub const NEGLIGIBLE_MASS: f64 = 1e-12;

/// A normalisation factor at or below this counts as total conflict.
pub const TOTAL_CONFLICT_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConflictReport {
    /// K: product mass landing on empty intersections.
    pub mass_of_conflict: f64,
    /// 1 - K.
    pub normalisation_factor: f64,
}

impl ConflictReport {
    fn new(k: f64) -> Self {
        let k = k.clamp(0.0, 1.0);
        Self {
            mass_of_conflict: k,
            normalisation_factor: 1.0 - k,
        }
    }

    pub fn is_total(&self) -> bool {
        self.normalisation_factor <= TOTAL_CONFLICT_MARGIN
    }
}

/// Products of every focal pair, grouped by intersection. Each group is sorted
/// before summing so the result does not depend on operand order.
struct PairProducts {
    by_intersection: BTreeMap<HypothesisSet, Vec<f64>>,
    conflicting: Vec<f64>,
}

impl PairProducts {
    fn collect(m1: &MassFunction, m2: &MassFunction) -> Result<Self> {
        if !m1.same_frame(m2) {
            return Err(Error::FrameMismatch);
        }
        let mut by_intersection: BTreeMap<HypothesisSet, Vec<f64>> = BTreeMap::new();
        let mut conflicting = Vec::new();
        for (x, mx) in m1.focal() {
            for (y, my) in m2.focal() {
                let product = mx * my;
                let c = x.intersect(y);
                if c.is_empty() {
                    conflicting.push(product);
                } else {
                    by_intersection.entry(c).or_default().push(product);
                }
            }
        }
        Ok(Self {
            by_intersection,
            conflicting,
        })
    }
}

fn ordered_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(f64::total_cmp);
    terms.into_iter().sum()
}

/// Mass of conflict K between two mass functions.
pub fn conflict(m1: &MassFunction, m2: &MassFunction) -> Result<ConflictReport> {
    let products = PairProducts::collect(m1, m2)?;
    Ok(ConflictReport::new(ordered_sum(products.conflicting)))
}

/// The orthogonal sum `m1 ⊕ m2`.
pub fn orthogonal_sum(m1: &MassFunction, m2: &MassFunction) -> Result<MassFunction> {
    let products = PairProducts::collect(m1, m2)?;
    let report = ConflictReport::new(ordered_sum(products.conflicting));
    if report.is_total() {
        return Err(Error::TotalConflict {
            conflict: report.mass_of_conflict,
        });
    }
    let norm = report.normalisation_factor;
    let focal = products
        .by_intersection
        .into_iter()
        .map(|(set, terms)| (set, ordered_sum(terms) / norm))
        .filter(|&(_, m)| m > NEGLIGIBLE_MASS)
        .collect();
    Ok(MassFunction::from_parts(m1.frame().clone(), focal))
}

/// Left fold of [`orthogonal_sum`] over `masses`.
///
/// On total conflict the error carries the index of the input that could not
/// be absorbed into the running combination.
pub fn combine_all(masses: &[MassFunction]) -> Result<MassFunction> {
    let (first, rest) = masses.split_first().ok_or(Error::EmptyCombination)?;
    rest.iter()
        .enumerate()
        .try_fold(first.clone(), |acc, (i, m)| {
            orthogonal_sum(&acc, m).map_err(|e| match e {
                Error::TotalConflict { conflict } => Error::TotalConflictAt {
                    step: i + 1,
                    conflict,
                },
                other => other,
            })
        })
}

/// Bel(A): total mass of focal sets contained in `a`.
pub fn belief(m: &MassFunction, a: HypothesisSet) -> f64 {
    m.focal()
        .filter(|&(x, _)| x.is_subset_of(a))
        .map(|(_, v)| v)
        .sum()
}

/// Pl(A): total mass of focal sets meeting `a`.
pub fn plausibility(m: &MassFunction, a: HypothesisSet) -> f64 {
    m.focal()
        .filter(|&(x, _)| !x.is_disjoint(a))
        .map(|(_, v)| v)
        .sum()
}
