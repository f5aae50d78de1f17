//! Mass functions, raw expert evidence, and discounting.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::frame::{Frame, HypothesisSet};
use crate::MASS_TOLERANCE;

/// One line of an expert's belief assignment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawAssignment {
    pub hypothesis: HypothesisSet,
    pub belief: f64,
}

impl RawAssignment {
    pub fn new(hypothesis: HypothesisSet, belief: f64) -> Self {
        Self { hypothesis, belief }
    }
}

/// A prediction criterion with its impact `i` (discount rate `1 - i`).
#[derive(Debug, Clone, PartialEq)]
pub struct Evidence {
    pub label: String,
    pub impact: f64,
    pub assignments: Vec<RawAssignment>,
}

impl Evidence {
    pub fn discount_rate(&self) -> f64 {
        1.0 - self.impact
    }
}

/// Basic probability assignment: focal sets with positive mass summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct MassFunction {
    frame: Arc<Frame>,
    focal: BTreeMap<HypothesisSet, f64>,
}

impl MassFunction {
    /// Total ignorance: all mass on Θ.
    pub fn vacuous(frame: Arc<Frame>) -> Self {
        let full = frame.full();
        Self {
            frame,
            focal: BTreeMap::from([(full, 1.0)]),
        }
    }

    /// Builds a mass function from already-normalised parts. Callers keep the
    /// invariants; zero entries are dropped.
    pub(crate) fn from_parts(frame: Arc<Frame>, focal: BTreeMap<HypothesisSet, f64>) -> Self {
        let focal = focal.into_iter().filter(|&(_, m)| m > 0.0).collect();
        Self { frame, focal }
    }

    pub fn frame(&self) -> &Arc<Frame> {
        &self.frame
    }

    pub fn same_frame(&self, other: &MassFunction) -> bool {
        Arc::ptr_eq(&self.frame, &other.frame) || self.frame == other.frame
    }

    /// Mass of `set`; zero when it is not focal.
    pub fn mass(&self, set: HypothesisSet) -> f64 {
        self.focal.get(&set).copied().unwrap_or(0.0)
    }

    /// Focal sets in ascending bit order.
    pub fn focal(&self) -> impl Iterator<Item = (HypothesisSet, f64)> + '_ {
        self.focal.iter().map(|(&s, &m)| (s, m))
    }

    pub fn len(&self) -> usize {
        self.focal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.focal.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.focal.values().sum()
    }

    pub fn is_vacuous(&self) -> bool {
        self.focal.len() == 1 && self.mass(self.frame.full()) > 0.0
    }

    /// Focal sets ordered by decreasing mass, ties in bit order.
    pub fn by_mass(&self) -> Vec<(HypothesisSet, f64)> {
        let mut v: Vec<_> = self.focal().collect();
        v.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        v
    }

    /// Same frame and same focal sets, masses within `tol`.
    pub fn approx_eq(&self, other: &MassFunction, tol: f64) -> bool {
        if !self.same_frame(other) {
            return false;
        }
        let keys: std::collections::BTreeSet<_> =
            self.focal.keys().chain(other.focal.keys()).collect();
        keys.into_iter()
            .all(|&k| (self.mass(k) - other.mass(k)).abs() <= tol)
    }

    /// The focal entries as raw assignments, e.g. for re-validation.
    pub fn to_assignments(&self) -> Vec<RawAssignment> {
        self.focal()
            .map(|(h, b)| RawAssignment::new(h, b))
            .collect()
    }
}

/// Turns raw beliefs into a mass function.
///
/// Duplicate hypotheses are merged by addition. Any shortfall below one is
/// reserved on Θ; a total within tolerance of one is rescaled to exactly one.
pub fn validate_mass(frame: &Arc<Frame>, assignments: &[RawAssignment]) -> Result<MassFunction> {
    let mut focal: BTreeMap<HypothesisSet, f64> = BTreeMap::new();
    for a in assignments {
        if a.hypothesis.is_empty() {
            return Err(Error::EmptyHypothesis);
        }
        if !frame.contains_set(a.hypothesis) {
            return Err(Error::OutsideFrame);
        }
        if !a.belief.is_finite() || a.belief < 0.0 {
            return Err(Error::InvalidBelief(a.belief));
        }
        if a.belief > 0.0 {
            *focal.entry(a.hypothesis).or_insert(0.0) += a.belief;
        }
    }

    let total: f64 = focal.values().sum();
    if total > 1.0 + MASS_TOLERANCE {
        return Err(Error::OverAllocation {
            total,
            excess: total - 1.0,
        });
    }
    let deficit = 1.0 - total;
    if deficit > MASS_TOLERANCE {
        *focal.entry(frame.full()).or_insert(0.0) += deficit;
    } else {
        for m in focal.values_mut() {
            *m /= total;
        }
    }
    Ok(MassFunction::from_parts(frame.clone(), focal))
}

/// Discounts `m` at rate `alpha`: proper subsets keep `(1 - alpha)` of their
/// mass and Θ absorbs the rest.
pub fn discount(m: &MassFunction, alpha: f64) -> Result<MassFunction> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::OutOfRange {
            what: "discount rate",
            value: alpha,
        });
    }
    if alpha == 0.0 {
        return Ok(m.clone());
    }
    let full = m.frame.full();
    let keep = 1.0 - alpha;
    let mut focal: BTreeMap<HypothesisSet, f64> =
        m.focal().map(|(set, mass)| (set, keep * mass)).collect();
    *focal.entry(full).or_insert(0.0) += alpha;
    Ok(MassFunction::from_parts(m.frame.clone(), focal))
}

/// Validates the evidence's beliefs and discounts them by `1 - impact`.
pub fn evidence_to_mass(frame: &Arc<Frame>, evidence: &Evidence) -> Result<MassFunction> {
    if !(0.0..=1.0).contains(&evidence.impact) {
        return Err(Error::OutOfRange {
            what: "impact",
            value: evidence.impact,
        });
    }
    let m = validate_mass(frame, &evidence.assignments)?;
    discount(&m, evidence.discount_rate())
}
