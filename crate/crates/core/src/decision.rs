//! From a combined mass function to a single forecast.
//!
//! Each focal mass is split equally among the singletons it contains (the
//! pignistic transform), and the singletons are ranked by the weight they
//! collect.

use std::sync::Arc;

use crate::frame::{parse_score, Frame, Score};
use crate::mass::MassFunction;

/// Per-element weights over a frame, summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct SingletonDistribution {
    frame: Arc<Frame>,
    weights: Vec<f64>,
}

impl SingletonDistribution {
    /// Wraps raw non-negative weights; they are rescaled to sum to one.
    /// Returns `None` for a wrong length, a negative weight or an all-zero vector.
    pub fn from_weights(frame: Arc<Frame>, weights: Vec<f64>) -> Option<Self> {
        if weights.len() != frame.len() || weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return None;
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return None;
        }
        let weights = weights.into_iter().map(|w| w / total).collect();
        Some(Self { frame, weights })
    }

    pub fn frame(&self) -> &Arc<Frame> {
        &self.frame
    }

    pub fn weight(&self, index: usize) -> f64 {
        self.weights.get(index).copied().unwrap_or(0.0)
    }

    /// Weight of a standard-frame score.
    pub fn score_weight(&self, score: Score) -> f64 {
        self.frame
            .position(&score.to_string())
            .map_or(0.0, |i| self.weight(i))
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Spreads every focal mass evenly over its members (Θ included).
pub fn distribute_over_singletons(m: &MassFunction) -> SingletonDistribution {
    let frame = m.frame().clone();
    let mut weights = vec![0.0; frame.len()];
    for (set, mass) in m.focal() {
        let share = mass / set.len() as f64;
        for i in set.indices() {
            weights[i] += share;
        }
    }
    SingletonDistribution { frame, weights }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankedEntry {
    pub index: usize,
    pub weight: f64,
}

/// Singletons with positive weight, heaviest first.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedPrediction {
    frame: Arc<Frame>,
    ranking: Vec<RankedEntry>,
}

impl RankedPrediction {
    pub fn ranking(&self) -> &[RankedEntry] {
        &self.ranking
    }

    pub fn frame(&self) -> &Arc<Frame> {
        &self.frame
    }

    pub fn top(&self) -> RankedEntry {
        self.ranking[0]
    }

    pub fn label(&self, entry: &RankedEntry) -> &str {
        self.frame.label(entry.index).unwrap_or("?")
    }

    pub fn top_label(&self) -> &str {
        self.label(&self.ranking[0])
    }

    /// The top element read as a score; `None` on non-score frames.
    pub fn top_score(&self) -> Option<Score> {
        parse_score(self.top_label()).ok()
    }

    /// `(label, weight)` pairs in rank order.
    pub fn entries(&self) -> impl Iterator<Item = (&str, f64)> + '_ {
        self.ranking.iter().map(|e| (self.label(e), e.weight))
    }
}

/// Sorts by weight descending; ties go to the earlier frame element, which for
/// the score frame means lower home then lower away goals.
pub fn rank(d: &SingletonDistribution) -> RankedPrediction {
    let mut ranking: Vec<RankedEntry> = d
        .weights
        .iter()
        .enumerate()
        .filter(|&(_, &w)| w > 0.0)
        .map(|(index, &weight)| RankedEntry { index, weight })
        .collect();
    ranking.sort_by(|a, b| b.weight.total_cmp(&a.weight).then(a.index.cmp(&b.index)));
    RankedPrediction {
        frame: d.frame.clone(),
        ranking,
    }
}
