//! Evidential reasoning over soccer score forecasts.
//!
//! Experts express uncertain beliefs as mass functions over sets of scores.
//! Each piece of evidence is discounted by its impact, the pieces are pooled
//! with Dempster's orthogonal sum, and the pooled mass is spread over single
//! scores to produce a ranked forecast. The [`evaluation`] module scores
//! forecasts against real results.

pub mod cli;
pub mod combination;
pub mod decision;
pub mod error;
pub mod evaluation;
pub mod frame;
pub mod io;
pub mod mass;

pub use combination::{
    belief, combine_all, conflict, orthogonal_sum, plausibility, ConflictReport,
};
pub use decision::{distribute_over_singletons, rank, RankedPrediction, SingletonDistribution};
pub use error::{Error, Result};
pub use evaluation::{
    aggregate, outcome_of, score_prediction, EvaluationReport, MatchRecord, Outcome,
};
pub use frame::{intersect, make_standard_frame, parse_score, Frame, HypothesisSet, Score};
pub use mass::{discount, evidence_to_mass, validate_mass, Evidence, MassFunction, RawAssignment};

/// Absolute tolerance for mass-sum checks.
pub const MASS_TOLERANCE: f64 = 1e-9;
