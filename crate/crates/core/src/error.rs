use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("cannot parse score `{token}`: {reason}")]
    ScoreParse { token: String, reason: String },

    #[error("unknown element `{0}` for this frame")]
    UnknownElement(String),

    #[error("frame must have between 1 and {max} elements, got {got}")]
    FrameSize { got: usize, max: usize },

    #[error("duplicate frame element `{0}`")]
    DuplicateElement(String),

    #[error("hypothesis set is empty")]
    EmptyHypothesis,

    #[error("hypothesis set has members outside the frame")]
    OutsideFrame,

    #[error("belief {0} is negative or not finite")]
    InvalidBelief(f64),

    #[error("beliefs sum to {total}, exceeding 1 by {excess:.3e}")]
    OverAllocation { total: f64, excess: f64 },

    #[error("{what} {value} is outside [0, 1]")]
    OutOfRange { what: &'static str, value: f64 },

    #[error("mass functions are defined over different frames")]
    FrameMismatch,

    #[error("total conflict (K = {conflict}): combination is undefined")]
    TotalConflict { conflict: f64 },

    #[error("total conflict at fold step {step} (K = {conflict})")]
    TotalConflictAt { step: usize, conflict: f64 },

    #[error("nothing to combine")]
    EmptyCombination,

    #[error("match {0} has no actual result")]
    MissingActual(String),

    #[error("match {0} has no predictions")]
    NoPredictions(String),

    #[error("inconsistent prediction sources: {0}")]
    InconsistentSources(String),

    #[error("unknown scoring schema `{0}`")]
    UnknownSchema(String),
}
