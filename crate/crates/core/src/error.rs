use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("invalid matching: {0}")]
    MatchingInvalid(String),
    #[error("index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: usize, bound: usize },
    #[error("tau{which} is not a fixed-point-free involution at flag {flag}")]
    NotInvolution { which: usize, flag: usize },
    #[error("tau0 and tau2 do not commute at flag {0}")]
    NotCommuting(usize),
    #[error("flag set is empty or not a multiple of 4")]
    BadFlagCount(usize),
    #[error("map is not connected")]
    Disconnected,
    #[error("map is not a quadrangulation")]
    NotQuadrangulation,
    #[error("map is not bipartite")]
    NotBipartite,
    #[error("labels are not graph distances")]
    LabelsNotDistances,
    #[error("map is not unicellular")]
    NotUnicellular,
    #[error("labels missing")]
    NotLabeled,
    #[error("not a labeled map: {0}")]
    BadLabels(String),
    #[error("not well-labeled: {0}")]
    NotWellLabeled(String),
    #[error("corner label {0} has no successor corner (successor is the central vertex)")]
    LabelTooSmall(i64),
    #[error("invalid sources: {0}")]
    SourcesInvalid(String),
    #[error("unsupported surface: {0}")]
    UnsupportedSurface(String),
    #[error("size {0} too large for this operation")]
    SizeTooLarge(usize),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("rejection budget of {0} attempts exceeded")]
    RejectionBudgetExceeded(u64),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("internal invariant violated: {0}")]
    InternalInvariantViolated(String),
}

impl MapError {
    /// Defects as opposed to bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, MapError::InternalInvariantViolated(_))
    }
}

pub type Result<T> = std::result::Result<T, MapError>;
