use thiserror::Error;

use crate::certify::CertifiedBound;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("alpha must lie in the open interval (0, 1), got {0}")]
    InvalidAlpha(f64),
    #[error("point {0} lies outside [0, 1]")]
    OutOfDomain(f64),
    #[error("degenerate pair: both points equal {0}")]
    DegeneratePair(f64),
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("empty distance band [{lo}, {hi}]")]
    EmptyBand { lo: f64, hi: f64 },
    #[error("malformed function: {0}")]
    Malformed(String),
    #[error("functions use different exponents ({0} vs {1})")]
    AlphaMismatch(f64, f64),
    #[error("function is not based: f(0) = {0}")]
    NotBased(f64),
    #[error("refinement budget exhausted after {boxes} boxes (best enclosure [{}, {}])", best.lower, best.upper)]
    BudgetExhausted { best: CertifiedBound, boxes: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("intervals around {0} and {1} overlap")]
    OverlappingIntervals(f64, f64),
    #[error("critical point {0} of h is missing from the supplied list")]
    MissingCritical(f64),
    #[error("root isolation failed: {0}")]
    RootIsolation(String),
    #[error("construction depth too small: need at least {needed}, have {have}")]
    UnresolvedDepth { needed: usize, have: usize },
    #[error("depth {depth} exceeds the segment budget (max {max})")]
    DepthBudget { depth: usize, max: usize },
    #[error("{0} is not a recorded node")]
    NotANode(f64),
    #[error("depth {depth} exceeds the available coefficient levels ({levels})")]
    DepthExceedsLevels { depth: usize, levels: usize },
    #[error("search for {0} failed within the budget")]
    SearchFailed(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    /// The best enclosure carried by a budget failure, if any.
    pub fn best_bound(&self) -> Option<&CertifiedBound> {
        match self {
            Error::BudgetExhausted { best, .. } => Some(best),
            _ => None,
        }
    }
}
