use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum TrickleError {
    #[error("invalid vertex {vertex:?} for substrate {kind}")]
    InvalidVertex { kind: String, vertex: String },

    #[error("state outside the chain's state space: {0}")]
    InvalidState(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("stored depth {have} insufficient, need {need}")]
    DepthInsufficient { have: usize, need: usize },

    #[error("labeling is not admissible/compatible: {0}")]
    BadLabeling(String),

    #[error("perfect-memory precondition violated: {0}")]
    PerfectMemoryViolated(String),

    #[error("h vanishes at the source state")]
    ZeroAtSource,

    #[error("{0}")]
    Other(String),
}
