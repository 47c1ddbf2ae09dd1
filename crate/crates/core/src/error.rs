use thiserror::Error;

use crate::hierarchy::TokenId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("cycle detected through token `{token}`")]
    Cycle { token: String },

    #[error("duplicate edge `{child}` -> `{parent}`")]
    DuplicateEdge { child: String, parent: String },

    #[error("self-loop on token `{token}`")]
    SelfLoop { token: String },

    #[error("token `{token}` has {count} parents but the graph is in tree mode")]
    MultipleParents { token: String, count: usize },

    #[error("expected exactly one root, found {count}")]
    RootCount { count: usize },

    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),

    #[error("unknown token {0}")]
    UnknownToken(String),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("token {0} has an empty causal past")]
    EmptyCausalPast(TokenId),

    #[error("retrieval revisited token {0}; embedding is not causally consistent")]
    RetrievalCycle(TokenId),

    #[error("ambiguity adjustment failed for token {token}: {reason}")]
    AdjustFailed {
        token: TokenId,
        reason: AdjustFailure,
    },

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("nothing to evaluate: graph has no edges")]
    NoEdges,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Why a two-parent placement could not be completed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdjustFailure {
    /// One parent lies inside the other's light cone, so no child position
    /// can see both at nearly equal proper time. `later` is the one to move.
    ParentsCausallyRelated { later: TokenId, earlier: TokenId },
    /// Ran out of trials.
    TrialsExhausted { trials: usize },
}

impl std::fmt::Display for AdjustFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AdjustFailure::ParentsCausallyRelated { later, earlier } => {
                write!(
                    f,
                    "parent {later} lies in the causal future of parent {earlier}"
                )
            }
            AdjustFailure::TrialsExhausted { trials } => {
                write!(f, "no valid placement after {trials} trials")
            }
        }
    }
}
