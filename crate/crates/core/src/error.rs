use thiserror::Error;

pub type Result<T> = std::result::Result<T, SiltError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SiltError {
    /// An argument violated an operation precondition.
    #[error("domain error in {field}: {reason}")]
    Domain { field: &'static str, reason: String },

    /// Path synthesis failed on every available route.
    #[error("synthesis failed: circulant embedding ({embedding}); fallback {fallback} ({reason})")]
    Synthesis {
        embedding: String,
        fallback: &'static str,
        reason: String,
    },

    /// Adaptive quadrature stopped before meeting its tolerance.
    #[error("quadrature did not converge: best value {best:e}, achieved error {achieved:e} (requested {requested:e})")]
    Quadrature {
        best: f64,
        achieved: f64,
        requested: f64,
    },

    #[error("combinatorial limit: {0}")]
    Combinatorics(String),
}

impl SiltError {
    pub(crate) fn domain(field: &'static str, reason: impl Into<String>) -> Self {
        SiltError::Domain {
            field,
            reason: reason.into(),
        }
    }
}
