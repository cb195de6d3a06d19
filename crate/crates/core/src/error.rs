//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors raised by norm oracles, optimizers and the selection pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// A space description violates its invariants (e.g. `p < 1`).
    #[error("invalid space: {0}")]
    InvalidSpace(String),

    /// A caller-side precondition does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A numeric parameter lies outside its admissible range.
    #[error("parameter out of range: {0}")]
    Parameter(String),

    /// A premise of a renorming construction fails on the supplied data.
    #[error("premise check failed: {0}")]
    Premise(String),

    /// Block index sets are not strictly increasing.
    #[error("block ordering violated: {0}")]
    Ordering(String),

    /// Vectors that should span a subspace are linearly dependent.
    #[error("rank deficiency: {0}")]
    Rank(String),

    /// The requested computation exceeds a configured size cap.
    #[error("resource limit exceeded: {what} (cap {cap})")]
    ResourceLimit {
        /// What exceeded the cap.
        what: String,
        /// The configured cap.
        cap: usize,
    },

    /// A truncation budget is too small for the requested evaluation.
    #[error("budget too small: {0}")]
    Budget(String),

    /// A Mazur scan ran out of candidates.
    #[error("no admissible index found after scanning {scanned} candidates (best margin {best_margin})")]
    NotFound {
        /// Number of candidates examined.
        scanned: usize,
        /// Largest margin observed during the scan.
        best_margin: f64,
    },

    /// A heuristic search ran out of budget before reaching its target.
    #[error("search budget exhausted: best value {best} below target {target}")]
    Exhausted {
        /// Best value reached.
        best: f64,
        /// Value that was required.
        target: f64,
    },

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    /// An objective or norm produced NaN or infinity.
    #[error("non-finite value: {0}")]
    Numeric(String),

    /// The operation has no implementation for this space.
    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ResourceLimit { .. }
            | Error::Budget(_)
            | Error::NotFound { .. }
            | Error::Exhausted { .. } => 3,
            Error::Io(_) | Error::Numeric(_) => 1,
            _ => 2,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        // serde_json appends the position itself when it knows it.
        Error::Schema(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
