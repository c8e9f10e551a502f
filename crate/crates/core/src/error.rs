use thiserror::Error;

/// Errors produced by the analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(
        "Gram matrix is singular or near-singular (eigenvalue ratio {ratio:e} <= {threshold:e})"
    )]
    Singular { ratio: f64, threshold: f64 },

    #[error("{what}: size {size} exceeds the enumeration cap {cap}")]
    CapExceeded {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("subset search would enumerate {count} subsets (budget {budget}); lower max_subset")]
    BudgetExceeded { count: u128, budget: u128 },

    #[error("active-set solver did not converge within {iterations} iterations (degenerate constraints?)")]
    IterationLimit { iterations: usize },

    #[error("point set is not shattered at the origin at margin {gamma}")]
    NotShattered { gamma: f64 },

    #[error("no m <= {m_max} has estimated probability below 1/2 (last estimate at m = {last_m}: {last_prob})")]
    NotFound {
        m_max: usize,
        last_m: usize,
        last_prob: f64,
    },

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("at m = {m}: {source}")]
    AtSampleSize {
        m: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invalid(msg.into()))
}
