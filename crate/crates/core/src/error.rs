use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Too few variables for the objective (Rosenbrock needs two).
    #[error("{function} requires at least {required} variable(s), got {got}")]
    Arity {
        function: &'static str,
        required: usize,
        got: usize,
    },
    #[error("non-finite input component at index {index}")]
    NonFinite { index: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    /// `parts` does not divide `total` when splitting the population.
    #[error("{what}: {parts} subpopulations do not divide {total}")]
    Divisibility {
        what: &'static str,
        total: usize,
        parts: usize,
    },
    #[error("subpopulation id {id} out of range (k = {k})")]
    SubpopOutOfRange { id: usize, k: usize },
    #[error("worker {tid} failed: {message}")]
    WorkerFailed { tid: usize, message: String },
    #[error("usage error: {0}")]
    Usage(String),
}

impl Error {
    /// True for errors raised while planning a decomposition.
    pub fn is_plan_error(&self) -> bool {
        matches!(self, Error::Divisibility { .. } | Error::Arity { .. })
    }
}
