use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not symmetric: defect {defect:e} exceeds tolerance {tol:e}")]
    NonSymmetric { defect: f64, tol: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("matrix is not positive definite (min eigenvalue {min_eigenvalue:e})")]
    NotPd { min_eigenvalue: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("law is not monotone")]
    NotMonotone,

    #[error("law is not strictly monotone (symmetric part is not positive definite)")]
    NotStrictlyMonotone,

    #[error(
        "law is not cyclically monotone; the limit n = inf is only defined for symmetric laws"
    )]
    NotCyclic,

    #[error("kernel H_{order} is unavailable: recursion stopped at index {stop_index}")]
    KernelFailed { order: usize, stop_index: usize },

    #[error("order {requested} exceeds the strict order: kernel stops at index {stop_index}")]
    OrderExceeded { requested: usize, stop_index: usize },

    #[error("stationarity system is singular or not negative definite")]
    SingularSystem,

    #[error("invalid order {0}: must be at least 2")]
    InvalidOrder(usize),

    #[error("{what} = {value} exceeds the supported limit {limit}")]
    LimitExceeded {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
