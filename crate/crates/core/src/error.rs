use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A model parameter violates its invariants.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A floating-point evaluation left the representable range.
    #[error("range error: {0}")]
    Range(String),

    /// Quadrature did not reach the requested tolerance.
    #[error("quadrature did not converge: estimate {estimate} with error {achieved_error:e} (tolerance {tolerance:e})")]
    Accuracy {
        estimate: f64,
        achieved_error: f64,
        tolerance: f64,
    },

    /// Outdoor traffic requested but there are no roads to carry it.
    #[error("infeasible traffic split: outdoor fraction {fraction} with road intensity {road_intensity}")]
    InfeasibleSplit { fraction: f64, road_intensity: f64 },

    /// The target congestion is not reached below the search ceiling.
    #[error("target congestion {target} not reached: congestion at ceiling M={ceiling} is {achieved}")]
    CeilingReached {
        target: f64,
        ceiling: usize,
        achieved: f64,
    },

    /// A scenario document could not be parsed or validated.
    #[error("scenario: {0}")]
    Scenario(String),
}

pub type Result<T> = std::result::Result<T, Error>;
