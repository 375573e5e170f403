use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("invalid control: {0}")]
    InvalidControl(String),

    #[error("scenario is neither the two-station line nor the quincunx layout; (tau, beta) do not apply")]
    NotReparameterizable,

    #[error("station index {index} out of range for {count} stations")]
    StationOutOfRange { index: usize, count: usize },

    #[error("point ({x}, {y}) lies inside a deadzone; pathloss is undefined there")]
    InsideDeadzone { x: f64, y: f64 },

    #[error("invalid probability: {0}")]
    InvalidProbability(String),

    #[error("invalid cell statistics: {0}")]
    InvalidStats(String),

    #[error("variance {value:e} is negative beyond the rounding window")]
    NegativeVariance { value: f64 },

    #[error("fairness is undefined: {0}")]
    UndefinedFairness(String),

    #[error("invalid control grid: {0}")]
    InvalidGrid(String),

    #[error("unilateral points are not a subset of the joint bullet: {0}")]
    NotSubset(String),

    #[error("invalid Monte Carlo configuration: {0}")]
    InvalidMcConfig(String),

    #[error("empty input: {0}")]
    Empty(&'static str),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
