use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid mass table: {0}")]
    InvalidMasses(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("data impossible under model+prior (total predictive mass is zero)")]
    ImpossibleData,

    #[error("tables live on different grids")]
    GridMismatch,

    #[error("transform is not injective on the grid")]
    NonInjective,

    #[error("observed value outside the sample space: {0}")]
    OutOfSampleSpace(String),

    #[error("point is not on the grid: {0}")]
    NotOnGrid(String),

    #[error("likelihood curve is zero everywhere")]
    AllZeroLikelihood,

    #[error("zero probability: {0}")]
    ZeroProbability(String),

    #[error("Bayes factor undefined: {0}")]
    UndefinedBayesFactor(String),

    #[error("zero predictive density: {0}")]
    ZeroPredictive(String),

    #[error("{what}: {count} exceeds cap {cap}")]
    CapExceeded { what: String, count: u128, cap: u128 },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}
