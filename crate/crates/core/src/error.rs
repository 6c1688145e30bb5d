use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point {re}+{im}i lies outside the open unit disk")]
    OutsideDisk { re: f64, im: f64 },

    #[error("invalid coefficients: {0}")]
    InvalidCoefficients(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("|D^v f(z)| = {0:e} is below the guard threshold")]
    GuardTriggered(f64),

    #[error("every grid point was skipped by the guard")]
    DegenerateGrid,

    #[error("function is not a class member (x_1 = {0})")]
    NotAMember(f64),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
}

pub type Result<T> = std::result::Result<T, Error>;
