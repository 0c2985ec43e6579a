use thiserror::Error;

/// Errors raised anywhere in the engine.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown operator or function `{0}`")]
    UnknownOperator(String),

    #[error("division by an expression that normalizes to zero")]
    DivisionByZero,

    #[error("exponent must be an exact rational constant, got `{0}`")]
    NonRationalExponent(String),

    #[error("chart mismatch: {0}")]
    ChartMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("commutator [{left}, {right}] = {residual} is not in the span of the basis")]
    Closure { left: String, right: String, residual: String },

    #[error("`{0}` is not a symmetry of the equation")]
    NotSymmetry(String),

    #[error("canonical coordinates: {0}")]
    Coordinates(String),

    #[error("field is not of the admissible shape: {0}")]
    Shape(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error("unknown label `{0}`")]
    UnknownLabel(String),
}

pub type Result<T> = std::result::Result<T, Error>;
