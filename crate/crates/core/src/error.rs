use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} is outside the open interval (-1, 1)")]
    ParamOutOfRange { name: &'static str, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("index {index} out of range (available: {available})")]
    IndexOutOfRange { index: usize, available: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("x = {x} lies outside the open support (-{bound}, {bound})")]
    OutOfSupport { x: f64, bound: f64 },

    #[error("density denominator {magnitude:e} too close to a pole at x = {x}")]
    NearPole { x: f64, magnitude: f64 },

    #[error("density at x = {x} has a non-negligible imaginary part {imag:e}")]
    NonRealDensity { x: f64, imag: f64 },

    #[error("no radial representation: {0}")]
    NoRepresentation(String),

    #[error("Gram matrix of rank {rank} is singular (condition number {condition:e})")]
    SingularGram { rank: usize, condition: f64 },
}
