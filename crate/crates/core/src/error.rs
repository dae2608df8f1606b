use thiserror::Error;

use crate::operator::IntegralLabel;
use crate::params::Fraction;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "quadrature did not converge after {subdivisions} subdivisions \
         (estimate {value:e}, error {error:e}, tolerance {tolerance:e})"
    )]
    Quadrature {
        value: f64,
        error: f64,
        tolerance: f64,
        subdivisions: usize,
    },

    #[error("residual does not change sign on [{lo}, {hi}]")]
    NoRoot { lo: f64, hi: f64 },

    #[error("root finder did not converge in {iterations} iterations")]
    RootNotConverged { iterations: usize },

    #[error("W_{0} is not one of the eight candidate surfaces")]
    UnknownSurface(Fraction),

    #[error("basic integral {0} was not computed")]
    MissingIntegral(IntegralLabel),

    #[error("invalid configuration: {0}")]
    Config(String),
}
