use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Invalid model parameters or inconsistent inputs.
    #[error("validation error: {0}")]
    Validation(String),
    /// A computation produced a nonfinite value or failed to converge.
    #[error("numeric error: {0}")]
    Numeric(String),
    /// The deformation is not certified injective at this scale.
    #[error("uncertified deformation: eps = {eps} exceeds 1/(2L) = {bound} (L = {lipschitz})")]
    Uncertified { eps: f64, bound: f64, lipschitz: f64 },
    /// An iterative solver hit its iteration cap.
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn validation<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Validation(msg.into()))
}

pub(crate) fn numeric<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Numeric(msg.into()))
}
