use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("matrix is singular: {0}")]
    Singular(String),
    #[error("matrix is ill-conditioned (condition number {cond:.3e} exceeds {limit:.1e})")]
    IllConditioned { cond: f64, limit: f64 },
    #[error("quadrature did not converge: refinement shifted the result by {delta:.3e} (tolerance {tol:.1e})")]
    NotConverged { delta: f64, tol: f64 },
    #[error("truncation too small: need l_max >= {required_l_max}")]
    TruncationTooSmall { required_l_max: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
