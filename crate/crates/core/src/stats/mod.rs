//! Numerical statistics primitives: autocorrelation, chi-square and normal
//! tail probabilities, normal quantiles, and simple least squares.

mod acf;
mod ols;
mod special;

pub use acf::{acf, AcfResult};
pub use ols::{ols_fit, OlsFit};
pub use special::{
    chi_square_cdf, chi_square_sf, ln_gamma, normal_cdf, normal_quantile, normal_sf,
    regularized_gamma_p, regularized_gamma_q,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("argument outside the function's domain: {0}")]
    DomainError(String),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("series or continued fraction failed to converge")]
    ConvergenceFailure,
}
