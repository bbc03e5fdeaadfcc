//! Seasonal ARIMA(0,d,1)(0,D,1)ₛ ("airline" structure): differencing,
//! conditional-sum-of-squares estimation, diagnostics, forecasting, and a
//! seeded simulator.

mod diagnostics;
mod estimate;
mod forecast;
mod simulate;

pub use diagnostics::{
    ljung_box, qq_data, validate, validate_with_lags, DiagnosticsReport, LjungBoxRow,
    DEFAULT_LJUNG_BOX_LAGS, FITTED_PARAMS,
};
pub use estimate::{
    composite_w, css_objective, fit, fit_with, residual_jacobian, residual_jacobian_fd,
    Coefficient, FitOptions, SarimaFit,
};
pub use forecast::{
    forecast, linear_trend_forecast, one_step_predictions, seasonal_naive_drift_forecast,
    ForecastMethod, ForecastResult,
};
pub use simulate::{simulate, simulate_with_innovations};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;
use crate::stats::StatsError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SarimaError {
    #[error("series too short: need at least {needed} observations, got {got}")]
    SeriesTooShort { needed: usize, got: usize },
    #[error("differenced series is constant")]
    DegenerateSeries,
    #[error("optimizer did not converge within {evaluations} evaluations")]
    NonConvergence { evaluations: usize },
    #[error("MA coefficients must satisfy |θ| < 1 and |Θ| < 1 (θ = {theta}, Θ = {seasonal_theta})")]
    NonInvertibleParams { theta: f64, seasonal_theta: f64 },
    #[error("lag {lag} is not below the residual count {residuals}")]
    LagTooLarge { lag: usize, residuals: usize },
    #[error("lag {lag} leaves no degrees of freedom after {fitted_params} fitted parameters")]
    LagTooSmall { lag: usize, fitted_params: usize },
    #[error("forecast horizon must be at least 1")]
    HorizonInvalid,
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("fit covers {fitted} observations but the series has {observed}")]
    FitMismatch { fitted: usize, observed: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

impl SarimaError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            SarimaError::SeriesTooShort { .. } => "SERIES_TOO_SHORT",
            SarimaError::DegenerateSeries => "DEGENERATE_SERIES",
            SarimaError::NonConvergence { .. } => "NON_CONVERGENCE",
            SarimaError::NonInvertibleParams { .. } => "NON_INVERTIBLE_PARAMS",
            SarimaError::LagTooLarge { .. } => "LAG_TOO_LARGE",
            SarimaError::LagTooSmall { .. } => "LAG_TOO_SMALL",
            SarimaError::HorizonInvalid => "HORIZON_INVALID",
            SarimaError::TooFewPoints { .. } => "TOO_FEW_POINTS",
            SarimaError::FitMismatch { .. } => "FIT_MISMATCH",
            SarimaError::InvalidArgument(_) => "INVALID_ARGUMENT",
            SarimaError::Stats(StatsError::DegenerateInput(_)) => "DEGENERATE_INPUT",
            SarimaError::Stats(_) => "NUMERICAL_ERROR",
        }
    }
}

pub(crate) fn non_invertible<T: Scalar>(theta: T, seasonal_theta: T) -> SarimaError {
    SarimaError::NonInvertibleParams {
        theta: theta.to_f64().unwrap_or(f64::NAN),
        seasonal_theta: seasonal_theta.to_f64().unwrap_or(f64::NAN),
    }
}

pub(crate) fn check_invertible<T: Scalar>(theta: T, seasonal_theta: T) -> Result<(), SarimaError> {
    if theta.abs() < T::one() && seasonal_theta.abs() < T::one() {
        Ok(())
    } else {
        Err(non_invertible(theta, seasonal_theta))
    }
}

/// Ordered observations with period labels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeSeries<T> {
    values: Vec<T>,
    labels: Vec<String>,
    seasonal_period: usize,
}

impl<T: Scalar> TimeSeries<T> {
    pub fn new(values: Vec<T>, labels: Vec<String>, seasonal_period: usize) -> Result<Self, SarimaError> {
        if values.len() != labels.len() {
            return Err(SarimaError::InvalidArgument(format!(
                "{} values but {} labels",
                values.len(),
                labels.len()
            )));
        }
        if seasonal_period == 0 {
            return Err(SarimaError::InvalidArgument("seasonal period must be ≥ 1".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(SarimaError::InvalidArgument(format!("value at position {} is not finite", i + 1)));
        }
        Ok(Self {
            values,
            labels,
            seasonal_period,
        })
    }

    /// Labels the observations `1..=n`.
    pub fn from_values(values: Vec<T>, seasonal_period: usize) -> Result<Self, SarimaError> {
        let labels = (1..=values.len()).map(|i| i.to_string()).collect();
        Self::new(values, labels, seasonal_period)
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn seasonal_period(&self) -> usize {
        self.seasonal_period
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Differencing orders and season length; the MA structure is fixed at
/// one nonseasonal and one seasonal term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SarimaSpec {
    pub d: u8,
    pub seasonal_d: u8,
    pub s: usize,
}

impl SarimaSpec {
    /// (0,1,1)(0,1,1)ₛ.
    pub fn airline(s: usize) -> Self {
        Self { d: 1, seasonal_d: 1, s }
    }

    pub fn new(d: u8, seasonal_d: u8, s: usize) -> Result<Self, SarimaError> {
        if d > 1 || seasonal_d > 1 {
            return Err(SarimaError::InvalidArgument("d and D must each be 0 or 1".into()));
        }
        if s == 0 {
            return Err(SarimaError::InvalidArgument("seasonal period must be ≥ 1".into()));
        }
        Ok(Self { d, seasonal_d, s })
    }

    /// Observations consumed by differencing.
    pub fn differencing_loss(&self) -> usize {
        usize::from(self.d) + usize::from(self.seasonal_d) * self.s
    }

    /// Smallest series length accepted for estimation.
    pub fn min_length(&self) -> usize {
        self.differencing_loss() + self.s + 2
    }

    /// Coefficients of (1−B)^d (1−B^s)^D, index = power of B.
    pub fn differencing_polynomial<T: Scalar>(&self) -> Vec<T> {
        let mut poly = vec![T::one()];
        let mul = |poly: &[T], lag: usize| {
            let mut out = vec![T::zero(); poly.len() + lag];
            for (i, &c) in poly.iter().enumerate() {
                out[i] = out[i] + c;
                out[i + lag] = out[i + lag] - c;
            }
            out
        };
        if self.d == 1 {
            poly = mul(&poly, 1);
        }
        if self.seasonal_d == 1 {
            poly = mul(&poly, self.s);
        }
        poly
    }
}

/// Applies (1−B)^d (1−B^s)^D; the output has n − d − D·s values.
pub fn difference<T: Scalar>(values: &[T], d: u8, seasonal_d: u8, s: usize) -> Result<Vec<T>, SarimaError> {
    let spec = SarimaSpec::new(d, seasonal_d, s)?;
    let loss = spec.differencing_loss();
    if values.len() <= loss {
        return Err(SarimaError::SeriesTooShort {
            needed: loss + 1,
            got: values.len(),
        });
    }
    let mut out = values.to_vec();
    if d == 1 {
        out = out.windows(2).map(|w| w[1] - w[0]).collect();
    }
    if seasonal_d == 1 {
        out = (s..out.len()).map(|t| out[t] - out[t - s]).collect();
    }
    Ok(out)
}
