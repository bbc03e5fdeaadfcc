//! Analytics for catastrophic agricultural insurance registers.
//!
//! The crate covers record ingestion and validation, exact-decimal
//! aggregation and indemnity audits, and a seasonal ARIMA(0,1,1)(0,1,1)ₛ
//! engine (estimation, diagnostics, forecasting, simulation). Numeric code
//! is generic over [`Scalar`] (`f32` or `f64`); the aliases below fix the
//! common `f64` instantiations.

pub mod analytics;
pub mod fixtures;
pub mod ingest;
pub mod model;
pub mod optim;
pub mod sarima;
pub mod scalar;
pub mod stats;

pub use scalar::Scalar;

pub type TimeSeries64 = sarima::TimeSeries<f64>;
pub type TimeSeries32 = sarima::TimeSeries<f32>;
pub type SarimaFit64 = sarima::SarimaFit<f64>;
pub type SarimaFit32 = sarima::SarimaFit<f32>;
pub type ForecastResult64 = sarima::ForecastResult<f64>;
pub type ForecastResult32 = sarima::ForecastResult<f32>;
pub type DiagnosticsReport64 = sarima::DiagnosticsReport<f64>;
pub type DiagnosticsReport32 = sarima::DiagnosticsReport<f32>;
pub type LjungBoxRow64 = sarima::LjungBoxRow<f64>;
