use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use catastroagri_core::analytics::AnalyticsError;
use catastroagri_core::ingest::IngestError;
use catastroagri_core::sarima::SarimaError;
use serde::Serialize;

/// Every code an error response can carry.
pub const ERROR_CODES: &[&str] = &[
    "UNSUPPORTED_FORMAT",
    "EMPTY_INPUT",
    "ENCODING_ERROR",
    "MALFORMED_CSV",
    "INVALID_MAPPING",
    "PAYLOAD_TOO_LARGE",
    "UNKNOWN_DATASET",
    "BAD_DIMENSION",
    "DUPLICATE_DIMENSION",
    "NO_DIMENSIONS",
    "UNKNOWN_METRIC",
    "BAD_FILTER",
    "INVALID_RATE",
    "BAD_REQUEST",
    "DEGENERATE_INPUT",
    "OVERFLOW",
    "SERIES_TOO_SHORT",
    "DEGENERATE_SERIES",
    "NON_CONVERGENCE",
    "NON_INVERTIBLE_PARAMS",
    "LAG_TOO_LARGE",
    "LAG_TOO_SMALL",
    "HORIZON_INVALID",
    "TOO_FEW_POINTS",
    "FIT_MISMATCH",
    "INVALID_ARGUMENT",
    "NUMERICAL_ERROR",
    "INTERNAL",
];

#[derive(Debug, Serialize)]
struct Body {
    code: &'static str,
    message: String,
}

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            code,
            message: message.into(),
        }
    }

    pub fn bad_request(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, code, message)
    }

    pub fn unknown_dataset(id: u64) -> Self {
        Self::new(StatusCode::NOT_FOUND, "UNKNOWN_DATASET", format!("no dataset with id {id}"))
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = Body {
            code: self.code,
            message: self.message,
        };
        (self.status, Json(body)).into_response()
    }
}

impl From<IngestError> for ApiError {
    fn from(e: IngestError) -> Self {
        let code = match e {
            IngestError::UnsupportedFormat(_) => "UNSUPPORTED_FORMAT",
            IngestError::EmptyInput => "EMPTY_INPUT",
            IngestError::EncodingError(_) => "ENCODING_ERROR",
            IngestError::Malformed(_) => "MALFORMED_CSV",
            IngestError::InvalidMapping(_) => "INVALID_MAPPING",
        };
        Self::bad_request(code, e.to_string())
    }
}

impl From<AnalyticsError> for ApiError {
    fn from(e: AnalyticsError) -> Self {
        let (status, code) = match e {
            AnalyticsError::NoDimensions => (StatusCode::BAD_REQUEST, "NO_DIMENSIONS"),
            AnalyticsError::DuplicateDimension(_) => (StatusCode::BAD_REQUEST, "DUPLICATE_DIMENSION"),
            AnalyticsError::UnknownDimension(_) => (StatusCode::BAD_REQUEST, "BAD_DIMENSION"),
            AnalyticsError::UnknownMetric(_) => (StatusCode::BAD_REQUEST, "UNKNOWN_METRIC"),
            AnalyticsError::EmptyFilter(_) | AnalyticsError::MalformedFilter(_) => {
                (StatusCode::BAD_REQUEST, "BAD_FILTER")
            }
            AnalyticsError::InvalidRate(_) | AnalyticsError::NoRates => (StatusCode::BAD_REQUEST, "INVALID_RATE"),
            AnalyticsError::NegativeArea(_) => (StatusCode::BAD_REQUEST, "BAD_REQUEST"),
            AnalyticsError::Overflow => (StatusCode::UNPROCESSABLE_ENTITY, "OVERFLOW"),
            AnalyticsError::DegenerateInput(_) => (StatusCode::UNPROCESSABLE_ENTITY, "DEGENERATE_INPUT"),
        };
        Self::new(status, code, e.to_string())
    }
}

impl From<SarimaError> for ApiError {
    fn from(e: SarimaError) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, e.code(), e.to_string())
    }
}
