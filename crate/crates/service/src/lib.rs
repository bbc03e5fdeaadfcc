//! HTTP JSON API over the analytics engine, backed by an in-memory store.
//!
//! Money and area values travel as decimal strings; counts as integers.
//! Every error response has the shape `{"code": ..., "message": ...}` with
//! `code` drawn from [`ERROR_CODES`].

mod error;
mod store;

pub use error::{ApiError, ERROR_CODES};
pub use store::DatasetStore;

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::{to_bytes, Body};
use axum::extract::{DefaultBodyLimit, Path, Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use catastroagri_core::analytics::{
    build_series, rate_audit, summarize, top_k, Dimension, Filter, Metric, PeriodSource, RateConfig, RateMatch,
    SeriesSpec, Summary,
};
use catastroagri_core::ingest::{
    detect_format, export_csv, parse_csv, Column, Dataset, DatasetId, FileFormat, HeaderMapping, RowIssue,
};
use catastroagri_core::model::InsuranceRecord;
use catastroagri_core::sarima::{
    fit, forecast, linear_trend_forecast, qq_data, validate, Coefficient, DiagnosticsReport, ForecastResult,
    SarimaSpec,
};
use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};
use tower_http::services::ServeDir;

pub const MAX_UPLOAD_ENV: &str = "CATASTROAGRI_MAX_UPLOAD_BYTES";
pub const DEFAULT_MAX_UPLOAD_BYTES: usize = 50 * 1024 * 1024;
pub const DEFAULT_MAX_DATASETS: usize = 32;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub max_upload_bytes: usize,
    pub max_datasets: usize,
    /// Directory of static UI assets served for unmatched paths.
    pub ui_dir: Option<PathBuf>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            max_upload_bytes: DEFAULT_MAX_UPLOAD_BYTES,
            max_datasets: DEFAULT_MAX_DATASETS,
            ui_dir: None,
        }
    }
}

impl ServiceConfig {
    /// Defaults, with the upload cap taken from the environment when set.
    pub fn from_env() -> Result<Self, String> {
        let mut config = Self::default();
        if let Ok(raw) = std::env::var(MAX_UPLOAD_ENV) {
            config.max_upload_bytes = raw
                .trim()
                .parse()
                .map_err(|_| format!("{MAX_UPLOAD_ENV} must be a byte count, got '{raw}'"))?;
        }
        Ok(config)
    }
}

#[derive(Debug)]
struct AppState {
    store: DatasetStore,
    max_upload_bytes: usize,
}

type Shared = State<Arc<AppState>>;

pub fn router(config: ServiceConfig) -> Router {
    let state = Arc::new(AppState {
        store: DatasetStore::new(config.max_datasets),
        max_upload_bytes: config.max_upload_bytes,
    });
    let api = Router::new()
        .route("/health", get(health))
        .route("/datasets", post(upload).get(list_datasets))
        .route("/datasets/:id", get(dataset_info))
        .route("/datasets/:id/records", get(records))
        .route("/datasets/:id/summary", get(summary))
        .route("/datasets/:id/audit", get(audit))
        .route("/datasets/:id/forecast", post(forecast_handler))
        .route("/datasets/:id/export.csv", get(export))
        .layer(DefaultBodyLimit::disable())
        .with_state(state);
    match config.ui_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

pub async fn serve(addr: SocketAddr, config: ServiceConfig) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(config)).await
}

#[derive(Serialize)]
struct Health {
    status: &'static str,
    version: &'static str,
}

async fn health() -> Json<Health> {
    Json(Health {
        status: "ok",
        version: env!("CARGO_PKG_VERSION"),
    })
}

#[derive(Serialize)]
struct DatasetInfo {
    id: DatasetId,
    source_name: String,
    ingested_at: String,
    record_count: usize,
    row_error_count: usize,
    row_errors: Vec<RowIssue>,
    row_warnings: Vec<RowIssue>,
    columns: Vec<&'static str>,
}

impl DatasetInfo {
    fn of(ds: &Dataset) -> Self {
        Self {
            id: ds.id,
            source_name: ds.source_name.clone(),
            ingested_at: ds.ingested_at.to_rfc3339(),
            record_count: ds.records.len(),
            row_error_count: ds.row_errors.len(),
            row_errors: ds.row_errors.clone(),
            row_warnings: ds.row_warnings.clone(),
            columns: Column::ALL.iter().map(|c| c.canonical()).collect(),
        }
    }
}

#[derive(Deserialize)]
struct UploadParams {
    name: Option<String>,
}

async fn upload(
    State(state): Shared,
    Query(params): Query<UploadParams>,
    headers: HeaderMap,
    body: Body,
) -> Result<(StatusCode, Json<DatasetInfo>), ApiError> {
    let cap = state.max_upload_bytes;
    let too_large = || {
        ApiError::new(
            StatusCode::PAYLOAD_TOO_LARGE,
            "PAYLOAD_TOO_LARGE",
            format!("upload exceeds {cap} bytes"),
        )
    };
    let declared = headers
        .get(header::CONTENT_LENGTH)
        .and_then(|v| v.to_str().ok())
        .and_then(|v| v.parse::<usize>().ok());
    if declared.is_some_and(|n| n > cap) {
        return Err(too_large());
    }
    let bytes = to_bytes(body, cap).await.map_err(|_| too_large())?;

    let name = params.name.unwrap_or_else(|| "upload.csv".to_string());
    if let FileFormat::Unsupported(ext) = detect_format(&name) {
        return Err(ApiError::bad_request(
            "UNSUPPORTED_FORMAT",
            format!("only CSV files are accepted (got '.{ext}')"),
        ));
    }
    if bytes.is_empty() {
        return Err(ApiError::bad_request("EMPTY_INPUT", "request body is empty"));
    }
    let dataset = parse_csv(&bytes, &HeaderMapping::default(), &name)?;
    let stored = state.store.insert(dataset);
    Ok((StatusCode::CREATED, Json(DatasetInfo::of(&stored))))
}

async fn list_datasets(State(state): Shared) -> Json<Vec<DatasetInfo>> {
    Json(state.store.list().iter().map(|d| DatasetInfo::of(d)).collect())
}

fn lookup(state: &AppState, id: u64) -> Result<Arc<Dataset>, ApiError> {
    state.store.get(DatasetId(id)).ok_or(ApiError::unknown_dataset(id))
}

async fn dataset_info(State(state): Shared, Path(id): Path<u64>) -> Result<Json<DatasetInfo>, ApiError> {
    let ds = lookup(&state, id)?;
    Ok(Json(DatasetInfo::of(&ds)))
}

#[derive(Deserialize)]
struct RecordsParams {
    offset: Option<usize>,
    limit: Option<usize>,
}

#[derive(Serialize)]
struct RecordsPage {
    total: usize,
    offset: usize,
    records: Vec<InsuranceRecord>,
}

async fn records(
    State(state): Shared,
    Path(id): Path<u64>,
    Query(params): Query<RecordsParams>,
) -> Result<Json<RecordsPage>, ApiError> {
    let ds = lookup(&state, id)?;
    let offset = params.offset.unwrap_or(0);
    let limit = params.limit.unwrap_or(100);
    Ok(Json(RecordsPage {
        total: ds.records.len(),
        offset,
        records: ds.records.iter().skip(offset).take(limit).cloned().collect(),
    }))
}

#[derive(Deserialize)]
struct SummaryParams {
    by: Option<String>,
    /// Comma-separated `dim:value` (or `dim=value`) terms.
    filter: Option<String>,
    top: Option<usize>,
    metric: Option<String>,
}

fn parse_filters(raw: Option<&str>) -> Result<Vec<Filter>, ApiError> {
    match raw {
        None => Ok(Vec::new()),
        Some(raw) => Ok(Filter::parse_terms(raw.split(','))?),
    }
}

fn parse_by(raw: Option<&str>) -> Result<Vec<Dimension>, ApiError> {
    Ok(Dimension::parse_list(raw.unwrap_or(""))?)
}

fn compute_summary(ds: &Dataset, params: &SummaryParams) -> Result<Summary, ApiError> {
    let by = parse_by(params.by.as_deref())?;
    let filters = parse_filters(params.filter.as_deref())?;
    let mut summary = summarize(&ds.records, &by, &filters)?;
    if let Some(k) = params.top {
        let metric: Metric = params.metric.as_deref().unwrap_or("indemnity").parse()?;
        summary.rows = top_k(&summary.rows, metric, k);
    } else if let Some(m) = &params.metric {
        m.parse::<Metric>()?;
    }
    Ok(summary)
}

async fn summary(
    State(state): Shared,
    Path(id): Path<u64>,
    Query(params): Query<SummaryParams>,
) -> Result<Json<Summary>, ApiError> {
    let ds = lookup(&state, id)?;
    Ok(Json(compute_summary(&ds, &params)?))
}

#[derive(Deserialize)]
struct AuditParams {
    rates: Option<String>,
}

#[derive(Serialize)]
struct AuditResponse {
    /// Rate → number of determinate records it reproduces exactly.
    matches: BTreeMap<String, usize>,
    per_rate: Vec<RateMatch>,
    records_checked: usize,
    unmatched: Vec<usize>,
    indeterminate: Vec<usize>,
}

fn parse_rates(raw: Option<&str>) -> Result<Vec<Decimal>, ApiError> {
    let Some(raw) = raw else {
        return Ok(RateConfig::bundled().candidate_rates());
    };
    raw.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<Decimal>()
                .map_err(|_| ApiError::bad_request("INVALID_RATE", format!("'{s}' is not a decimal rate")))
        })
        .collect()
}

async fn audit(
    State(state): Shared,
    Path(id): Path<u64>,
    Query(params): Query<AuditParams>,
) -> Result<Json<AuditResponse>, ApiError> {
    let ds = lookup(&state, id)?;
    let rates = parse_rates(params.rates.as_deref())?;
    let result = rate_audit(&ds.records, &rates)?;
    Ok(Json(AuditResponse {
        matches: result.per_rate.iter().map(|m| (m.rate.to_string(), m.matched)).collect(),
        per_rate: result.per_rate,
        records_checked: ds.records.len(),
        unmatched: result.unmatched,
        indeterminate: result.indeterminate,
    }))
}

#[derive(Debug, Deserialize)]
pub struct SeriesSpecBody {
    pub metric: String,
    #[serde(default)]
    pub group_filter: Vec<String>,
    /// A dimension name, `record_order`, or absent for campaigns ascending.
    #[serde(default)]
    pub period_column: Option<String>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodBody {
    Sarima,
    Linear,
}

#[derive(Debug, Deserialize)]
pub struct ForecastBody {
    pub series_spec: SeriesSpecBody,
    pub method: MethodBody,
    #[serde(default = "default_s")]
    pub s: usize,
    pub h: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
}

fn default_s() -> usize {
    12
}

fn default_alpha() -> f64 {
    0.05
}

#[derive(Serialize)]
struct SeriesOut {
    labels: Vec<String>,
    values: Vec<f64>,
}

#[derive(Serialize)]
struct FitSummary {
    theta: Coefficient<f64>,
    seasonal_theta: Coefficient<f64>,
    composite: f64,
    sigma2: f64,
    css: f64,
    residual_count: usize,
    evaluations: usize,
}

#[derive(Serialize)]
struct ForecastResponse {
    series: SeriesOut,
    forecast: ForecastResult<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fit: Option<FitSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    diagnostics: Option<DiagnosticsReport<f64>>,
    /// (theoretical quantile, ordered residual) pairs.
    #[serde(skip_serializing_if = "Option::is_none")]
    qq: Option<Vec<(f64, f64)>>,
}

fn series_spec(body: &ForecastBody) -> Result<SeriesSpec, ApiError> {
    let spec = &body.series_spec;
    let period = match spec.period_column.as_deref().map(str::trim) {
        None | Some("") => PeriodSource::Campaign,
        Some("record_order") | Some("order") => PeriodSource::RecordOrder,
        Some(col) => match col.parse::<Dimension>()? {
            Dimension::Campaign => PeriodSource::Campaign,
            d => PeriodSource::Column(d),
        },
    };
    Ok(SeriesSpec {
        metric: spec.metric.parse()?,
        filters: Filter::parse_terms(&spec.group_filter)?,
        period,
        seasonal_period: body.s,
    })
}

fn run_forecast(ds: &Dataset, body: &ForecastBody) -> Result<ForecastResponse, ApiError> {
    if !(body.alpha > 0.0 && body.alpha < 1.0) {
        return Err(ApiError::bad_request("BAD_REQUEST", "alpha must lie in (0, 1)"));
    }
    if body.s == 0 {
        return Err(ApiError::bad_request("BAD_REQUEST", "s must be ≥ 1"));
    }
    let spec = series_spec(body)?;
    let series = build_series(&ds.records, &spec)?;
    let series_out = SeriesOut {
        labels: series.labels().to_vec(),
        values: series.values().to_vec(),
    };
    match body.method {
        MethodBody::Linear => Ok(ForecastResponse {
            forecast: linear_trend_forecast(&series, body.h)?,
            series: series_out,
            fit: None,
            diagnostics: None,
            qq: None,
        }),
        MethodBody::Sarima => {
            if body.h < 1 {
                return Err(ApiError::from(catastroagri_core::sarima::SarimaError::HorizonInvalid));
            }
            let fitted = fit(&series, SarimaSpec::airline(body.s))?;
            let diagnostics = validate(&fitted, body.alpha);
            let points = forecast(&series, &fitted, body.h)?;
            let qq = qq_data(fitted.scored_residuals())?;
            Ok(ForecastResponse {
                series: series_out,
                forecast: points,
                fit: Some(FitSummary {
                    theta: fitted.ma,
                    seasonal_theta: fitted.seasonal_ma,
                    composite: fitted.composite,
                    sigma2: fitted.sigma2,
                    css: fitted.css,
                    residual_count: fitted.m,
                    evaluations: fitted.evaluations,
                }),
                diagnostics: Some(diagnostics),
                qq: Some(qq),
            })
        }
    }
}

async fn forecast_handler(
    State(state): Shared,
    Path(id): Path<u64>,
    body: Result<Json<ForecastBody>, axum::extract::rejection::JsonRejection>,
) -> Result<Json<ForecastResponse>, ApiError> {
    let Json(body) = body.map_err(|e| ApiError::bad_request("BAD_REQUEST", e.body_text()))?;
    let ds = lookup(&state, id)?;
    let response = tokio::task::spawn_blocking(move || run_forecast(&ds, &body))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "INTERNAL", e.to_string()))??;
    Ok(Json(response))
}

#[derive(Deserialize)]
struct ExportParams {
    by: Option<String>,
    filter: Option<String>,
}

async fn export(
    State(state): Shared,
    Path(id): Path<u64>,
    Query(params): Query<ExportParams>,
) -> Result<Response, ApiError> {
    let ds = lookup(&state, id)?;
    let (bytes, file_name) = match params.by.as_deref() {
        None | Some("") => {
            let filters = parse_filters(params.filter.as_deref())?;
            let rows: Vec<InsuranceRecord> = ds
                .records
                .iter()
                .filter(|r| filters.iter().all(|f| f.accepts(r)))
                .cloned()
                .collect();
            (export_csv(&rows), format!("dataset-{id}.csv"))
        }
        Some(by) => {
            let summary = compute_summary(
                &ds,
                &SummaryParams {
                    by: Some(by.to_string()),
                    filter: params.filter.clone(),
                    top: None,
                    metric: None,
                },
            )?;
            (export_csv(&summary), format!("dataset-{id}-summary.csv"))
        }
    };
    Ok((
        [
            (header::CONTENT_TYPE, "text/csv; charset=utf-8".to_string()),
            (header::CONTENT_DISPOSITION, format!("attachment; filename=\"{file_name}\"")),
        ],
        bytes,
    )
        .into_response())
}
