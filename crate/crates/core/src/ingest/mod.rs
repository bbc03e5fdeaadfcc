//! Register file ingestion (CSV) and tabular export.

mod headers;
mod table;

pub use headers::{normalize_header, Column, HeaderMapping};
pub use table::{export_csv, Table, Tabular, SUMMARY_METRIC_COLUMNS};

use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};

use chrono::{DateTime, Utc};
use csv::ReaderBuilder;
use rust_decimal::Decimal;
use serde::Serialize;
use thiserror::Error;

use crate::model::{validate_record, InsuranceRecord};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IngestError {
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),
    #[error("input has no data rows")]
    EmptyInput,
    #[error("input is not valid UTF-8 (first bad byte at offset {0})")]
    EncodingError(usize),
    #[error("malformed CSV: {0}")]
    Malformed(String),
    #[error("invalid header mapping: {0}")]
    InvalidMapping(String),
}

/// Process-unique dataset identifier; never reused within a process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct DatasetId(pub u64);

impl DatasetId {
    fn next() -> Self {
        static NEXT: AtomicU64 = AtomicU64::new(1);
        DatasetId(NEXT.fetch_add(1, Ordering::Relaxed))
    }
}

impl std::fmt::Display for DatasetId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// A problem with one data row (1-based, header excluded).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowIssue {
    pub row: usize,
    pub message: String,
}

/// Parsed register: valid records plus the rows that were set aside.
#[derive(Debug, Clone, Serialize)]
pub struct Dataset {
    pub id: DatasetId,
    pub source_name: String,
    pub ingested_at: DateTime<Utc>,
    pub records: Vec<InsuranceRecord>,
    pub row_errors: Vec<RowIssue>,
    /// Accepted rows that carry validation warnings.
    pub row_warnings: Vec<RowIssue>,
}

impl Dataset {
    pub fn data_row_count(&self) -> usize {
        self.records.len() + self.row_errors.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum FileFormat {
    Csv,
    Unsupported(String),
}

/// Classifies a file by extension; only `.csv` (any case) is readable.
pub fn detect_format(file_name: &str) -> FileFormat {
    let ext = Path::new(file_name)
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or("");
    if ext.eq_ignore_ascii_case("csv") {
        FileFormat::Csv
    } else {
        FileFormat::Unsupported(ext.to_string())
    }
}

const BOM: &[u8] = b"\xEF\xBB\xBF";

pub(crate) fn decode_utf8(bytes: &[u8]) -> Result<&str, IngestError> {
    let bytes = bytes.strip_prefix(BOM).unwrap_or(bytes);
    std::str::from_utf8(bytes).map_err(|e| IngestError::EncodingError(e.valid_up_to()))
}

fn parse_decimal(raw: &str) -> Result<Decimal, String> {
    let s = raw.trim();
    let body = s.strip_prefix(['-', '+']).unwrap_or(s);
    let (int, frac) = match body.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (body, None),
    };
    let digits = |p: &str| !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit());
    if !digits(int) || frac.is_some_and(|f| !digits(f)) {
        return Err(format!("'{raw}' is not a plain decimal number"));
    }
    Decimal::from_str_exact(s).map_err(|e| format!("'{raw}': {e}"))
}

fn parse_count(raw: &str) -> Result<i128, String> {
    let s = raw.trim();
    let body = s.strip_prefix(['-', '+']).unwrap_or(s);
    if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("'{raw}' is not a whole number"));
    }
    s.parse::<i128>().map_err(|e| format!("'{raw}': {e}"))
}

/// Parses a register CSV. Rows that fail to parse or validate are reported
/// in `row_errors` and skipped; all other rows keep their input order.
pub fn parse_csv(
    bytes: &[u8],
    mapping: &HeaderMapping,
    source_name: &str,
) -> Result<Dataset, IngestError> {
    let text = decode_utf8(bytes)?;
    let mut reader = ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut rows = reader.records();

    let header: Vec<String> = match rows.next() {
        None => return Err(IngestError::EmptyInput),
        Some(h) => h
            .map_err(|e| IngestError::Malformed(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect(),
    };
    let index = mapping.locate(&header)?;

    let mut records = Vec::new();
    let mut row_errors = Vec::new();
    let mut row_warnings = Vec::new();
    let mut data_rows = 0usize;
    for (i, row) in rows.enumerate() {
        let row_no = i + 1;
        data_rows = row_no;
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                row_errors.push(RowIssue {
                    row: row_no,
                    message: e.to_string(),
                });
                continue;
            }
        };
        match record_from_row(&row, &index) {
            Ok(record) => {
                let report = validate_record(&record);
                if report.is_valid() {
                    if !report.warnings.is_empty() {
                        row_warnings.push(RowIssue {
                            row: row_no,
                            message: report.warnings.join("; "),
                        });
                    }
                    records.push(record);
                } else {
                    let message = report
                        .violations
                        .iter()
                        .map(ToString::to_string)
                        .collect::<Vec<_>>()
                        .join("; ");
                    row_errors.push(RowIssue {
                        row: row_no,
                        message,
                    });
                }
            }
            Err(message) => row_errors.push(RowIssue {
                row: row_no,
                message,
            }),
        }
    }
    if data_rows == 0 {
        return Err(IngestError::EmptyInput);
    }

    Ok(Dataset {
        id: DatasetId::next(),
        source_name: source_name.to_string(),
        ingested_at: Utc::now(),
        records,
        row_errors,
        row_warnings,
    })
}

fn record_from_row(row: &csv::StringRecord, index: &[usize; 9]) -> Result<InsuranceRecord, String> {
    let mut problems = Vec::new();
    let cell = |col: Column| row.get(index[col as usize]);
    let text = |col: Column, problems: &mut Vec<String>| match cell(col) {
        Some(v) => v.to_string(),
        None => {
            problems.push(format!("{col}: missing field"));
            String::new()
        }
    };
    let number = |col: Column, problems: &mut Vec<String>| match cell(col).map(parse_decimal) {
        Some(Ok(v)) => v,
        Some(Err(e)) => {
            problems.push(format!("{col}: {e}"));
            Decimal::ZERO
        }
        None => {
            problems.push(format!("{col}: missing field"));
            Decimal::ZERO
        }
    };

    let campaign_year = text(Column::Year, &mut problems);
    let province = text(Column::Province, &mut problems);
    let district = text(Column::District, &mut problems);
    let statistical_sector = text(Column::SectorEst, &mut problems);
    let crop_name = text(Column::NomCrop, &mut problems);
    let sown_area_has = number(Column::AreaSemHas, &mut problems);
    let insured_area_has = number(Column::AreaAsegHas, &mut problems);
    let indemnity_amount_soles = number(Column::AmountIndSoles, &mut problems);
    let producers_benefited = match cell(Column::NumProdBenif).map(parse_count) {
        Some(Ok(n)) if n < 0 => {
            problems.push("producers_benefited must be ≥ 0".to_string());
            0
        }
        Some(Ok(n)) => match u64::try_from(n) {
            Ok(n) => n,
            Err(_) => {
                problems.push(format!("{}: value too large", Column::NumProdBenif));
                0
            }
        },
        Some(Err(e)) => {
            problems.push(format!("{}: {e}", Column::NumProdBenif));
            0
        }
        None => {
            problems.push(format!("{}: missing field", Column::NumProdBenif));
            0
        }
    };

    if !problems.is_empty() {
        return Err(problems.join("; "));
    }
    Ok(InsuranceRecord {
        campaign_year,
        province,
        district,
        statistical_sector,
        crop_name,
        sown_area_has,
        insured_area_has,
        indemnity_amount_soles,
        producers_benefited,
    })
}
