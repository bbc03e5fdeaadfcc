use csv::{QuoteStyle, ReaderBuilder, Terminator, WriterBuilder};
use serde::Serialize;

use super::headers::Column;
use super::IngestError;
use crate::analytics::{Summary, SummaryRow};
use crate::model::InsuranceRecord;

/// A rectangular table of already-rendered cells.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Reads any CSV written under the export contract back into cells.
    pub fn from_csv(bytes: &[u8]) -> Result<Self, IngestError> {
        let text = super::decode_utf8(bytes)?;
        let mut reader = ReaderBuilder::new()
            .has_headers(true)
            .flexible(false)
            .from_reader(text.as_bytes());
        let columns = reader
            .headers()
            .map_err(|e| IngestError::Malformed(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        let rows = reader
            .records()
            .map(|r| {
                r.map(|rec| rec.iter().map(str::to_string).collect())
                    .map_err(|e| IngestError::Malformed(e.to_string()))
            })
            .collect::<Result<_, _>>()?;
        Ok(Self { columns, rows })
    }
}

/// Anything that can be laid out as a [`Table`] for export.
pub trait Tabular {
    fn to_table(&self) -> Table;
}

impl Tabular for Table {
    fn to_table(&self) -> Table {
        self.clone()
    }
}

impl Tabular for [InsuranceRecord] {
    fn to_table(&self) -> Table {
        let mut table = Table::new(Column::ALL.iter().map(|c| c.canonical().to_string()).collect());
        for r in self {
            table.push_row(vec![
                r.campaign_year.clone(),
                r.province.clone(),
                r.district.clone(),
                r.statistical_sector.clone(),
                r.crop_name.clone(),
                r.sown_area_has.to_string(),
                r.insured_area_has.to_string(),
                r.indemnity_amount_soles.to_string(),
                r.producers_benefited.to_string(),
            ]);
        }
        table
    }
}

impl Tabular for Vec<InsuranceRecord> {
    fn to_table(&self) -> Table {
        self.as_slice().to_table()
    }
}

pub const SUMMARY_METRIC_COLUMNS: [&str; 5] = [
    "TOTAL_SOWN_HAS",
    "TOTAL_INSURED_HAS",
    "TOTAL_INDEMNITY_SOLES",
    "TOTAL_PRODUCERS",
    "RECORD_COUNT",
];

fn summary_row_cells(row: &SummaryRow) -> Vec<String> {
    let t = &row.totals;
    row.group_key
        .iter()
        .map(|g| g.value.clone())
        .chain([
            t.total_sown_has.to_string(),
            t.total_insured_has.to_string(),
            t.total_indemnity_soles.to_string(),
            t.total_producers.to_string(),
            t.record_count.to_string(),
        ])
        .collect()
}

/// Summary rows only; the grand total is not written so the file re-sums cleanly.
impl Tabular for Summary {
    fn to_table(&self) -> Table {
        let columns = self
            .dimensions
            .iter()
            .map(|d| d.column_name().to_string())
            .chain(SUMMARY_METRIC_COLUMNS.iter().map(|s| s.to_string()))
            .collect();
        let mut table = Table::new(columns);
        for row in &self.rows {
            table.push_row(summary_row_cells(row));
        }
        table
    }
}

/// Writes RFC-4180 CSV: comma delimiter, LF line endings, quotes only when a
/// field holds a comma, quote, or line break.
pub fn export_csv<T: Tabular + ?Sized>(rows: &T) -> Vec<u8> {
    let table = rows.to_table();
    let mut writer = WriterBuilder::new()
        .terminator(Terminator::Any(b'\n'))
        .quote_style(QuoteStyle::Necessary)
        .from_writer(Vec::new());
    writer
        .write_record(&table.columns)
        .and_then(|_| table.rows.iter().try_for_each(|r| writer.write_record(r)))
        .expect("writing to memory cannot fail");
    writer.into_inner().expect("flushing to memory cannot fail")
}
