//! Group-by consolidation, filtering, and indemnity arithmetic over register
//! records. All money and area totals use exact decimal arithmetic.

mod indemnity;
mod series;
mod summary;

pub use indemnity::{indemnity_due, rate_audit, RateAudit, RateConfig, RateMatch, RecordAudit};
pub use series::{build_series, PeriodSource, SeriesSpec};
pub use summary::{correlation, summarize, top_k, Summary, SummaryRow, Totals};

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::InsuranceRecord;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalyticsError {
    #[error("at least one grouping dimension is required")]
    NoDimensions,
    #[error("dimension {0} appears more than once")]
    DuplicateDimension(Dimension),
    #[error("unknown dimension '{0}'")]
    UnknownDimension(String),
    #[error("unknown metric '{0}'")]
    UnknownMetric(String),
    #[error("filter on {0} accepts no values")]
    EmptyFilter(Dimension),
    #[error("malformed filter '{0}', expected <dimension>=<value> or <dimension>:<value>")]
    MalformedFilter(String),
    #[error("indemnity rate must be > 0, got {0}")]
    InvalidRate(Decimal),
    #[error("at least one candidate rate is required")]
    NoRates,
    #[error("insured area must be ≥ 0, got {0}")]
    NegativeArea(Decimal),
    #[error("decimal overflow")]
    Overflow,
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
}

/// Categorical columns a summary can be keyed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dimension {
    Campaign,
    Province,
    District,
    Sector,
    Crop,
}

impl Dimension {
    pub const ALL: [Dimension; 5] = [
        Dimension::Campaign,
        Dimension::Province,
        Dimension::District,
        Dimension::Sector,
        Dimension::Crop,
    ];

    pub fn value_of<'a>(&self, record: &'a InsuranceRecord) -> &'a str {
        match self {
            Dimension::Campaign => &record.campaign_year,
            Dimension::Province => &record.province,
            Dimension::District => &record.district,
            Dimension::Sector => &record.statistical_sector,
            Dimension::Crop => &record.crop_name,
        }
    }

    /// Column header used when a summary is exported.
    pub fn column_name(&self) -> &'static str {
        match self {
            Dimension::Campaign => "YEAR",
            Dimension::Province => "PROVINCE",
            Dimension::District => "DISTRICT",
            Dimension::Sector => "SECTOR_EST",
            Dimension::Crop => "NOM_CROP",
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Dimension::Campaign => "campaign",
            Dimension::Province => "province",
            Dimension::District => "district",
            Dimension::Sector => "sector",
            Dimension::Crop => "crop",
        }
    }

    /// Parses a comma-separated list such as `"province,crop"`.
    pub fn parse_list(list: &str) -> Result<Vec<Dimension>, AnalyticsError> {
        list.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::parse)
            .collect()
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Dimension {
    type Err = AnalyticsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "campaign" | "year" | "campaign_year" => Ok(Dimension::Campaign),
            "province" => Ok(Dimension::Province),
            "district" => Ok(Dimension::District),
            "sector" | "statistical_sector" | "sector_est" => Ok(Dimension::Sector),
            "crop" | "crop_name" | "nom_crop" => Ok(Dimension::Crop),
            _ => Err(AnalyticsError::UnknownDimension(s.to_string())),
        }
    }
}

/// Numeric column a summary can be ranked or correlated on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Sown,
    Insured,
    Indemnity,
    Producers,
}

impl Metric {
    pub fn of_record(&self, record: &InsuranceRecord) -> Decimal {
        match self {
            Metric::Sown => record.sown_area_has,
            Metric::Insured => record.insured_area_has,
            Metric::Indemnity => record.indemnity_amount_soles,
            Metric::Producers => Decimal::from(record.producers_benefited),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Metric::Sown => "sown",
            Metric::Insured => "insured",
            Metric::Indemnity => "indemnity",
            Metric::Producers => "producers",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = AnalyticsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sown" | "sown_area" | "area_sem_has" => Ok(Metric::Sown),
            "insured" | "insured_area" | "area_aseg_has" => Ok(Metric::Insured),
            "indemnity" | "amount" | "amount_ind_soles" => Ok(Metric::Indemnity),
            "producers" | "num_prod_benif" => Ok(Metric::Producers),
            _ => Err(AnalyticsError::UnknownMetric(s.to_string())),
        }
    }
}

/// Case-insensitive, whitespace-trimmed, accent-preserving comparison key.
pub fn match_key(value: &str) -> String {
    value.trim().to_uppercase()
}

/// Keeps records whose `dimension` value is one of `accepted_values`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Filter {
    dimension: Dimension,
    accepted: BTreeSet<String>,
}

impl Filter {
    pub fn new<I, S>(dimension: Dimension, accepted_values: I) -> Result<Self, AnalyticsError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let accepted: BTreeSet<String> = accepted_values
            .into_iter()
            .map(|v| match_key(v.as_ref()))
            .collect();
        if accepted.is_empty() {
            return Err(AnalyticsError::EmptyFilter(dimension));
        }
        Ok(Self {
            dimension,
            accepted,
        })
    }

    pub fn dimension(&self) -> Dimension {
        self.dimension
    }

    pub fn accepts(&self, record: &InsuranceRecord) -> bool {
        self.accepted.contains(&match_key(self.dimension.value_of(record)))
    }

    /// Parses `dim=value` / `dim:value` terms. Values for the same dimension
    /// are OR-ed into one filter; different dimensions are AND-ed.
    pub fn parse_terms<I, S>(terms: I) -> Result<Vec<Filter>, AnalyticsError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut by_dim: Vec<(Dimension, Vec<String>)> = Vec::new();
        for term in terms {
            let term = term.as_ref().trim();
            if term.is_empty() {
                continue;
            }
            let (dim, value) = term
                .split_once('=')
                .or_else(|| term.split_once(':'))
                .ok_or_else(|| AnalyticsError::MalformedFilter(term.to_string()))?;
            let dim: Dimension = dim.parse()?;
            match by_dim.iter_mut().find(|(d, _)| *d == dim) {
                Some((_, values)) => values.push(value.to_string()),
                None => by_dim.push((dim, vec![value.to_string()])),
            }
        }
        by_dim
            .into_iter()
            .map(|(dim, values)| Filter::new(dim, values))
            .collect()
    }
}

pub(crate) fn passes_all(filters: &[Filter], record: &InsuranceRecord) -> bool {
    filters.iter().all(|f| f.accepts(record))
}
