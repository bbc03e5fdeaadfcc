use std::collections::BTreeMap;

use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

use super::AnalyticsError;
use crate::model::InsuranceRecord;

/// Indemnity owed for a catastrophic loss: `rate × insured area`, exactly.
pub fn indemnity_due(
    insured_area_has: Decimal,
    rate_soles_per_ha: Decimal,
) -> Result<Decimal, AnalyticsError> {
    if rate_soles_per_ha <= Decimal::ZERO {
        return Err(AnalyticsError::InvalidRate(rate_soles_per_ha));
    }
    if insured_area_has < Decimal::ZERO {
        return Err(AnalyticsError::NegativeArea(insured_area_has));
    }
    insured_area_has
        .checked_mul(rate_soles_per_ha)
        .ok_or(AnalyticsError::Overflow)
}

/// Soles-per-hectare rate, with optional per-campaign overrides.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RateConfig {
    pub default_rate: Decimal,
    #[serde(default)]
    pub campaigns: BTreeMap<String, Decimal>,
}

impl Default for RateConfig {
    fn default() -> Self {
        Self {
            default_rate: Decimal::from(800),
            campaigns: BTreeMap::new(),
        }
    }
}

impl RateConfig {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Rate configuration documented for the bundled fixtures.
    pub fn bundled() -> Self {
        Self::from_json(crate::fixtures::RATES_JSON).expect("bundled rate metadata is valid")
    }

    pub fn with_campaign(mut self, campaign: impl Into<String>, rate: Decimal) -> Self {
        self.campaigns.insert(campaign.into().trim().to_string(), rate);
        self
    }

    pub fn rate_for(&self, campaign: &str) -> Decimal {
        self.campaigns
            .get(campaign.trim())
            .copied()
            .unwrap_or(self.default_rate)
    }

    /// Every distinct rate in the configuration, ascending.
    pub fn candidate_rates(&self) -> Vec<Decimal> {
        let mut rates: Vec<Decimal> = self.campaigns.values().copied().collect();
        rates.push(self.default_rate);
        rates.sort();
        rates.dedup();
        rates
    }
}

/// Per-record outcome of a rate audit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecordAudit {
    pub record_index: usize,
    pub matching_rates: Vec<Decimal>,
    /// Zero area and zero indemnity: every rate fits, so none is evidenced.
    pub indeterminate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateMatch {
    pub rate: Decimal,
    pub matched: usize,
    /// Records that can discriminate between rates.
    pub determinate: usize,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateAudit {
    pub per_rate: Vec<RateMatch>,
    pub records: Vec<RecordAudit>,
    pub unmatched: Vec<usize>,
    pub indeterminate: Vec<usize>,
}

impl RateAudit {
    pub fn matched(&self, rate: Decimal) -> Option<usize> {
        self.per_rate.iter().find(|m| m.rate == rate).map(|m| m.matched)
    }
}

/// Checks, record by record, which candidate rate reproduces the recorded
/// indemnity exactly.
pub fn rate_audit(
    records: &[InsuranceRecord],
    candidate_rates: &[Decimal],
) -> Result<RateAudit, AnalyticsError> {
    if candidate_rates.is_empty() {
        return Err(AnalyticsError::NoRates);
    }
    if let Some(bad) = candidate_rates.iter().find(|r| **r <= Decimal::ZERO) {
        return Err(AnalyticsError::InvalidRate(*bad));
    }

    let mut audits = Vec::with_capacity(records.len());
    let mut unmatched = Vec::new();
    let mut indeterminate = Vec::new();
    for (record_index, r) in records.iter().enumerate() {
        let is_indeterminate =
            r.insured_area_has.is_zero() && r.indemnity_amount_soles.is_zero();
        let matching_rates: Vec<Decimal> = candidate_rates
            .iter()
            .copied()
            .filter(|&rate| {
                r.insured_area_has
                    .checked_mul(rate)
                    .is_some_and(|due| due == r.indemnity_amount_soles)
            })
            .collect();
        if is_indeterminate {
            indeterminate.push(record_index);
        } else if matching_rates.is_empty() {
            unmatched.push(record_index);
        }
        audits.push(RecordAudit {
            record_index,
            matching_rates,
            indeterminate: is_indeterminate,
        });
    }

    let determinate = records.len() - indeterminate.len();
    let per_rate = candidate_rates
        .iter()
        .map(|&rate| {
            let matched = audits
                .iter()
                .filter(|a| !a.indeterminate && a.matching_rates.contains(&rate))
                .count();
            RateMatch {
                rate,
                matched,
                determinate,
                fraction: if determinate == 0 {
                    0.0
                } else {
                    matched as f64 / determinate as f64
                },
            }
        })
        .collect();

    Ok(RateAudit {
        per_rate,
        records: audits,
        unmatched,
        indeterminate,
    })
}
