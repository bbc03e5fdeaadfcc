//! Domain types for the insured-producers register: records, the risk
//! taxonomy, and the loss-notice workflow.

use std::cmp::Ordering;
use std::fmt;

use chrono::NaiveDate;
use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytics::indemnity_due;

/// One row of a campaign register.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InsuranceRecord {
    /// Agricultural campaign, e.g. `"2010-2011"`. Kept opaque; see [`campaign_order_key`].
    pub campaign_year: String,
    pub province: String,
    pub district: String,
    pub statistical_sector: String,
    pub crop_name: String,
    pub sown_area_has: Decimal,
    pub insured_area_has: Decimal,
    pub indemnity_amount_soles: Decimal,
    pub producers_benefited: u64,
}

/// A broken invariant on a single field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub field: &'static str,
    pub rule: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.field, self.rule)
    }
}

/// Outcome of [`validate_record`]. Warnings never make a record invalid.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every [`InsuranceRecord`] invariant and reports all breaches at once.
pub fn validate_record(record: &InsuranceRecord) -> ValidationReport {
    let mut report = ValidationReport::default();

    let text_fields: [(&'static str, &str); 5] = [
        ("campaign_year", &record.campaign_year),
        ("province", &record.province),
        ("district", &record.district),
        ("statistical_sector", &record.statistical_sector),
        ("crop_name", &record.crop_name),
    ];
    for (field, value) in text_fields {
        if value.trim().is_empty() {
            report.violations.push(Violation {
                field,
                rule: "must not be empty".into(),
            });
        }
    }

    let amounts: [(&'static str, Decimal); 3] = [
        ("sown_area_has", record.sown_area_has),
        ("insured_area_has", record.insured_area_has),
        ("indemnity_amount_soles", record.indemnity_amount_soles),
    ];
    for (field, value) in amounts {
        if value.is_sign_negative() && !value.is_zero() {
            report.violations.push(Violation {
                field,
                rule: "must be ≥ 0".into(),
            });
        }
    }

    if record.insured_area_has > record.sown_area_has {
        report.warnings.push("insured exceeds sown".into());
    }
    report
}

/// Ordering key for campaign labels: the leading four-digit year, then the raw label.
pub fn campaign_order_key(campaign: &str) -> (Option<u32>, &str) {
    let trimmed = campaign.trim();
    let year = trimmed
        .get(..4)
        .filter(|y| y.bytes().all(|b| b.is_ascii_digit()))
        .and_then(|y| y.parse().ok());
    (year, trimmed)
}

/// Compares two campaign labels by [`campaign_order_key`].
pub fn compare_campaigns(a: &str, b: &str) -> Ordering {
    campaign_order_key(a).cmp(&campaign_order_key(b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RiskCategory {
    Climatic,
    Biological,
    Other,
}

/// Covered perils. Each kind belongs to exactly one [`RiskCategory`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RiskKind {
    Drought,
    ExcessiveOrUnseasonalRain,
    Landslide,
    Flood,
    LackOfSoilForHarvest,
    ExcessiveHumidity,
    FrostLowTemperature,
    HailSnow,
    HighTemperature,
    StrongWind,
    PestsPredators,
    Disease,
    Fire,
    VolcanicEruption,
    Earthquake,
}

impl RiskKind {
    pub const ALL: [RiskKind; 15] = [
        RiskKind::Drought,
        RiskKind::ExcessiveOrUnseasonalRain,
        RiskKind::Landslide,
        RiskKind::Flood,
        RiskKind::LackOfSoilForHarvest,
        RiskKind::ExcessiveHumidity,
        RiskKind::FrostLowTemperature,
        RiskKind::HailSnow,
        RiskKind::HighTemperature,
        RiskKind::StrongWind,
        RiskKind::PestsPredators,
        RiskKind::Disease,
        RiskKind::Fire,
        RiskKind::VolcanicEruption,
        RiskKind::Earthquake,
    ];

    pub fn category(self) -> RiskCategory {
        use RiskKind::*;
        match self {
            Drought | ExcessiveOrUnseasonalRain | Landslide | Flood | LackOfSoilForHarvest
            | ExcessiveHumidity | FrostLowTemperature | HailSnow | HighTemperature
            | StrongWind => RiskCategory::Climatic,
            PestsPredators | Disease => RiskCategory::Biological,
            Fire | VolcanicEruption | Earthquake => RiskCategory::Other,
        }
    }
}

/// A covered peril. Construct through [`RiskPhenomenon::new`] or `From<RiskKind>`
/// so the category always agrees with the kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct RiskPhenomenon {
    category: RiskCategory,
    kind: RiskKind,
}

impl RiskPhenomenon {
    pub fn new(category: RiskCategory, kind: RiskKind) -> Result<Self, ModelError> {
        if kind.category() != category {
            return Err(ModelError::CategoryMismatch { category, kind });
        }
        Ok(Self { category, kind })
    }

    pub fn category(&self) -> RiskCategory {
        self.category
    }

    pub fn kind(&self) -> RiskKind {
        self.kind
    }
}

impl From<RiskKind> for RiskPhenomenon {
    fn from(kind: RiskKind) -> Self {
        Self {
            category: kind.category(),
            kind,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NoticeStatus {
    Reported,
    FieldEvaluated,
    Adjusted { catastrophic_loss: bool },
    Indemnified { amount_soles: Decimal },
}

impl NoticeStatus {
    /// Position in the Reported → FieldEvaluated → Adjusted → Indemnified chain.
    pub fn stage(&self) -> u8 {
        match self {
            NoticeStatus::Reported => 0,
            NoticeStatus::FieldEvaluated => 1,
            NoticeStatus::Adjusted { .. } => 2,
            NoticeStatus::Indemnified { .. } => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NoticeEvent {
    Evaluate,
    Adjust { catastrophic_loss: bool },
    Indemnify {
        rate_soles_per_ha: Decimal,
        insured_area_has: Decimal,
    },
}

/// A notice of loss filed for a statistical sector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LossNotice {
    statistical_sector: String,
    hectares_affected: Decimal,
    hectares_lost: Decimal,
    phenomenon: RiskPhenomenon,
    vegetative_period: String,
    occurrence_date: NaiveDate,
    status: NoticeStatus,
}

impl LossNotice {
    /// Files a new notice in the `Reported` state.
    pub fn report(
        statistical_sector: impl Into<String>,
        hectares_affected: Decimal,
        hectares_lost: Decimal,
        phenomenon: RiskPhenomenon,
        vegetative_period: impl Into<String>,
        occurrence_date: NaiveDate,
    ) -> Result<Self, ModelError> {
        let statistical_sector = statistical_sector.into();
        if statistical_sector.trim().is_empty() {
            return Err(ModelError::InvalidNotice("statistical_sector must not be empty".into()));
        }
        if hectares_affected.is_sign_negative() && !hectares_affected.is_zero()
            || hectares_lost.is_sign_negative() && !hectares_lost.is_zero()
        {
            return Err(ModelError::InvalidNotice("hectares must be ≥ 0".into()));
        }
        if hectares_lost > hectares_affected {
            return Err(ModelError::InvalidNotice(
                "hectares_lost must not exceed hectares_affected".into(),
            ));
        }
        Ok(Self {
            statistical_sector,
            hectares_affected,
            hectares_lost,
            phenomenon,
            vegetative_period: vegetative_period.into(),
            occurrence_date,
            status: NoticeStatus::Reported,
        })
    }

    pub fn statistical_sector(&self) -> &str {
        &self.statistical_sector
    }

    pub fn hectares_affected(&self) -> Decimal {
        self.hectares_affected
    }

    pub fn hectares_lost(&self) -> Decimal {
        self.hectares_lost
    }

    pub fn phenomenon(&self) -> RiskPhenomenon {
        self.phenomenon
    }

    pub fn vegetative_period(&self) -> &str {
        &self.vegetative_period
    }

    pub fn occurrence_date(&self) -> NaiveDate {
        self.occurrence_date
    }

    pub fn status(&self) -> NoticeStatus {
        self.status
    }
}

/// Applies one workflow event, returning the notice in its new state.
pub fn advance_notice(notice: &LossNotice, event: NoticeEvent) -> Result<LossNotice, ModelError> {
    let next = match (notice.status, event) {
        (NoticeStatus::Reported, NoticeEvent::Evaluate) => NoticeStatus::FieldEvaluated,
        (NoticeStatus::FieldEvaluated, NoticeEvent::Adjust { catastrophic_loss }) => {
            NoticeStatus::Adjusted { catastrophic_loss }
        }
        (
            NoticeStatus::Adjusted {
                catastrophic_loss: true,
            },
            NoticeEvent::Indemnify {
                rate_soles_per_ha,
                insured_area_has,
            },
        ) => {
            let amount_soles = indemnity_due(insured_area_has, rate_soles_per_ha)
                .map_err(|e| ModelError::InvalidNotice(e.to_string()))?;
            NoticeStatus::Indemnified { amount_soles }
        }
        (from, event) => return Err(ModelError::InvalidTransition { from, event }),
    };
    Ok(LossNotice {
        status: next,
        ..notice.clone()
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("risk kind {kind:?} does not belong to category {category:?}")]
    CategoryMismatch { category: RiskCategory, kind: RiskKind },
    #[error("invalid loss notice: {0}")]
    InvalidNotice(String),
    #[error("event {event:?} does not apply to status {from:?}")]
    InvalidTransition { from: NoticeStatus, event: NoticeEvent },
}
