use std::collections::HashMap;

use num_traits::ToPrimitive;
use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

use super::{match_key, passes_all, AnalyticsError, Dimension, Filter, Metric};
use crate::model::{compare_campaigns, InsuranceRecord};
use crate::sarima::TimeSeries;

/// How observations are delimited when a register is turned into a series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "column")]
pub enum PeriodSource {
    /// One observation per campaign, campaigns ascending.
    #[default]
    Campaign,
    /// One observation per distinct value of a column, in first-appearance order.
    Column(Dimension),
    /// Every record is its own observation, in register order.
    RecordOrder,
}

#[derive(Debug, Clone)]
pub struct SeriesSpec {
    pub metric: Metric,
    pub filters: Vec<Filter>,
    pub period: PeriodSource,
    pub seasonal_period: usize,
}

impl SeriesSpec {
    pub fn new(metric: Metric) -> Self {
        Self {
            metric,
            filters: Vec::new(),
            period: PeriodSource::Campaign,
            seasonal_period: 12,
        }
    }
}

/// Aggregates `spec.metric` per period into a [`TimeSeries`].
pub fn build_series(
    records: &[InsuranceRecord],
    spec: &SeriesSpec,
) -> Result<TimeSeries<f64>, AnalyticsError> {
    let selected: Vec<&InsuranceRecord> =
        records.iter().filter(|r| passes_all(&spec.filters, r)).collect();
    if selected.is_empty() {
        return Err(AnalyticsError::DegenerateInput(
            "no records remain to build a series from".into(),
        ));
    }

    let mut labels: Vec<String> = Vec::new();
    let mut totals: Vec<Decimal> = Vec::new();
    match spec.period {
        PeriodSource::RecordOrder => {
            for (i, r) in selected.iter().enumerate() {
                labels.push((i + 1).to_string());
                totals.push(spec.metric.of_record(r));
            }
        }
        PeriodSource::Campaign | PeriodSource::Column(_) => {
            let dim = match spec.period {
                PeriodSource::Column(d) => d,
                _ => Dimension::Campaign,
            };
            let mut slot: HashMap<String, usize> = HashMap::new();
            for r in &selected {
                let raw = dim.value_of(r);
                let idx = *slot.entry(match_key(raw)).or_insert_with(|| {
                    labels.push(raw.trim().to_string());
                    totals.push(Decimal::ZERO);
                    labels.len() - 1
                });
                totals[idx] += spec.metric.of_record(r);
            }
            if spec.period == PeriodSource::Campaign {
                let mut pairs: Vec<(String, Decimal)> = labels.into_iter().zip(totals).collect();
                pairs.sort_by(|a, b| compare_campaigns(&a.0, &b.0));
                (labels, totals) = pairs.into_iter().unzip();
            }
        }
    }

    let values = totals
        .iter()
        .map(|d| d.to_f64().ok_or(AnalyticsError::Overflow))
        .collect::<Result<Vec<f64>, _>>()?;
    TimeSeries::new(values, labels, spec.seasonal_period)
        .map_err(|e| AnalyticsError::DegenerateInput(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(campaign: &str, province: &str, insured: i64) -> InsuranceRecord {
        InsuranceRecord {
            campaign_year: campaign.into(),
            province: province.into(),
            district: "D".into(),
            statistical_sector: "S".into(),
            crop_name: "C".into(),
            sown_area_has: Decimal::from(insured),
            insured_area_has: Decimal::from(insured),
            indemnity_amount_soles: Decimal::from(insured * 400),
            producers_benefited: 1,
        }
    }

    fn records() -> Vec<InsuranceRecord> {
        vec![
            rec("2012-2013", "A", 3),
            rec("2010-2011", "B", 1),
            rec("2011-2012", "A", 2),
            rec("2010-2011", "A", 4),
        ]
    }

    #[test]
    fn campaigns_sorted_ascending() {
        let s = build_series(&records(), &SeriesSpec::new(Metric::Insured)).unwrap();
        assert_eq!(s.labels(), ["2010-2011", "2011-2012", "2012-2013"]);
        assert_eq!(s.values(), [5.0, 2.0, 3.0]);
    }

    #[test]
    fn column_period_keeps_first_appearance_order() {
        let spec = SeriesSpec {
            period: PeriodSource::Column(Dimension::Province),
            ..SeriesSpec::new(Metric::Indemnity)
        };
        let s = build_series(&records(), &spec).unwrap();
        assert_eq!(s.labels(), ["A", "B"]);
        assert_eq!(s.values(), [3600.0, 400.0]);
    }

    #[test]
    fn record_order_and_filters() {
        let spec = SeriesSpec {
            period: PeriodSource::RecordOrder,
            filters: vec![Filter::new(Dimension::Province, ["a"]).unwrap()],
            ..SeriesSpec::new(Metric::Producers)
        };
        let s = build_series(&records(), &spec).unwrap();
        assert_eq!(s.values(), [1.0, 1.0, 1.0]);
    }

    #[test]
    fn empty_selection_is_an_error() {
        let spec = SeriesSpec {
            filters: vec![Filter::new(Dimension::Province, ["zzz"]).unwrap()],
            ..SeriesSpec::new(Metric::Insured)
        };
        assert!(build_series(&records(), &spec).is_err());
    }
}
