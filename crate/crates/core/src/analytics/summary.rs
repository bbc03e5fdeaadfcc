use std::collections::BTreeMap;

use num_traits::ToPrimitive;
use rust_decimal::Decimal;
use serde::Serialize;

use super::{match_key, passes_all, AnalyticsError, Dimension, Filter, Metric};
use crate::model::InsuranceRecord;

/// Column totals over a set of records.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Totals {
    #[serde(rename = "sown")]
    pub total_sown_has: Decimal,
    #[serde(rename = "insured")]
    pub total_insured_has: Decimal,
    #[serde(rename = "indemnity")]
    pub total_indemnity_soles: Decimal,
    #[serde(rename = "producers")]
    pub total_producers: u64,
    pub record_count: u64,
}

impl Totals {
    fn add_record(&mut self, r: &InsuranceRecord) {
        self.total_sown_has += r.sown_area_has;
        self.total_insured_has += r.insured_area_has;
        self.total_indemnity_soles += r.indemnity_amount_soles;
        self.total_producers += r.producers_benefited;
        self.record_count += 1;
    }

    fn add(&mut self, other: &Totals) {
        self.total_sown_has += other.total_sown_has;
        self.total_insured_has += other.total_insured_has;
        self.total_indemnity_soles += other.total_indemnity_soles;
        self.total_producers += other.total_producers;
        self.record_count += other.record_count;
    }

    pub fn metric(&self, metric: Metric) -> Decimal {
        match metric {
            Metric::Sown => self.total_sown_has,
            Metric::Insured => self.total_insured_has,
            Metric::Indemnity => self.total_indemnity_soles,
            Metric::Producers => Decimal::from(self.total_producers),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupValue {
    pub dimension: Dimension,
    pub value: String,
}

/// Totals for one combination of grouping values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SummaryRow {
    pub group_key: Vec<GroupValue>,
    #[serde(flatten)]
    pub totals: Totals,
}

impl SummaryRow {
    /// Normalized key used for ordering and tie-breaks.
    fn sort_key(&self) -> Vec<String> {
        self.group_key.iter().map(|g| match_key(&g.value)).collect()
    }

    pub fn label(&self) -> String {
        self.group_key
            .iter()
            .map(|g| g.value.as_str())
            .collect::<Vec<_>>()
            .join(" / ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub dimensions: Vec<Dimension>,
    pub rows: Vec<SummaryRow>,
    pub grand_total: Totals,
}

impl Summary {
    /// True when the filters removed every record.
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Groups the filtered records by `by` and totals each group.
///
/// Rows come back sorted by their case-folded group key. When the same key
/// appears with different spellings, the lexicographically smallest trimmed
/// spelling is displayed, so the output does not depend on record order.
pub fn summarize(
    records: &[InsuranceRecord],
    by: &[Dimension],
    filters: &[Filter],
) -> Result<Summary, AnalyticsError> {
    if by.is_empty() {
        return Err(AnalyticsError::NoDimensions);
    }
    for (i, d) in by.iter().enumerate() {
        if by[..i].contains(d) {
            return Err(AnalyticsError::DuplicateDimension(*d));
        }
    }

    let mut groups: BTreeMap<Vec<String>, (Vec<String>, Totals)> = BTreeMap::new();
    for record in records.iter().filter(|r| passes_all(filters, r)) {
        let key: Vec<String> = by.iter().map(|d| match_key(d.value_of(record))).collect();
        let (display, totals) = groups.entry(key).or_insert_with(|| {
            (
                by.iter().map(|d| d.value_of(record).trim().to_string()).collect(),
                Totals::default(),
            )
        });
        for (shown, d) in display.iter_mut().zip(by) {
            let candidate = d.value_of(record).trim();
            if candidate < shown.as_str() {
                *shown = candidate.to_string();
            }
        }
        totals.add_record(record);
    }

    let mut grand_total = Totals::default();
    let rows = groups
        .into_values()
        .map(|(display, totals)| {
            grand_total.add(&totals);
            SummaryRow {
                group_key: by
                    .iter()
                    .zip(display)
                    .map(|(&dimension, value)| GroupValue { dimension, value })
                    .collect(),
                totals,
            }
        })
        .collect();

    Ok(Summary {
        dimensions: by.to_vec(),
        rows,
        grand_total,
    })
}

/// The `k` largest rows by `metric`; ties keep ascending group-key order.
pub fn top_k(rows: &[SummaryRow], metric: Metric, k: usize) -> Vec<SummaryRow> {
    let mut keyed: Vec<(Vec<String>, &SummaryRow)> = rows.iter().map(|r| (r.sort_key(), r)).collect();
    keyed.sort_by(|(ka, a), (kb, b)| {
        b.totals
            .metric(metric)
            .cmp(&a.totals.metric(metric))
            .then_with(|| ka.cmp(kb))
    });
    keyed.into_iter().take(k).map(|(_, r)| r.clone()).collect()
}

/// Pearson correlation between two metric columns of a summary.
///
/// Centered sums of squares are formed exactly in decimal arithmetic, so
/// perfectly proportional columns give exactly ±1.
pub fn correlation(rows: &[SummaryRow], x: Metric, y: Metric) -> Result<f64, AnalyticsError> {
    if rows.len() < 2 {
        return Err(AnalyticsError::DegenerateInput(
            "correlation needs at least two rows".into(),
        ));
    }
    let xs: Vec<Decimal> = rows.iter().map(|r| r.totals.metric(x)).collect();
    let ys: Vec<Decimal> = rows.iter().map(|r| r.totals.metric(y)).collect();

    match exact_moments(&xs, &ys) {
        Some((sxx, syy, sxy)) => {
            if sxx.is_zero() || syy.is_zero() {
                return Err(zero_variance());
            }
            if let Some(cross) = sxy.checked_mul(sxy) {
                if let Some(prod) = sxx.checked_mul(syy) {
                    if cross == prod {
                        return Ok(if sxy.is_sign_negative() { -1.0 } else { 1.0 });
                    }
                }
            }
            let (sxx, syy, sxy) = (to_f64(sxx), to_f64(syy), to_f64(sxy));
            Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
        }
        None => float_correlation(&xs, &ys),
    }
}

fn zero_variance() -> AnalyticsError {
    AnalyticsError::DegenerateInput("a metric column has zero variance".into())
}

fn to_f64(d: Decimal) -> f64 {
    d.to_f64().unwrap_or(f64::NAN)
}

/// n·Σxx − (Σx)², n·Σyy − (Σy)², n·Σxy − ΣxΣy, or `None` on overflow.
fn exact_moments(xs: &[Decimal], ys: &[Decimal]) -> Option<(Decimal, Decimal, Decimal)> {
    let n = Decimal::from(xs.len());
    let (mut sx, mut sy, mut sxx, mut syy, mut sxy) = (Decimal::ZERO, Decimal::ZERO, Decimal::ZERO, Decimal::ZERO, Decimal::ZERO);
    for (&x, &y) in xs.iter().zip(ys) {
        sx = sx.checked_add(x)?;
        sy = sy.checked_add(y)?;
        sxx = sxx.checked_add(x.checked_mul(x)?)?;
        syy = syy.checked_add(y.checked_mul(y)?)?;
        sxy = sxy.checked_add(x.checked_mul(y)?)?;
    }
    let cxx = n.checked_mul(sxx)?.checked_sub(sx.checked_mul(sx)?)?;
    let cyy = n.checked_mul(syy)?.checked_sub(sy.checked_mul(sy)?)?;
    let cxy = n.checked_mul(sxy)?.checked_sub(sx.checked_mul(sy)?)?;
    Some((cxx, cyy, cxy))
}

fn float_correlation(xs: &[Decimal], ys: &[Decimal]) -> Result<f64, AnalyticsError> {
    let xs: Vec<f64> = xs.iter().copied().map(to_f64).collect();
    let ys: Vec<f64> = ys.iter().copied().map(to_f64).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(zero_variance());
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rust_decimal::dec;

    fn rec(province: &str, crop: &str, insured: i64, indemnity: i64, producers: u64) -> InsuranceRecord {
        InsuranceRecord {
            campaign_year: "2010-2011".into(),
            province: province.into(),
            district: "D".into(),
            statistical_sector: "S".into(),
            crop_name: crop.into(),
            sown_area_has: Decimal::from(insured),
            insured_area_has: Decimal::from(insured),
            indemnity_amount_soles: Decimal::from(indemnity),
            producers_benefited: producers,
        }
    }

    fn row(label: &str, insured: i64, indemnity: i64) -> SummaryRow {
        SummaryRow {
            group_key: vec![GroupValue {
                dimension: Dimension::Province,
                value: label.into(),
            }],
            totals: Totals {
                total_insured_has: Decimal::from(insured),
                total_indemnity_soles: Decimal::from(indemnity),
                record_count: 1,
                ..Totals::default()
            },
        }
    }

    #[test]
    fn groups_case_insensitively_and_sorts() {
        let records = vec![
            rec("Azangaro", "Papa", 10, 4000, 3),
            rec("AZANGARO ", "Haba", 5, 2000, 1),
            rec("chucuito", "Papa", 1, 400, 1),
        ];
        let s = summarize(&records, &[Dimension::Province], &[]).unwrap();
        assert_eq!(s.rows.len(), 2);
        assert_eq!(s.rows[0].group_key[0].value, "AZANGARO");
        assert_eq!(s.rows[0].totals.total_insured_has, dec!(15));
        assert_eq!(s.rows[1].group_key[0].value, "chucuito");
        assert_eq!(s.grand_total.record_count, 3);
    }

    #[test]
    fn duplicate_dimension_rejected() {
        let err = summarize(&[], &[Dimension::Crop, Dimension::Crop], &[]).unwrap_err();
        assert_eq!(err, AnalyticsError::DuplicateDimension(Dimension::Crop));
        assert_eq!(summarize(&[], &[], &[]).unwrap_err(), AnalyticsError::NoDimensions);
    }

    #[test]
    fn filter_with_no_match_gives_empty_summary() {
        let records = vec![rec("PUNO", "Papa", 1, 400, 1)];
        let filters = vec![Filter::new(Dimension::Province, ["NOWHERE"]).unwrap()];
        let s = summarize(&records, &[Dimension::Crop], &filters).unwrap();
        assert!(s.is_empty());
        assert_eq!(s.grand_total, Totals::default());
    }

    #[test]
    fn top_k_orders_and_breaks_ties() {
        let rows = vec![row("B", 1, 500), row("A", 2, 500), row("C", 3, 900)];
        let top = top_k(&rows, Metric::Indemnity, 2);
        let labels: Vec<_> = top.iter().map(SummaryRow::label).collect();
        assert_eq!(labels, vec!["C", "A"]);
        assert_eq!(top_k(&rows, Metric::Indemnity, 10).len(), 3);
    }

    #[test]
    fn correlation_cases() {
        let anti = vec![row("a", 1, 2), row("b", 2, 1)];
        assert_eq!(correlation(&anti, Metric::Insured, Metric::Indemnity).unwrap(), -1.0);
        let proportional = vec![row("a", 1817, 726_800), row("b", 3910, 1_564_000), row("c", 700, 280_000)];
        assert_eq!(correlation(&proportional, Metric::Insured, Metric::Indemnity).unwrap(), 1.0);
        let flat = vec![row("a", 5, 1), row("b", 5, 2)];
        assert!(matches!(
            correlation(&flat, Metric::Insured, Metric::Indemnity),
            Err(AnalyticsError::DegenerateInput(_))
        ));
        assert!(correlation(&flat[..1], Metric::Insured, Metric::Indemnity).is_err());
    }

    #[test]
    fn correlation_matches_textbook_formula() {
        let rows = vec![row("a", 1, 3), row("b", 2, 2), row("c", 4, 7), row("d", 7, 5)];
        // Means 3.5 and 4.25; centered cross products summed by hand: Sxy = 10.5, Sxx = 21, Syy = 14.75.
        let expected = 10.5 / (21.0_f64 * 14.75).sqrt();
        let got = correlation(&rows, Metric::Insured, Metric::Indemnity).unwrap();
        assert!((got - expected).abs() < 1e-14);
    }

    fn record_strategy() -> impl Strategy<Value = InsuranceRecord> {
        (0usize..4, 0usize..3, 0i64..10_000, 0i64..100, 0u64..50).prop_map(|(p, c, ins, frac, prod)| {
            let mut r = rec(["A", "B", "c", "a"][p], ["Papa", "Haba", "PAPA"][c], ins, ins * 400, prod);
            r.sown_area_has = Decimal::new(ins * 100 + frac, 2);
            r
        })
    }

    proptest! {
        #[test]
        fn rows_partition_grand_total(records in proptest::collection::vec(record_strategy(), 0..60)) {
            let s = summarize(&records, &[Dimension::Province, Dimension::Crop], &[]).unwrap();
            let mut direct = Totals::default();
            for r in &records { direct.add_record(r); }
            let mut from_rows = Totals::default();
            for r in &s.rows { prop_assert!(r.totals.record_count >= 1); from_rows.add(&r.totals); }
            prop_assert_eq!(&s.grand_total, &direct);
            prop_assert_eq!(&from_rows, &direct);
        }

        #[test]
        fn invariant_under_permutation(records in proptest::collection::vec(record_strategy(), 0..40), seed in any::<u64>()) {
            use rand::{seq::SliceRandom, SeedableRng};
            let mut shuffled = records.clone();
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let a = summarize(&records, &[Dimension::Crop, Dimension::Province], &[]).unwrap();
            let b = summarize(&shuffled, &[Dimension::Crop, Dimension::Province], &[]).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn filters_never_increase_totals(records in proptest::collection::vec(record_strategy(), 0..40), pick in 0usize..4) {
            let base = summarize(&records, &[Dimension::Crop], &[]).unwrap().grand_total;
            let f = vec![Filter::new(Dimension::Province, [["A", "B", "C", "Z"][pick]]).unwrap()];
            let filtered = summarize(&records, &[Dimension::Crop], &f).unwrap().grand_total;
            for m in [Metric::Sown, Metric::Insured, Metric::Indemnity, Metric::Producers] {
                prop_assert!(filtered.metric(m) <= base.metric(m));
            }
        }
    }
}
