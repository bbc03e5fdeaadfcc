use serde::Serialize;

use super::StatsError;
use crate::scalar::Scalar;

/// Sample autocorrelations r_1..r_K of a series of length m.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AcfResult<T> {
    coefficients: Vec<T>,
    series_length: usize,
}

impl<T: Scalar> AcfResult<T> {
    /// r_k for 1 ≤ k ≤ K; lag 0 is always 1.
    pub fn at(&self, lag: usize) -> Option<T> {
        if lag == 0 {
            return Some(T::one());
        }
        self.coefficients.get(lag - 1).copied()
    }

    pub fn coefficients(&self) -> &[T] {
        &self.coefficients
    }

    pub fn max_lag(&self) -> usize {
        self.coefficients.len()
    }

    pub fn series_length(&self) -> usize {
        self.series_length
    }
}

/// Mean-corrected autocorrelation with the lag-0 sum of squares as the
/// common denominator.
pub fn acf<T: Scalar>(series: &[T], max_lag: usize) -> Result<AcfResult<T>, StatsError> {
    let m = series.len();
    if max_lag == 0 {
        return Err(StatsError::DomainError("max_lag must be ≥ 1".into()));
    }
    if m <= max_lag {
        return Err(StatsError::DegenerateInput(format!(
            "series of length {m} cannot support lag {max_lag}"
        )));
    }
    let mean = series.iter().copied().sum::<T>() / T::from_count(m);
    let centered: Vec<T> = series.iter().map(|&x| x - mean).collect();
    let denom: T = centered.iter().map(|&c| c * c).sum();
    if !(denom > T::zero()) {
        return Err(StatsError::DegenerateInput("series has zero variance".into()));
    }
    let coefficients = (1..=max_lag)
        .map(|k| {
            let num: T = centered[..m - k]
                .iter()
                .zip(&centered[k..])
                .map(|(&a, &b)| a * b)
                .sum();
            (num / denom).max(-T::one()).min(T::one())
        })
        .collect();
    Ok(AcfResult {
        coefficients,
        series_length: m,
    })
}
