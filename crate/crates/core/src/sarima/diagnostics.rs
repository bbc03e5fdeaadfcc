use serde::Serialize;

use super::{SarimaError, SarimaFit};
use crate::scalar::Scalar;
use crate::stats::{acf, chi_square_sf, normal_quantile};

/// Lags reported by default: one to four seasonal years of monthly data.
pub const DEFAULT_LJUNG_BOX_LAGS: [usize; 4] = [12, 24, 36, 48];

/// Parameters estimated by the airline model (θ and Θ).
pub const FITTED_PARAMS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LjungBoxRow<T> {
    pub lag: usize,
    pub q: T,
    pub df: usize,
    pub p_value: T,
}

/// Q(K) = m(m+2) Σ_{k≤K} r_k²/(m−k), referred to χ² with K − fitted_params
/// degrees of freedom. Rows come back in ascending lag order.
pub fn ljung_box<T: Scalar>(
    residuals: &[T],
    lags: &[usize],
    fitted_params: usize,
) -> Result<Vec<LjungBoxRow<T>>, SarimaError> {
    let m = residuals.len();
    let mut lags = lags.to_vec();
    lags.sort_unstable();
    lags.dedup();
    let Some(&max_lag) = lags.last() else {
        return Ok(Vec::new());
    };
    if max_lag >= m {
        return Err(SarimaError::LagTooLarge {
            lag: max_lag,
            residuals: m,
        });
    }
    if let Some(&lag) = lags.iter().find(|&&k| k <= fitted_params) {
        return Err(SarimaError::LagTooSmall { lag, fitted_params });
    }

    let r = acf(residuals, max_lag)?;
    let mf = T::from_count(m);
    let scale = mf * (mf + T::lit(2.0));
    let mut running = T::zero();
    let mut next_k = 1;
    lags.into_iter()
        .map(|lag| {
            for k in next_k..=lag {
                let rk = r.at(k).expect("lag within acf range");
                running = running + rk * rk / T::from_count(m - k);
            }
            next_k = lag + 1;
            let q = scale * running;
            let df = lag - fitted_params;
            let p_value = chi_square_sf(q, df as u32)?;
            Ok(LjungBoxRow { lag, q, df, p_value })
        })
        .collect()
}

/// Adequacy checks on a fitted model and their conjunction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticsReport<T> {
    pub alpha: T,
    pub ljung_box: Vec<LjungBoxRow<T>>,
    /// |θ| < 1 and |Θ| < 1.
    pub condition_invertible: bool,
    /// Both coefficient p-values below α.
    pub condition_params_significant: bool,
    /// Every Ljung-Box p-value above α (false when no lag could be tested).
    pub condition_whiteness: bool,
    pub verdict: bool,
}

impl<T: Scalar> DiagnosticsReport<T> {
    pub fn assess(
        theta: T,
        seasonal_theta: T,
        p_theta: T,
        p_seasonal_theta: T,
        ljung_box: Vec<LjungBoxRow<T>>,
        alpha: T,
    ) -> Self {
        let condition_invertible = theta.abs() < T::one() && seasonal_theta.abs() < T::one();
        let condition_params_significant = p_theta < alpha && p_seasonal_theta < alpha;
        let condition_whiteness =
            !ljung_box.is_empty() && ljung_box.iter().all(|row| row.p_value > alpha);
        Self {
            alpha,
            ljung_box,
            condition_invertible,
            condition_params_significant,
            condition_whiteness,
            verdict: condition_invertible && condition_params_significant && condition_whiteness,
        }
    }
}

/// Checks a fit at significance `alpha` with the default lag set, dropping
/// lags that are not below the residual count.
pub fn validate<T: Scalar>(fit: &SarimaFit<T>, alpha: T) -> DiagnosticsReport<T> {
    validate_with_lags(fit, alpha, &DEFAULT_LJUNG_BOX_LAGS)
}

pub fn validate_with_lags<T: Scalar>(fit: &SarimaFit<T>, alpha: T, lags: &[usize]) -> DiagnosticsReport<T> {
    let residuals = fit.scored_residuals();
    let usable: Vec<usize> = lags
        .iter()
        .copied()
        .filter(|&k| k < residuals.len() && k > FITTED_PARAMS)
        .collect();
    let rows = ljung_box(residuals, &usable, FITTED_PARAMS).unwrap_or_default();
    DiagnosticsReport::assess(
        fit.ma.estimate,
        fit.seasonal_ma.estimate,
        fit.ma.p_value,
        fit.seasonal_ma.p_value,
        rows,
        alpha,
    )
}

/// Normal probability plot pairs (theoretical quantile, ordered residual)
/// using Blom positions (i − 0.375)/(m + 0.25).
pub fn qq_data<T: Scalar>(residuals: &[T]) -> Result<Vec<(T, T)>, SarimaError> {
    let m = residuals.len();
    if m < 3 {
        return Err(SarimaError::TooFewPoints { needed: 3, got: m });
    }
    let mut sorted = residuals.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let denom = T::from_count(m) + T::lit(0.25);
    sorted
        .into_iter()
        .enumerate()
        .map(|(i, value)| {
            let p = (T::from_count(i + 1) - T::lit(0.375)) / denom;
            Ok((normal_quantile(p)?, value))
        })
        .collect()
}
