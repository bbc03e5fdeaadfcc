use serde::{Deserialize, Serialize};

use super::{SarimaError, SarimaFit, SarimaSpec, TimeSeries};
use crate::scalar::Scalar;
use crate::stats::ols_fit;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForecastMethod {
    Sarima,
    LinearTrend,
    SeasonalNaiveDrift,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForecastResult<T> {
    /// Number of observations the forecasts follow; the first forecast is for
    /// observation `origin + 1` (1-based).
    pub origin: usize,
    pub horizon: usize,
    pub point_forecasts: Vec<T>,
    pub method: ForecastMethod,
}

/// Evaluates the model equation at index `t` (0-based) of `y`:
/// the differencing skeleton on past levels plus MA terms on past residuals.
fn model_equation<T: Scalar>(
    y: &[T],
    t: usize,
    poly: &[T],
    residual_at: impl Fn(usize) -> T,
    theta: T,
    seasonal_theta: T,
    s: usize,
) -> T {
    let ar: T = poly
        .iter()
        .enumerate()
        .skip(1)
        .filter(|&(k, c)| *c != T::zero() && k <= t)
        .map(|(k, &c)| -c * y[t - k])
        .sum();
    let e = |k: usize| if t >= k { residual_at(t - k) } else { T::zero() };
    ar - theta * e(1) - seasonal_theta * e(s) + theta * seasonal_theta * e(s + 1)
}

fn check_fit<T: Scalar>(series: &TimeSeries<T>, fit: &SarimaFit<T>) -> Result<(), SarimaError> {
    let fitted = fit.residuals.len() + fit.spec.differencing_loss();
    if fitted != series.len() {
        return Err(SarimaError::FitMismatch {
            fitted,
            observed: series.len(),
        });
    }
    Ok(())
}

/// Point forecasts for observations n+1..n+h. Future residuals are zero;
/// residuals before the first differenced observation are zero.
pub fn forecast<T: Scalar>(
    series: &TimeSeries<T>,
    fit: &SarimaFit<T>,
    h: usize,
) -> Result<ForecastResult<T>, SarimaError> {
    if h < 1 {
        return Err(SarimaError::HorizonInvalid);
    }
    check_fit(series, fit)?;
    let n = series.len();
    let loss = fit.spec.differencing_loss();
    let poly = fit.spec.differencing_polynomial::<T>();
    let residual_at = |i: usize| {
        if i >= loss && i < n {
            fit.residuals[i - loss]
        } else {
            T::zero()
        }
    };
    let mut y = series.values().to_vec();
    for t in n..n + h {
        let next = model_equation(&y, t, &poly, residual_at, fit.theta(), fit.seasonal_theta(), fit.spec.s);
        y.push(next);
    }
    Ok(ForecastResult {
        origin: n,
        horizon: h,
        point_forecasts: y.split_off(n),
        method: ForecastMethod::Sarima,
    })
}

/// In-sample one-step predictions Ŷ_t for every t after the differencing
/// loss, so that Y_t = Ŷ_t + e_t.
pub fn one_step_predictions<T: Scalar>(
    series: &TimeSeries<T>,
    fit: &SarimaFit<T>,
) -> Result<Vec<T>, SarimaError> {
    check_fit(series, fit)?;
    let loss = fit.spec.differencing_loss();
    let poly = fit.spec.differencing_polynomial::<T>();
    let residual_at = |i: usize| if i >= loss { fit.residuals[i - loss] } else { T::zero() };
    let y = series.values();
    Ok((loss..y.len())
        .map(|t| model_equation(y, t, &poly, residual_at, fit.theta(), fit.seasonal_theta(), fit.spec.s))
        .collect())
}

/// Ŷ_t = Y_{t−1} + Y_{t−s} − Y_{t−s−1}, iterated on its own output.
pub fn seasonal_naive_drift_forecast<T: Scalar>(
    series: &TimeSeries<T>,
    h: usize,
) -> Result<ForecastResult<T>, SarimaError> {
    if h < 1 {
        return Err(SarimaError::HorizonInvalid);
    }
    let spec = SarimaSpec::airline(series.seasonal_period());
    let needed = spec.differencing_loss();
    let n = series.len();
    if n < needed {
        return Err(SarimaError::SeriesTooShort { needed, got: n });
    }
    let s = spec.s;
    let mut y = series.values().to_vec();
    for t in n..n + h {
        let next = y[t - 1] + y[t - s] - y[t - s - 1];
        y.push(next);
    }
    Ok(ForecastResult {
        origin: n,
        horizon: h,
        point_forecasts: y.split_off(n),
        method: ForecastMethod::SeasonalNaiveDrift,
    })
}

/// Least-squares line y = a + b·t on t = 1..n, extended to n+1..n+h.
pub fn linear_trend_forecast<T: Scalar>(
    series: &TimeSeries<T>,
    h: usize,
) -> Result<ForecastResult<T>, SarimaError> {
    if h < 1 {
        return Err(SarimaError::HorizonInvalid);
    }
    let n = series.len();
    let t: Vec<T> = (1..=n).map(T::from_count).collect();
    let line = ols_fit(&t, series.values())?;
    Ok(ForecastResult {
        origin: n,
        horizon: h,
        point_forecasts: (n + 1..=n + h).map(|k| line.predict(T::from_count(k))).collect(),
        method: ForecastMethod::LinearTrend,
    })
}
