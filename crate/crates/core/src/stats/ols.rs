use serde::Serialize;

use super::StatsError;
use crate::scalar::Scalar;

/// Straight-line least-squares fit y ≈ intercept + slope·x.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OlsFit<T> {
    pub intercept: T,
    pub slope: T,
    pub residuals: Vec<T>,
}

impl<T: Scalar> OlsFit<T> {
    pub fn predict(&self, x: T) -> T {
        self.intercept + self.slope * x
    }
}

pub fn ols_fit<T: Scalar>(x: &[T], y: &[T]) -> Result<OlsFit<T>, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::DomainError(format!(
            "x and y lengths differ ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(StatsError::DegenerateInput("need at least two points".into()));
    }
    let n = T::from_count(x.len());
    let x_mean = x.iter().copied().sum::<T>() / n;
    let y_mean = y.iter().copied().sum::<T>() / n;
    let (sxx, sxy) = x.iter().zip(y).fold((T::zero(), T::zero()), |(sxx, sxy), (&xi, &yi)| {
        let dx = xi - x_mean;
        (sxx + dx * dx, sxy + dx * (yi - y_mean))
    });
    if !(sxx > T::zero()) {
        return Err(StatsError::DegenerateInput("x is constant".into()));
    }
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let residuals = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| yi - intercept - slope * xi)
        .collect();
    Ok(OlsFit {
        intercept,
        slope,
        residuals,
    })
}
