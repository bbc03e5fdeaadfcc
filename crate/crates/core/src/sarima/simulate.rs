use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{check_invertible, SarimaError, TimeSeries};
use crate::scalar::Scalar;

/// Seeded draw of n observations from the airline model with Gaussian
/// innovations of standard deviation `sigma`.
pub fn simulate<T: Scalar>(
    theta: T,
    seasonal_theta: T,
    sigma: T,
    s: usize,
    n: usize,
    seed: u64,
) -> Result<TimeSeries<T>, SarimaError> {
    simulate_with_innovations(theta, seasonal_theta, sigma, s, n, seed).map(|(series, _)| series)
}

/// Like [`simulate`], also returning the n − s − 1 innovations. Innovations
/// before the first differenced observation are zero and the first s + 1
/// levels are zero, so conditional residuals at the true parameters
/// reproduce the innovations.
pub fn simulate_with_innovations<T: Scalar>(
    theta: T,
    seasonal_theta: T,
    sigma: T,
    s: usize,
    n: usize,
    seed: u64,
) -> Result<(TimeSeries<T>, Vec<T>), SarimaError> {
    check_invertible(theta, seasonal_theta)?;
    if s == 0 {
        return Err(SarimaError::InvalidArgument("seasonal period must be ≥ 1".into()));
    }
    if !(sigma >= T::zero()) || !sigma.is_finite() {
        return Err(SarimaError::InvalidArgument("sigma must be finite and ≥ 0".into()));
    }
    if n <= s + 2 {
        return Err(SarimaError::SeriesTooShort { needed: s + 3, got: n });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = n - s - 1;
    let e: Vec<T> = (0..m)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            sigma * T::lit(z)
        })
        .collect();

    let cross = theta * seasonal_theta;
    let lag = |t: usize, k: usize| if t >= k { e[t - k] } else { T::zero() };
    let w = (0..m).map(|t| e[t] - theta * lag(t, 1) - seasonal_theta * lag(t, s) + cross * lag(t, s + 1));

    let mut z = vec![T::zero(); s + 1];
    z.extend(w);
    let mut u = z;
    for t in s..n {
        u[t] = u[t] + u[t - s];
    }
    let mut y = u;
    for t in 1..n {
        y[t] = y[t] + y[t - 1];
    }
    Ok((TimeSeries::from_values(y, s)?, e))
}
