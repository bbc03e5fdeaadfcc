use serde::Serialize;

use super::{check_invertible, difference, SarimaError, SarimaSpec, TimeSeries};
use crate::optim::NelderMead;
use crate::scalar::Scalar;
use crate::stats::normal_sf;

/// θ·Θ, the implied MA coefficient at lag s + 1.
pub fn composite_w<T: Scalar>(theta: T, seasonal_theta: T) -> T {
    theta * seasonal_theta
}

/// Conditional residuals and their sum of squares.
///
/// e_t = w_t + θ·e_{t−1} + Θ·e_{t−s} − θΘ·e_{t−s−1}, with every residual
/// before the first observation fixed at zero.
pub fn css_objective<T: Scalar>(
    w: &[T],
    theta: T,
    seasonal_theta: T,
    s: usize,
) -> Result<(T, Vec<T>), SarimaError> {
    check_invertible(theta, seasonal_theta)?;
    if s == 0 {
        return Err(SarimaError::InvalidArgument("seasonal period must be ≥ 1".into()));
    }
    let residuals = residuals_unchecked(w, theta, seasonal_theta, s);
    let css = residuals.iter().map(|&e| e * e).sum();
    Ok((css, residuals))
}

fn residuals_unchecked<T: Scalar>(w: &[T], theta: T, seasonal_theta: T, s: usize) -> Vec<T> {
    let cross = theta * seasonal_theta;
    let mut e: Vec<T> = Vec::with_capacity(w.len());
    for (t, &wt) in w.iter().enumerate() {
        let lag = |k: usize| if t >= k { e[t - k] } else { T::zero() };
        let et = wt + theta * lag(1) + seasonal_theta * lag(s) - cross * lag(s + 1);
        e.push(et);
    }
    e
}

/// Exact Jacobian of the residual vector in (θ, Θ), obtained by
/// differentiating the residual recursion. Rows are `[∂e_t/∂θ, ∂e_t/∂Θ]`.
pub fn residual_jacobian<T: Scalar>(
    w: &[T],
    theta: T,
    seasonal_theta: T,
    s: usize,
) -> Result<Vec<[T; 2]>, SarimaError> {
    let (_, e) = css_objective(w, theta, seasonal_theta, s)?;
    let cross = theta * seasonal_theta;
    let mut jac: Vec<[T; 2]> = Vec::with_capacity(w.len());
    for t in 0..w.len() {
        let e_lag = |k: usize| if t >= k { e[t - k] } else { T::zero() };
        let j_lag = |k: usize| if t >= k { jac[t - k] } else { [T::zero(); 2] };
        let (j1, js, js1) = (j_lag(1), j_lag(s), j_lag(s + 1));
        let d_theta = e_lag(1) + theta * j1[0] + seasonal_theta * js[0]
            - seasonal_theta * e_lag(s + 1)
            - cross * js1[0];
        let d_seasonal = e_lag(s) + theta * j1[1] + seasonal_theta * js[1]
            - theta * e_lag(s + 1)
            - cross * js1[1];
        jac.push([d_theta, d_seasonal]);
    }
    Ok(jac)
}

/// Central finite-difference Jacobian of the residual vector.
pub fn residual_jacobian_fd<T: Scalar>(
    w: &[T],
    theta: T,
    seasonal_theta: T,
    s: usize,
    step: T,
) -> Result<Vec<[T; 2]>, SarimaError> {
    check_invertible(theta, seasonal_theta)?;
    let two_h = step + step;
    let shifted = |dt: T, ds: T| residuals_unchecked(w, theta + dt, seasonal_theta + ds, s);
    let (tp, tm) = (shifted(step, T::zero()), shifted(-step, T::zero()));
    let (sp, sm) = (shifted(T::zero(), step), shifted(T::zero(), -step));
    Ok((0..w.len())
        .map(|t| [(tp[t] - tm[t]) / two_h, (sp[t] - sm[t]) / two_h])
        .collect())
}

/// One estimated MA coefficient with its normal-approximation inference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Coefficient<T> {
    pub estimate: T,
    pub std_error: T,
    pub t_value: T,
    /// Two-sided, 2·P(Z > |t|).
    pub p_value: T,
}

impl<T: Scalar> Coefficient<T> {
    pub fn from_estimate(estimate: T, std_error: T) -> Self {
        if !(std_error > T::zero()) || !std_error.is_finite() {
            return Self {
                estimate,
                std_error: T::infinity(),
                t_value: T::zero(),
                p_value: T::one(),
            };
        }
        let t_value = estimate / std_error;
        Self {
            estimate,
            std_error,
            t_value,
            p_value: (T::lit(2.0) * normal_sf(t_value.abs())).min(T::one()),
        }
    }
}

/// Result of [`fit`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SarimaFit<T> {
    pub spec: SarimaSpec,
    /// Nonseasonal MA(1), θ.
    pub ma: Coefficient<T>,
    /// Seasonal MA at lag s, Θ.
    pub seasonal_ma: Coefficient<T>,
    /// θ·Θ.
    pub composite: T,
    pub sigma2: T,
    /// Residuals for every differenced observation, in time order.
    pub residuals: Vec<T>,
    /// Leading residuals left out of `css` (0 unless burn-in exclusion was requested).
    pub burn_in: usize,
    /// Σ e_t² over `residuals[burn_in..]`.
    pub css: T,
    /// Number of residuals in `css`.
    pub m: usize,
    pub evaluations: usize,
}

impl<T: Scalar> SarimaFit<T> {
    pub fn theta(&self) -> T {
        self.ma.estimate
    }

    pub fn seasonal_theta(&self) -> T {
        self.seasonal_ma.estimate
    }

    /// Residuals that enter the objective.
    pub fn scored_residuals(&self) -> &[T] {
        &self.residuals[self.burn_in..]
    }
}

#[derive(Debug, Clone)]
pub struct FitOptions<T> {
    /// Keep the first s + 1 residuals in the objective (pure conditional CSS).
    pub include_burn_in: bool,
    pub optimizer: NelderMead<T>,
    /// Starting points tried; the best converged run wins.
    pub starts: Vec<[T; 2]>,
    /// Coefficients beyond this magnitude are clamped and penalized.
    pub bound: T,
    pub penalty_weight: T,
    pub fd_step: T,
}

impl<T: Scalar> Default for FitOptions<T> {
    fn default() -> Self {
        let grid = [-0.5, 0.0, 0.5];
        let starts = grid
            .iter()
            .flat_map(|&a| grid.iter().map(move |&b| [T::lit(a), T::lit(b)]))
            .collect();
        Self {
            include_burn_in: true,
            optimizer: NelderMead {
                initial_step: T::lit(0.2),
                ..NelderMead::default()
            },
            starts,
            bound: T::lit(0.999),
            penalty_weight: T::lit(1e6),
            fd_step: T::lit(1e-5).max(T::epsilon().cbrt()),
        }
    }
}

/// Estimates (θ, Θ) by minimizing the conditional sum of squares.
pub fn fit<T: Scalar>(series: &TimeSeries<T>, spec: SarimaSpec) -> Result<SarimaFit<T>, SarimaError> {
    fit_with(series, spec, &FitOptions::default())
}

pub fn fit_with<T: Scalar>(
    series: &TimeSeries<T>,
    spec: SarimaSpec,
    options: &FitOptions<T>,
) -> Result<SarimaFit<T>, SarimaError> {
    let spec = SarimaSpec::new(spec.d, spec.seasonal_d, spec.s)?;
    if series.len() < spec.min_length() {
        return Err(SarimaError::SeriesTooShort {
            needed: spec.min_length(),
            got: series.len(),
        });
    }
    let w = difference(series.values(), spec.d, spec.seasonal_d, spec.s)?;
    if w.iter().all(|&v| v == w[0]) {
        return Err(SarimaError::DegenerateSeries);
    }
    let s = spec.s;
    let burn_in = if options.include_burn_in { 0 } else { s + 1 };
    let bound = options.bound;

    let objective = |theta: T, seasonal_theta: T| -> T {
        let e = residuals_unchecked(&w, theta, seasonal_theta, s);
        e[burn_in..].iter().map(|&v| v * v).sum()
    };
    let penalized = |x: &[T]| -> T {
        let clamp = |c: T| c.max(-bound).min(bound);
        let excess = |c: T| (c.abs() - bound).max(T::zero());
        let penalty = options.penalty_weight * (excess(x[0]).powi(2) + excess(x[1]).powi(2));
        objective(clamp(x[0]), clamp(x[1])) + penalty
    };

    let mut evaluations = 0;
    let mut best: Option<(Vec<T>, T)> = None;
    for start in &options.starts {
        let run = options.optimizer.minimize(penalized, start);
        evaluations += run.evaluations;
        if run.converged && best.as_ref().is_none_or(|(_, v)| run.value < *v) {
            best = Some((run.x, run.value));
        }
    }
    let (x, _) = best.ok_or(SarimaError::NonConvergence { evaluations })?;
    let theta = x[0].max(-bound).min(bound);
    let seasonal_theta = x[1].max(-bound).min(bound);

    let (_, residuals) = css_objective(&w, theta, seasonal_theta, s)?;
    let scored = &residuals[burn_in..];
    let css: T = scored.iter().map(|&e| e * e).sum();
    let m = scored.len();
    if m <= 2 {
        return Err(SarimaError::SeriesTooShort {
            needed: spec.min_length() + burn_in,
            got: series.len(),
        });
    }
    let sigma2 = css / T::from_count(m - 2);

    // Gauss-Newton covariance σ²·(JᵀJ)⁻¹ from a finite-difference Jacobian.
    let jac = residual_jacobian_fd(&w, theta, seasonal_theta, s, options.fd_step)?;
    let (mut a, mut b, mut c) = (T::zero(), T::zero(), T::zero());
    for row in &jac[burn_in..] {
        a = a + row[0] * row[0];
        b = b + row[0] * row[1];
        c = c + row[1] * row[1];
    }
    let det = a * c - b * b;
    let (var_theta, var_seasonal) = if det > T::zero() {
        (sigma2 * c / det, sigma2 * a / det)
    } else {
        (T::infinity(), T::infinity())
    };

    Ok(SarimaFit {
        spec,
        ma: Coefficient::from_estimate(theta, var_theta.sqrt()),
        seasonal_ma: Coefficient::from_estimate(seasonal_theta, var_seasonal.sqrt()),
        composite: composite_w(theta, seasonal_theta),
        sigma2,
        residuals,
        burn_in,
        css,
        m,
        evaluations,
    })
}
