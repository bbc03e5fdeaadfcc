//! Derivative-free minimization (Nelder-Mead simplex).

use crate::scalar::Scalar;

/// Nelder-Mead with the standard reflection/expansion/contraction/shrink
/// coefficients (1, 2, ½, ½).
#[derive(Debug, Clone)]
pub struct NelderMead<T> {
    /// Offset of each initial vertex from the start point along one axis.
    pub initial_step: T,
    /// Stop when (f_worst − f_best) ≤ ftol · max(|f_best|, tiny) ...
    pub ftol: T,
    /// ... and every vertex lies within xtol (max-norm) of the best one.
    pub xtol: T,
    pub max_evaluations: usize,
}

impl<T: Scalar> Default for NelderMead<T> {
    fn default() -> Self {
        Self {
            initial_step: T::lit(0.1),
            ftol: crate::scalar::attainable(1e-10, 4.0),
            xtol: crate::scalar::attainable(1e-8, 64.0),
            max_evaluations: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum<T> {
    pub x: Vec<T>,
    pub value: T,
    pub evaluations: usize,
    pub converged: bool,
}

impl<T: Scalar> NelderMead<T> {
    pub fn minimize<F>(&self, mut f: F, start: &[T]) -> Minimum<T>
    where
        F: FnMut(&[T]) -> T,
    {
        let dim = start.len();
        assert!(dim >= 1, "Nelder-Mead needs at least one parameter");
        let half = T::lit(0.5);
        let two = T::lit(2.0);
        let mut evaluations = 0usize;
        let mut eval = |x: &[T], evaluations: &mut usize| {
            *evaluations += 1;
            let v = f(x);
            if v.is_nan() {
                T::infinity()
            } else {
                v
            }
        };

        let mut simplex: Vec<(Vec<T>, T)> = Vec::with_capacity(dim + 1);
        simplex.push((start.to_vec(), eval(start, &mut evaluations)));
        for i in 0..dim {
            let mut x = start.to_vec();
            x[i] = x[i] + self.initial_step;
            let v = eval(&x, &mut evaluations);
            simplex.push((x, v));
        }

        loop {
            simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
            let best = simplex[0].1;
            let worst = simplex[dim].1;

            let spread = simplex[1..]
                .iter()
                .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (*a - *b).abs()))
                .fold(T::zero(), T::max);
            let scale = best.abs().max(T::min_positive_value());
            if (worst - best) <= self.ftol * scale && spread <= self.xtol {
                return Minimum {
                    x: simplex[0].0.clone(),
                    value: best,
                    evaluations,
                    converged: true,
                };
            }
            if evaluations >= self.max_evaluations {
                return Minimum {
                    x: simplex[0].0.clone(),
                    value: best,
                    evaluations,
                    converged: false,
                };
            }

            let n = T::from_count(dim);
            let centroid: Vec<T> = (0..dim)
                .map(|j| simplex[..dim].iter().map(|(x, _)| x[j]).sum::<T>() / n)
                .collect();
            let along = |t: T| -> Vec<T> {
                centroid
                    .iter()
                    .zip(&simplex[dim].0)
                    .map(|(c, w)| *c + t * (*c - *w))
                    .collect()
            };

            let reflected = along(T::one());
            let f_reflected = eval(&reflected, &mut evaluations);
            if f_reflected < best {
                let expanded = along(two);
                let f_expanded = eval(&expanded, &mut evaluations);
                simplex[dim] = if f_expanded < f_reflected {
                    (expanded, f_expanded)
                } else {
                    (reflected, f_reflected)
                };
                continue;
            }
            if f_reflected < simplex[dim - 1].1 {
                simplex[dim] = (reflected, f_reflected);
                continue;
            }
            let (contracted, f_contracted) = if f_reflected < worst {
                let x = along(half);
                let v = eval(&x, &mut evaluations);
                (x, v)
            } else {
                let x = along(-half);
                let v = eval(&x, &mut evaluations);
                (x, v)
            };
            if f_contracted < worst.min(f_reflected) {
                simplex[dim] = (contracted, f_contracted);
                continue;
            }
            // Shrink toward the best vertex.
            let anchor = simplex[0].0.clone();
            for (x, v) in simplex.iter_mut().skip(1) {
                for (xi, ai) in x.iter_mut().zip(&anchor) {
                    *xi = *ai + half * (*xi - *ai);
                }
                *v = eval(x, &mut evaluations);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_quadratic_minimum() {
        let nm = NelderMead::<f64>::default();
        let min = nm.minimize(|x| (x[0] - 0.3).powi(2) + 4.0 * (x[1] + 0.7).powi(2) + 1.0, &[0.0, 0.0]);
        assert!(min.converged);
        assert!((min.x[0] - 0.3).abs() < 1e-7);
        assert!((min.x[1] + 0.7).abs() < 1e-7);
        assert!((min.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rosenbrock() {
        let nm = NelderMead {
            initial_step: 0.5,
            ..NelderMead::<f64>::default()
        };
        let min = nm.minimize(
            |x| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2) + 1.0,
            &[-1.2, 1.0],
        );
        assert!(min.converged);
        assert!((min.x[0] - 1.0).abs() < 1e-5 && (min.x[1] - 1.0).abs() < 1e-5);
    }

    #[test]
    fn reports_budget_exhaustion() {
        let nm = NelderMead {
            max_evaluations: 10,
            ..NelderMead::<f64>::default()
        };
        let min = nm.minimize(|x| x[0] * x[0] + x[1] * x[1], &[3.0, 3.0]);
        assert!(!min.converged);
        assert!(min.evaluations >= 10);
    }

    #[test]
    fn one_dimensional_and_f32() {
        let nm = NelderMead::<f32>::default();
        let min = nm.minimize(|x| (x[0] - 2.0).powi(2), &[0.0]);
        assert!(min.converged);
        assert!((min.x[0] - 2.0).abs() < 1e-3);
    }
}
