//! Composite Simpson quadrature on uniform grids.

use crate::error::{ModelError, Result};

/// Composite Simpson rule over uniformly spaced samples `ys` with spacing `dx`.
///
/// Needs an odd number of samples (an even number of panels), at least three.
pub fn simpson_samples(ys: &[f64], dx: f64) -> Result<f64> {
    let n = ys.len();
    if n < 3 || n.is_multiple_of(2) {
        return Err(ModelError::Invalid(format!(
            "Simpson rule needs an odd sample count >= 3, got {n}"
        )));
    }
    let interior: f64 = ys[1..n - 1]
        .iter()
        .enumerate()
        .map(|(i, y)| if i % 2 == 0 { 4.0 * y } else { 2.0 * y })
        .sum();
    Ok(dx / 3.0 * (ys[0] + interior + ys[n - 1]))
}

/// Composite Simpson rule for `f` on `[a, b]` with `n` samples (odd).
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> Result<f64> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(ModelError::Invalid(format!(
            "Simpson rule needs an odd sample count >= 3, got {n}"
        )));
    }
    let dx = (b - a) / (n - 1) as f64;
    let ys: Vec<f64> = (0..n).map(|i| f(a + dx * i as f64)).collect();
    simpson_samples(&ys, dx)
}

/// Sample count after one doubling of the number of panels.
pub fn doubled(n: usize) -> usize {
    2 * n - 1
}

/// Convergence policy for grid doubling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Refinement {
    pub initial_samples: usize,
    pub rel_tol: f64,
    pub max_doublings: usize,
}

impl Default for Refinement {
    fn default() -> Self {
        Self {
            initial_samples: 2001,
            rel_tol: 1e-6,
            max_doublings: 8,
        }
    }
}

impl Refinement {
    /// Evaluates `estimate` on successively doubled grids until every component
    /// changes by less than `rel_tol` relative. Returns the finer estimate and
    /// the sample count it was computed with.
    pub fn run<const K: usize, F>(&self, mut estimate: F) -> Result<([f64; K], usize)>
    where
        F: FnMut(usize) -> Result<[f64; K]>,
    {
        let mut n = self.initial_samples;
        let mut prev = estimate(n)?;
        let mut last_change = f64::INFINITY;
        for _ in 0..self.max_doublings {
            let next_n = doubled(n);
            let next = estimate(next_n)?;
            last_change = prev
                .iter()
                .zip(&next)
                .map(|(a, b)| relative_change(*a, *b))
                .fold(0.0, f64::max);
            n = next_n;
            prev = next;
            if last_change < self.rel_tol {
                return Ok((prev, n));
            }
        }
        Err(ModelError::QuadratureNotConverged {
            refinements: self.max_doublings,
            samples: n,
            last_change,
        })
    }
}

fn relative_change(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn exact_for_cubics() {
        let v = simpson(|x| x * x * x - 2.0 * x + 1.0, 0.0, 2.0, 3).unwrap();
        assert_relative_eq!(v, 4.0 - 4.0 + 2.0, max_relative = 1e-14);
    }

    #[test]
    fn sine_half_period() {
        let v = simpson(|x| (PI * x).sin(), 0.0, 1.0, 2001).unwrap();
        assert!((v - 2.0 / PI).abs() < 1e-12);
    }

    #[test]
    fn rejects_even_counts() {
        assert!(simpson_samples(&[1.0, 2.0], 1.0).is_err());
        assert!(simpson(|x| x, 0.0, 1.0, 4).is_err());
    }

    #[test]
    fn refinement_converges_and_reports_failure() {
        let r = Refinement::default();
        let ([v], n) = r.run(|n| Ok([simpson(|x| x.exp(), 0.0, 1.0, n)?])).unwrap();
        assert_relative_eq!(v, 1f64.exp() - 1.0, max_relative = 1e-12);
        assert_eq!(n, 4001);

        let stubborn = Refinement { max_doublings: 2, ..r };
        let mut k = 0.0;
        let err = stubborn
            .run(|_| {
                k += 1.0;
                Ok([k])
            })
            .unwrap_err();
        assert!(matches!(err, ModelError::QuadratureNotConverged { refinements: 2, .. }));
    }
}
