//! Natural cubic spline interpolation.
//!
//! Used to draw the upper and lower envelopes through extrema during
//! sifting. The natural end condition (zero second derivative at both ends)
//! is applied to the knot set, which envelope construction has already
//! extended past the series boundaries.

use crate::error::{Error, Result};

/// Piecewise cubic through the knots with continuous value, first, and
/// second derivative; second derivative is zero at both end knots.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// Second derivative of the spline at each knot.
    second_derivs: Vec<f64>,
}

/// Fit a natural cubic spline through the knots.
///
/// With exactly two knots this degrades to the connecting line.
pub fn fit_cubic_spline(knots: &[(f64, f64)]) -> Result<CubicSpline> {
    if knots.len() < 2 {
        return Err(Error::TooFewKnots { got: knots.len() });
    }
    for (i, &(x, y)) in knots.iter().enumerate() {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::InvalidParam(format!("knot {i} is not finite")));
        }
        if i > 0 && x <= knots[i - 1].0 {
            return Err(Error::NonIncreasingKnots { index: i });
        }
    }

    let m = knots.len();
    let xs: Vec<f64> = knots.iter().map(|k| k.0).collect();
    let ys: Vec<f64> = knots.iter().map(|k| k.1).collect();

    // Solve the tridiagonal system for interior second derivatives
    // (natural end condition pins both end values to zero).
    let mut second_derivs = vec![0.0; m];
    if m > 2 {
        let h: Vec<f64> = (0..m - 1).map(|i| xs[i + 1] - xs[i]).collect();
        let interior = m - 2;
        let mut diag = vec![0.0; interior];
        let mut upper = vec![0.0; interior];
        let mut rhs = vec![0.0; interior];
        for i in 0..interior {
            diag[i] = (h[i] + h[i + 1]) / 3.0;
            upper[i] = h[i + 1] / 6.0;
            rhs[i] = (ys[i + 2] - ys[i + 1]) / h[i + 1] - (ys[i + 1] - ys[i]) / h[i];
        }
        // Thomas algorithm; the lower diagonal equals the previous upper.
        for i in 1..interior {
            let w = h[i] / 6.0 / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        second_derivs[interior] = rhs[interior - 1] / diag[interior - 1];
        for i in (1..interior).rev() {
            second_derivs[i] = (rhs[i - 1] - upper[i - 1] * second_derivs[i + 1]) / diag[i - 1];
        }
    }

    Ok(CubicSpline { xs, ys, second_derivs })
}

impl CubicSpline {
    /// Evaluate the spline at `x`. Outside the knot range the polynomial of
    /// the nearest interval is extrapolated.
    pub fn evaluate(&self, x: f64) -> f64 {
        let i = self.interval_index(x);
        self.eval_on_interval(i, x)
    }

    pub fn knots(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }

    fn interval_index(&self, x: f64) -> usize {
        let m = self.xs.len();
        // partition_point gives the first knot strictly greater than x.
        let upper = self.xs.partition_point(|&k| k <= x);
        upper.clamp(1, m - 1) - 1
    }

    fn eval_on_interval(&self, i: usize, x: f64) -> f64 {
        let h = self.xs[i + 1] - self.xs[i];
        let a = self.xs[i + 1] - x;
        let b = x - self.xs[i];
        let (m0, m1) = (self.second_derivs[i], self.second_derivs[i + 1]);
        m0 * a * a * a / (6.0 * h)
            + m1 * b * b * b / (6.0 * h)
            + (self.ys[i] / h - m0 * h / 6.0) * a
            + (self.ys[i + 1] / h - m1 * h / 6.0) * b
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Independent oracle: solve the full interior system for the natural
    /// spline second derivatives by dense Gaussian elimination.
    fn second_derivs_dense(knots: &[(f64, f64)]) -> Vec<f64> {
        let m = knots.len();
        let xs: Vec<f64> = knots.iter().map(|k| k.0).collect();
        let ys: Vec<f64> = knots.iter().map(|k| k.1).collect();
        let h: Vec<f64> = (0..m - 1).map(|i| xs[i + 1] - xs[i]).collect();
        let n = m - 2;
        let mut a = vec![vec![0.0; n + 1]; n];
        for i in 0..n {
            if i > 0 {
                a[i][i - 1] = h[i] / 6.0;
            }
            a[i][i] = (h[i] + h[i + 1]) / 3.0;
            if i + 1 < n {
                a[i][i + 1] = h[i + 1] / 6.0;
            }
            a[i][n] = (ys[i + 2] - ys[i + 1]) / h[i + 1] - (ys[i + 1] - ys[i]) / h[i];
        }
        for col in 0..n {
            let pivot = a[col][col];
            for row in col + 1..n {
                let f = a[row][col] / pivot;
                for k in col..=n {
                    a[row][k] -= f * a[col][k];
                }
            }
        }
        let mut sol = vec![0.0; n];
        for row in (0..n).rev() {
            let mut s = a[row][n];
            for k in row + 1..n {
                s -= a[row][k] * sol[k];
            }
            sol[row] = s / a[row][row];
        }
        let mut out = vec![0.0; m];
        out[1..=n].copy_from_slice(&sol);
        out
    }

    #[test]
    fn two_knots_give_a_line() {
        let s = fit_cubic_spline(&[(0.0, 0.0), (1.0, 1.0)]).unwrap();
        assert_relative_eq!(s.evaluate(0.5), 0.5, epsilon = 1e-15);
        assert_relative_eq!(s.evaluate(0.25), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn interpolates_knots_exactly() {
        let knots = [(0.0, 0.0), (1.0, 1.0), (2.0, 0.0)];
        let s = fit_cubic_spline(&knots).unwrap();
        for &(x, y) in &knots {
            assert_relative_eq!(s.evaluate(x), y, epsilon = 1e-12, max_relative = 1e-12);
        }
    }

    #[test]
    fn matches_hand_solved_cubic_knots() {
        // Knots on y = x^3 at x = 0..3. Solving the two interior equations
        // 4*M1 + M2 = 36 and M1 + 4*M2 = 72 by hand gives M1 = 4.8 and
        // M2 = 16.8, hence S(0.5) = 0.2, S(1.5) = 3.15, S(2.5) = 16.45.
        let knots = [(0.0, 0.0), (1.0, 1.0), (2.0, 8.0), (3.0, 27.0)];
        let s = fit_cubic_spline(&knots).unwrap();
        assert_relative_eq!(s.evaluate(0.5), 0.2, epsilon = 1e-9);
        assert_relative_eq!(s.evaluate(1.5), 3.15, epsilon = 1e-9);
        assert_relative_eq!(s.evaluate(2.5), 16.45, epsilon = 1e-9);

        // Cross-check the solved second derivatives against the dense solve.
        let expect = second_derivs_dense(&knots);
        for (got, want) in s.second_derivs.iter().zip(&expect) {
            assert_relative_eq!(got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn continuity_at_interior_knots() {
        let knots = [
            (0.0, 0.3),
            (0.7, -1.1),
            (1.9, 2.0),
            (2.4, 0.5),
            (4.0, -0.7),
            (5.5, 1.3),
        ];
        let s = fit_cubic_spline(&knots).unwrap();
        for i in 1..knots.len() - 1 {
            let x = knots[i].0;
            let left = s.eval_on_interval(i - 1, x);
            let right = s.eval_on_interval(i, x);
            assert_relative_eq!(left, right, epsilon = 1e-12, max_relative = 1e-12);
            // First and second derivatives via symmetric limits inside each side.
            let h = 1e-6;
            let dl = (s.eval_on_interval(i - 1, x) - s.eval_on_interval(i - 1, x - h)) / h;
            let dr = (s.eval_on_interval(i, x + h) - s.eval_on_interval(i, x)) / h;
            assert_relative_eq!(dl, dr, epsilon = 1e-4, max_relative = 1e-4);
            let d2l = (s.eval_on_interval(i - 1, x) - 2.0 * s.eval_on_interval(i - 1, x - h)
                + s.eval_on_interval(i - 1, x - 2.0 * h))
                / (h * h);
            let d2r = (s.eval_on_interval(i, x + 2.0 * h) - 2.0 * s.eval_on_interval(i, x + h)
                + s.eval_on_interval(i, x))
                / (h * h);
            assert_relative_eq!(d2l, d2r, epsilon = 1e-2, max_relative = 1e-2);
        }
    }

    #[test]
    fn random_knots_match_dense_solver() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let m = rng.random_range(3..30);
            let mut x = 0.0;
            let knots: Vec<(f64, f64)> = (0..m)
                .map(|_| {
                    x += rng.random_range(0.1..2.0);
                    (x, rng.random_range(-10.0..10.0))
                })
                .collect();
            let s = fit_cubic_spline(&knots).unwrap();
            let expect = second_derivs_dense(&knots);
            for (got, want) in s.second_derivs.iter().zip(&expect) {
                assert_relative_eq!(got, want, epsilon = 1e-9, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn rejects_bad_knots() {
        assert!(matches!(
            fit_cubic_spline(&[(0.0, 1.0)]),
            Err(Error::TooFewKnots { got: 1 })
        ));
        assert!(matches!(
            fit_cubic_spline(&[(0.0, 1.0), (0.0, 2.0)]),
            Err(Error::NonIncreasingKnots { index: 1 })
        ));
        assert!(matches!(
            fit_cubic_spline(&[(1.0, 1.0), (0.5, 2.0)]),
            Err(Error::NonIncreasingKnots { index: 1 })
        ));
    }
}
