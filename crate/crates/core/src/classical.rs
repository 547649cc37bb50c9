//! Classical fitting baselines: least-squares line, exact polynomial
//! interpolation through a Vandermonde solve, and a natural cubic spline.
//!
//! All fits are pure functions of the input series. Fit these on
//! normalized coordinates when the raw times are large (POSIX timestamps
//! make the monomial powers overflow); the pipeline does so by default.

use crate::error::FitError;
use crate::series::TimeSeries;
use serde::{Deserialize, Serialize};

/// Pivot magnitudes below this are treated as singular.
const PIVOT_TOLERANCE: f64 = 1e-12;

/// Largest sample count accepted for exact polynomial interpolation.
/// Vandermonde conditioning degrades explosively beyond this.
pub const MAX_POLYNOMIAL_POINTS: usize = 30;

/// A fitted straight line `value = intercept + slope * time`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub intercept: f64,
    pub slope: f64,
}

impl LinearModel {
    /// Least-squares fit. Uses a one-pass running mean/covariance update,
    /// which stays stable for large sample counts.
    pub fn fit(series: &TimeSeries) -> Result<Self, FitError> {
        let n = series.len();
        if n < 2 {
            return Err(FitError::TooFewPoints {
                required: 2,
                actual: n,
            });
        }
        let mut count = 0.0;
        let mut mean_x = 0.0;
        let mut mean_y = 0.0;
        let mut sxx = 0.0;
        let mut sxy = 0.0;
        for (&x, &y) in series.times().iter().zip(series.values()) {
            count += 1.0;
            let dx = x - mean_x;
            mean_x += dx / count;
            sxx += dx * (x - mean_x);
            let dy = y - mean_y;
            mean_y += dy / count;
            sxy += dx * (y - mean_y);
        }
        let slope = sxy / sxx;
        let intercept = mean_y - slope * mean_x;
        Ok(Self { intercept, slope })
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }
}

/// Polynomial coefficients in ascending degree: `a[0] + a[1] x + a[2] x^2 + ...`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialModel {
    coefficients: Vec<f64>,
}

impl PolynomialModel {
    /// Wraps existing coefficients (used when deserializing).
    pub fn new(coefficients: Vec<f64>) -> Result<Self, FitError> {
        if coefficients.is_empty() {
            return Err(FitError::InvalidModel {
                reason: "no coefficients".into(),
            });
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(FitError::InvalidModel {
                reason: "non-finite coefficient".into(),
            });
        }
        Ok(Self { coefficients })
    }

    /// Exact interpolation: with k samples, solves the k-by-k Vandermonde
    /// system (rows `[1, x_i, x_i^2, ..., x_i^(k-1)]`) for the degree-(k-1)
    /// coefficients by Gaussian elimination with partial pivoting.
    pub fn fit(series: &TimeSeries) -> Result<Self, FitError> {
        let k = series.len();
        if k > MAX_POLYNOMIAL_POINTS {
            return Err(FitError::TooManyPoints {
                cap: MAX_POLYNOMIAL_POINTS,
                actual: k,
            });
        }
        let mut matrix = vec![0.0; k * k];
        for (i, &x) in series.times().iter().enumerate() {
            let mut power = 1.0;
            for j in 0..k {
                matrix[i * k + j] = power;
                power *= x;
            }
        }
        let coefficients = solve_dense(matrix, series.values().to_vec())?;
        Ok(Self { coefficients })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Horner-scheme evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * x + c)
    }
}

/// In-place Gaussian elimination with partial pivoting on a row-major
/// square matrix.
fn solve_dense(mut a: Vec<f64>, mut b: Vec<f64>) -> Result<Vec<f64>, FitError> {
    let n = b.len();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r, &s| {
                a[r * n + col]
                    .abs()
                    .total_cmp(&a[s * n + col].abs())
            })
            .expect("column range is nonempty");
        let pivot = a[pivot_row * n + col];
        if pivot.abs() < PIVOT_TOLERANCE {
            return Err(FitError::SingularSystem { column: col, pivot });
        }
        if pivot_row != col {
            for j in 0..n {
                a.swap(col * n + j, pivot_row * n + j);
            }
            b.swap(col, pivot_row);
        }
        for row in col + 1..n {
            let factor = a[row * n + col] / a[col * n + col];
            if factor == 0.0 {
                continue;
            }
            for j in col..n {
                a[row * n + j] -= factor * a[col * n + j];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for j in row + 1..n {
            acc -= a[row * n + j] * x[j];
        }
        x[row] = acc / a[row * n + row];
    }
    Ok(x)
}

/// Boundary condition of a cubic spline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    /// Second derivative zero at both end knots.
    Natural,
}

/// One cubic piece, in coordinates relative to its left knot:
/// `value(s) = offset + linear*s + quadratic*s^2 + cubic*s^3` with
/// `s = t - knot_time`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicSegment {
    pub offset: f64,
    pub linear: f64,
    pub quadratic: f64,
    pub cubic: f64,
}

impl CubicSegment {
    pub fn eval(&self, s: f64) -> f64 {
        ((self.cubic * s + self.quadratic) * s + self.linear) * s + self.offset
    }

    /// Second derivative at offset `s` into the segment.
    pub fn second_derivative(&self, s: f64) -> f64 {
        2.0 * self.quadratic + 6.0 * self.cubic * s
    }
}

/// A natural cubic spline: C2-continuous piecewise cubic through every
/// knot, with zero second derivative at both boundary knots.
#[derive(Debug, Clone, PartialEq)]
pub struct SplineModel {
    knot_times: Vec<f64>,
    knot_values: Vec<f64>,
    second_derivs: Vec<f64>,
    segments: Vec<CubicSegment>,
    boundary: BoundaryCondition,
}

impl SplineModel {
    /// Interpolating fit. Interior second derivatives come from the
    /// standard tridiagonal system, solved by the Thomas algorithm.
    pub fn fit(series: &TimeSeries) -> Result<Self, FitError> {
        let n = series.len();
        if n < 3 {
            return Err(FitError::TooFewPoints {
                required: 3,
                actual: n,
            });
        }
        let t = series.times();
        let v = series.values();
        let m = solve_natural_curvatures(t, v);
        Self::from_knots_and_curvatures(t.to_vec(), v.to_vec(), m)
    }

    /// Rebuilds a spline from its knots and per-knot second derivatives
    /// (used when deserializing). The boundary entries must be zero.
    pub fn from_knots_and_curvatures(
        knot_times: Vec<f64>,
        knot_values: Vec<f64>,
        second_derivs: Vec<f64>,
    ) -> Result<Self, FitError> {
        let n = knot_times.len();
        if n < 3 {
            return Err(FitError::TooFewPoints {
                required: 3,
                actual: n,
            });
        }
        if knot_values.len() != n || second_derivs.len() != n {
            return Err(FitError::InvalidModel {
                reason: "knot arrays differ in length".into(),
            });
        }
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        if !finite(&knot_times) || !finite(&knot_values) || !finite(&second_derivs) {
            return Err(FitError::InvalidModel {
                reason: "non-finite knot data".into(),
            });
        }
        if knot_times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(FitError::InvalidModel {
                reason: "knot times not strictly increasing".into(),
            });
        }
        if second_derivs[0] != 0.0 || second_derivs[n - 1] != 0.0 {
            return Err(FitError::InvalidModel {
                reason: "boundary second derivatives must be zero".into(),
            });
        }
        let segments = (0..n - 1)
            .map(|i| {
                let h = knot_times[i + 1] - knot_times[i];
                CubicSegment {
                    offset: knot_values[i],
                    linear: (knot_values[i + 1] - knot_values[i]) / h
                        - h * (2.0 * second_derivs[i] + second_derivs[i + 1]) / 6.0,
                    quadratic: second_derivs[i] / 2.0,
                    cubic: (second_derivs[i + 1] - second_derivs[i]) / (6.0 * h),
                }
            })
            .collect();
        Ok(Self {
            knot_times,
            knot_values,
            second_derivs,
            segments,
            boundary: BoundaryCondition::Natural,
        })
    }

    pub fn knot_times(&self) -> &[f64] {
        &self.knot_times
    }

    pub fn knot_values(&self) -> &[f64] {
        &self.knot_values
    }

    /// Second derivative of the spline at each knot.
    pub fn second_derivs(&self) -> &[f64] {
        &self.second_derivs
    }

    pub fn segments(&self) -> &[CubicSegment] {
        &self.segments
    }

    pub fn boundary(&self) -> BoundaryCondition {
        self.boundary
    }

    /// Evaluates inside the knot range; anything outside is an error,
    /// cubic extrapolation is never performed.
    pub fn eval(&self, x: f64) -> Result<f64, FitError> {
        let n = self.knot_times.len();
        let start = self.knot_times[0];
        let end = self.knot_times[n - 1];
        if x < start || x > end {
            return Err(FitError::OutOfRange { x, start, end });
        }
        // Binary search for the segment whose left knot is the last one <= x.
        let idx = self
            .knot_times
            .partition_point(|&t| t <= x)
            .saturating_sub(1)
            .min(n - 2);
        Ok(self.segments[idx].eval(x - self.knot_times[idx]))
    }
}

/// Natural-spline second derivatives at every knot: zero at the ends,
/// interior values from the tridiagonal system
/// `h[i-1] m[i-1] + 2(h[i-1]+h[i]) m[i] + h[i] m[i+1] = 6 (d[i] - d[i-1])`
/// where `d[i]` is the slope of interval i.
fn solve_natural_curvatures(t: &[f64], v: &[f64]) -> Vec<f64> {
    let n = t.len();
    let mut m = vec![0.0; n];
    let interior = n - 2;
    if interior == 0 {
        return m;
    }
    let h: Vec<f64> = (0..n - 1).map(|i| t[i + 1] - t[i]).collect();
    let slope: Vec<f64> = (0..n - 1).map(|i| (v[i + 1] - v[i]) / h[i]).collect();

    // Thomas algorithm on the interior unknowns m[1..n-1].
    let mut diag: Vec<f64> = (0..interior).map(|i| 2.0 * (h[i] + h[i + 1])).collect();
    let mut rhs: Vec<f64> = (0..interior)
        .map(|i| 6.0 * (slope[i + 1] - slope[i]))
        .collect();
    for i in 1..interior {
        let w = h[i] / diag[i - 1];
        diag[i] -= w * h[i];
        rhs[i] -= w * rhs[i - 1];
    }
    m[interior] = rhs[interior - 1] / diag[interior - 1];
    for i in (0..interior - 1).rev() {
        m[i + 1] = (rhs[i] - h[i + 1] * m[i + 2]) / diag[i];
    }
    m
}

#[cfg(test)]
#[allow(clippy::needless_range_loop)] // oracles stay naive on purpose
mod tests {
    use super::*;

    fn series(times: &[f64], values: &[f64]) -> TimeSeries {
        TimeSeries::new(times.to_vec(), values.to_vec()).unwrap()
    }

    /// Two-pass centered-sum least squares, kept independent of the
    /// one-pass implementation it checks.
    fn linear_oracle(x: &[f64], y: &[f64]) -> (f64, f64) {
        let n = x.len() as f64;
        let mean_x = x.iter().sum::<f64>() / n;
        let mean_y = y.iter().sum::<f64>() / n;
        let sxx: f64 = x.iter().map(|&xi| (xi - mean_x) * (xi - mean_x)).sum();
        let sxy: f64 = x
            .iter()
            .zip(y)
            .map(|(&xi, &yi)| (xi - mean_x) * (yi - mean_y))
            .sum();
        let slope = sxy / sxx;
        (mean_y - slope * mean_x, slope)
    }

    /// Lagrange-form interpolation, independent of the Vandermonde solve.
    fn lagrange_oracle(x: &[f64], y: &[f64], q: f64) -> f64 {
        let mut total = 0.0;
        for i in 0..x.len() {
            let mut basis = 1.0;
            for j in 0..x.len() {
                if i != j {
                    basis *= (q - x[j]) / (x[i] - x[j]);
                }
            }
            total += y[i] * basis;
        }
        total
    }

    #[test]
    fn linear_recovers_exact_line() {
        let m = LinearModel::fit(&series(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0])).unwrap();
        assert!((m.intercept - 1.0).abs() < 1e-12);
        assert!((m.slope - 2.0).abs() < 1e-12);
        assert_eq!(m.eval(0.0), m.intercept);
        assert!((m.eval(3.0) - 7.0).abs() < 1e-12);
    }

    #[test]
    fn linear_constant_data_has_zero_slope() {
        let m = LinearModel::fit(&series(&[0.0, 1.0, 5.0], &[4.0, 4.0, 4.0])).unwrap();
        assert!((m.intercept - 4.0).abs() < 1e-12);
        assert!(m.slope.abs() < 1e-12);
    }

    #[test]
    fn linear_matches_centered_sum_oracle_on_survey_data() {
        let x = [1.0, 3.0, 5.0, 7.0, 9.0];
        let y = [230.02, 321.01, 305.00, 245.75, 345.62];
        let m = LinearModel::fit(&series(&x, &y)).unwrap();
        let (b0, b1) = linear_oracle(&x, &y);
        assert!((m.intercept - b0).abs() <= 1e-10 * b0.abs());
        assert!((m.slope - b1).abs() <= 1e-10 * b1.abs());
        // The same oracle fixes the prediction at x = 4.
        assert!((m.eval(4.0) - (b0 + 4.0 * b1)).abs() <= 1e-10 * (b0 + 4.0 * b1).abs());
    }

    #[test]
    fn linear_rejects_single_point() {
        assert!(matches!(
            LinearModel::fit(&series(&[1.0], &[1.0])),
            Err(FitError::TooFewPoints { .. })
        ));
    }

    #[test]
    fn polynomial_constant_data() {
        let p = PolynomialModel::fit(&series(&[0.0, 1.0], &[5.0, 5.0])).unwrap();
        assert_eq!(p.coefficients(), &[5.0, 0.0]);
        assert_eq!(p.eval(17.3), 5.0);
    }

    #[test]
    fn polynomial_exact_parabola() {
        let p = PolynomialModel::fit(&series(&[0.0, 1.0, 2.0], &[0.0, 1.0, 4.0])).unwrap();
        assert!(p.coefficients()[0].abs() < 1e-12);
        assert!(p.coefficients()[1].abs() < 1e-12);
        assert!((p.coefficients()[2] - 1.0).abs() < 1e-12);
        assert!((p.eval(3.0) - 9.0).abs() < 1e-11);
    }

    #[test]
    fn polynomial_degree_four_matches_lagrange_oracle() {
        let x = [1.0, 3.0, 5.0, 7.0, 9.0];
        let y = [230.02, 321.01, 305.00, 245.75, 345.62];
        let p = PolynomialModel::fit(&series(&x, &y)).unwrap();
        assert_eq!(p.degree(), 4);
        for (&xi, &yi) in x.iter().zip(&y) {
            assert!((p.eval(xi) - yi).abs() < 1e-8, "residual at {xi}");
        }
        let expected = lagrange_oracle(&x, &y, 4.0);
        assert!((p.eval(4.0) - expected).abs() < 1e-8);
    }

    #[test]
    fn polynomial_eval_matches_naive_power_sum() {
        let coeffs = [0.3, -1.1, 0.07, 2.4, -0.9, 0.001, 1.7];
        let p = PolynomialModel::new(coeffs.to_vec()).unwrap();
        for k in 0..20 {
            let x = -1.0 + k as f64 * 0.1;
            let mut naive = 0.0;
            for (i, &c) in coeffs.iter().enumerate() {
                naive += c * x.powi(i as i32);
            }
            let got = p.eval(x);
            assert!(
                (got - naive).abs() <= 1e-12 * naive.abs().max(1.0),
                "x={x}: {got} vs {naive}"
            );
        }
    }

    #[test]
    fn polynomial_rejects_too_many_points() {
        let times: Vec<f64> = (0..31).map(|i| i as f64 / 30.0).collect();
        let values = vec![1.0; 31];
        assert_eq!(
            PolynomialModel::fit(&series(&times, &values)).unwrap_err(),
            FitError::TooManyPoints { cap: 30, actual: 31 }
        );
    }

    #[test]
    fn polynomial_near_duplicate_nodes_are_singular() {
        let err =
            PolynomialModel::fit(&series(&[0.0, 1e-13, 1.0], &[0.0, 0.0, 1.0])).unwrap_err();
        assert!(matches!(err, FitError::SingularSystem { .. }), "{err:?}");
    }

    #[test]
    fn polynomial_reproduces_nodes_up_to_degree_nine() {
        for k in 1..=10usize {
            let times: Vec<f64> = (0..k).map(|i| i as f64 / (k.max(2) - 1) as f64).collect();
            let values: Vec<f64> = times.iter().map(|&t| (5.0 * t).sin() + 0.3).collect();
            let p = PolynomialModel::fit(&series(&times, &values)).unwrap();
            for (&t, &v) in times.iter().zip(&values) {
                assert!((p.eval(t) - v).abs() <= 1e-8, "k={k} t={t}");
            }
        }
    }

    #[test]
    fn spline_reproduces_affine_data_everywhere() {
        let s = SplineModel::fit(&series(&[0.0, 1.0, 2.0], &[0.0, 2.0, 4.0])).unwrap();
        assert!((s.eval(0.5).unwrap() - 1.0).abs() < 1e-12);
        for k in 0..=100 {
            let x = 2.0 * k as f64 / 100.0;
            assert!((s.eval(x).unwrap() - 2.0 * x).abs() <= 1e-10);
        }
    }

    #[test]
    fn spline_interpolates_every_knot() {
        let t = [0.0, 0.4, 1.1, 2.0, 3.3];
        let v = [1.0, -0.5, 2.2, 0.0, 1.7];
        let s = SplineModel::fit(&series(&t, &v)).unwrap();
        for (&ti, &vi) in t.iter().zip(&v) {
            assert!((s.eval(ti).unwrap() - vi).abs() < 1e-12);
        }
    }

    #[test]
    fn spline_matches_dense_tridiagonal_oracle() {
        let t = [0.0, 1.0, 2.0, 3.0];
        let v = [0.0, 1.0, 0.0, 1.0];
        let s = SplineModel::fit(&series(&t, &v)).unwrap();
        let expected = spline_oracle(&t, &v, 1.5);
        assert!((s.eval(1.5).unwrap() - expected).abs() < 1e-10);
    }

    #[test]
    fn spline_second_derivative_is_continuous() {
        let t = [0.0, 0.7, 1.3, 2.9, 4.0, 5.5];
        let v = [0.3, -1.0, 2.0, 0.4, 0.9, -0.2];
        let s = SplineModel::fit(&series(&t, &v)).unwrap();
        let segs = s.segments();
        for i in 1..t.len() - 1 {
            let from_left = segs[i - 1].second_derivative(t[i] - t[i - 1]);
            let from_right = segs[i].second_derivative(0.0);
            let scale = from_left.abs().max(from_right.abs()).max(1e-8);
            assert!(
                (from_left - from_right).abs() <= 1e-8 * scale,
                "knot {i}: {from_left} vs {from_right}"
            );
        }
        // Natural boundary: zero curvature at the ends.
        assert_eq!(s.second_derivs()[0], 0.0);
        assert_eq!(s.second_derivs()[t.len() - 1], 0.0);
    }

    #[test]
    fn spline_refuses_extrapolation() {
        let s = SplineModel::fit(&series(&[0.0, 1.0, 2.0], &[0.0, 1.0, 0.0])).unwrap();
        assert!(matches!(s.eval(-0.1), Err(FitError::OutOfRange { .. })));
        assert!(matches!(s.eval(2.1), Err(FitError::OutOfRange { .. })));
        assert!(s.eval(0.0).is_ok());
        assert!(s.eval(2.0).is_ok());
    }

    #[test]
    fn spline_rejects_two_points() {
        assert!(matches!(
            SplineModel::fit(&series(&[0.0, 1.0], &[0.0, 1.0])),
            Err(FitError::TooFewPoints { .. })
        ));
    }

    /// Independent natural-spline oracle: assembles the full dense interior
    /// system, solves it by Gauss-Jordan, and evaluates with the
    /// two-endpoint weighted form rather than segment coefficients.
    pub(super) fn spline_oracle(t: &[f64], v: &[f64], q: f64) -> f64 {
        let n = t.len();
        let interior = n - 2;
        let mut a = vec![vec![0.0; interior]; interior];
        let mut rhs = vec![0.0; interior];
        for i in 0..interior {
            let h_lo = t[i + 1] - t[i];
            let h_hi = t[i + 2] - t[i + 1];
            if i > 0 {
                a[i][i - 1] = h_lo;
            }
            a[i][i] = 2.0 * (h_lo + h_hi);
            if i + 1 < interior {
                a[i][i + 1] = h_hi;
            }
            rhs[i] = 6.0 * ((v[i + 2] - v[i + 1]) / h_hi - (v[i + 1] - v[i]) / h_lo);
        }
        // Gauss-Jordan without pivoting (the system is diagonally dominant).
        for col in 0..interior {
            let p = a[col][col];
            for j in 0..interior {
                a[col][j] /= p;
            }
            rhs[col] /= p;
            for row in 0..interior {
                if row != col {
                    let f = a[row][col];
                    for j in 0..interior {
                        a[row][j] -= f * a[col][j];
                    }
                    rhs[row] -= f * rhs[col];
                }
            }
        }
        let mut m = vec![0.0; n];
        m[1..=interior].copy_from_slice(&rhs);

        let mut lo = 0;
        while lo + 2 < n && t[lo + 1] <= q {
            lo += 1;
        }
        let hi = lo + 1;
        let h = t[hi] - t[lo];
        let alpha = (t[hi] - q) / h;
        let beta = (q - t[lo]) / h;
        alpha * v[lo]
            + beta * v[hi]
            + ((alpha * alpha * alpha - alpha) * m[lo] + (beta * beta * beta - beta) * m[hi]) * h
                * h
                / 6.0
    }
}
