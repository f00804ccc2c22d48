//! Natural cubic spline basis on an equally spaced knot vector.
//!
//! A basis with `K` knots has exactly `K` columns. The span contains all
//! affine functions, every column is C2 everywhere, and each column is
//! exactly linear beyond the boundary knots. Construction follows the
//! truncated-power form
//!
//! ```text
//! N_1(u) = 1,  N_2(u) = u,  N_{k+2}(u) = d_k(u) - d_{K-1}(u),
//! d_j(u)  = [ (u - u_j)_+^3 - (u - u_K)_+^3 ] / (u_K - u_j),
//! ```
//!
//! evaluated after rescaling x onto [0, 1] so column magnitudes stay O(K)
//! regardless of the domain.

use ndarray::Array2;

use crate::error::{Error, Result};

/// Equally spaced knots over the closed domain, boundary knots at the ends.
pub fn knot_vector(n_knots: usize, domain: (f64, f64)) -> Vec<f64> {
    let (lo, hi) = domain;
    (0..n_knots)
        .map(|i| lo + (hi - lo) * i as f64 / (n_knots - 1) as f64)
        .collect()
}

/// Evaluate the `n_knots`-column natural cubic spline basis at each `x`.
///
/// Points outside the domain are evaluated on the basis' linear extension.
pub fn natural_spline_basis(
    x: &[f64],
    n_knots: usize,
    domain: (f64, f64),
) -> Result<Array2<f64>> {
    let eval = SplineEval::new(n_knots, domain)?;
    let mut out = Array2::zeros((x.len(), n_knots));
    for (xi, mut row) in x.iter().zip(out.rows_mut()) {
        eval.eval_into(*xi, row.as_slice_mut().expect("row-major basis"));
    }
    Ok(out)
}

/// Reusable evaluator for one knot configuration.
#[derive(Debug, Clone)]
pub struct SplineEval {
    n_knots: usize,
    lo: f64,
    span: f64,
    /// Knot positions on the normalized [0, 1] scale.
    knots_u: Vec<f64>,
}

impl SplineEval {
    pub fn new(n_knots: usize, domain: (f64, f64)) -> Result<Self> {
        if n_knots < 3 {
            return Err(Error::invalid(format!(
                "natural spline basis needs at least 3 knots, got {n_knots}"
            )));
        }
        let (lo, hi) = domain;
        if !(hi > lo) {
            return Err(Error::invalid(format!("degenerate spline domain [{lo}, {hi}]")));
        }
        let knots_u = (0..n_knots).map(|i| i as f64 / (n_knots - 1) as f64).collect();
        Ok(SplineEval { n_knots, lo, span: hi - lo, knots_u })
    }

    pub fn n_cols(&self) -> usize {
        self.n_knots
    }

    /// Knot positions on the original x scale.
    pub fn knots(&self) -> Vec<f64> {
        self.knots_u.iter().map(|u| self.lo + u * self.span).collect()
    }

    pub fn eval_into(&self, x: f64, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.n_knots);
        let u = (x - self.lo) / self.span;
        let k = self.n_knots;
        out[0] = 1.0;
        out[1] = u;
        let d_last = self.d(k - 2, u);
        for j in 0..k - 2 {
            out[j + 2] = self.d(j, u) - d_last;
        }
    }

    fn d(&self, j: usize, u: f64) -> f64 {
        let boundary = self.knots_u[self.n_knots - 1];
        (cube_plus(u - self.knots_u[j]) - cube_plus(u - boundary)) / (boundary - self.knots_u[j])
    }
}

fn cube_plus(t: f64) -> f64 {
    if t > 0.0 {
        t * t * t
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array1;
    use ndarray_linalg::LeastSquaresSvd;

    fn eval_one(n_knots: usize, domain: (f64, f64), col: usize, x: f64) -> f64 {
        let e = SplineEval::new(n_knots, domain).unwrap();
        let mut row = vec![0.0; n_knots];
        e.eval_into(x, &mut row);
        row[col]
    }

    #[test]
    fn rejects_too_few_knots() {
        assert!(SplineEval::new(2, (0.0, 1.0)).is_err());
        assert!(SplineEval::new(3, (0.0, 1.0)).is_ok());
    }

    #[test]
    fn column_count_equals_knots() {
        for k in [3usize, 6, 19, 24] {
            let b = natural_spline_basis(&[1.0, 12.0, 24.0], k, (1.0, 24.0)).unwrap();
            assert_eq!(b.ncols(), k);
        }
    }

    #[test]
    fn reproduces_affine_functions() {
        // Least-squares fit of f(x) = 3x + 1 on the basis is exact.
        for k in [3usize, 6, 19] {
            let xs: Vec<f64> = (0..200).map(|i| 1.0 + 23.0 * i as f64 / 199.0).collect();
            let basis = natural_spline_basis(&xs, k, (1.0, 24.0)).unwrap();
            let y: Array1<f64> = xs.iter().map(|x| 3.0 * x + 1.0).collect();
            let fit = basis.least_squares(&y).unwrap();
            let resid = &y - &basis.dot(&fit.solution);
            let max_resid = resid.iter().fold(0.0f64, |m, r| m.max(r.abs()));
            assert!(max_resid < 1e-9, "K={k}: max residual {max_resid}");
        }
    }

    #[test]
    fn linear_beyond_boundary_knots() {
        // Second central differences vanish outside the boundary knots.
        let k = 6;
        let domain = (1.0, 24.0);
        for col in 0..k {
            for &x in &[-10.0, -3.0, 26.0, 40.0] {
                let h = 0.5;
                let f = |x| eval_one(k, domain, col, x);
                let second = (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
                assert!(second.abs() < 1e-8, "col {col} at x={x}: {second}");
            }
        }
    }

    #[test]
    fn c2_continuity_at_knots() {
        // Each piece is a cubic, so a centered second difference inside a
        // piece is exact and f'' extrapolates linearly to the knot from
        // either side. The two one-sided extrapolations must agree.
        let k = 7;
        let domain = (1.0, 24.0);
        let eval = SplineEval::new(k, domain).unwrap();
        let knots = eval.knots();
        let h = (knots[1] - knots[0]) / 8.0;
        for col in 0..k {
            let f = |x| eval_one(k, domain, col, x);
            let second = |x: f64| (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
            for &knot in &knots {
                let left = 2.0 * second(knot - h) - second(knot - 2.0 * h);
                let right = 2.0 * second(knot + h) - second(knot + 2.0 * h);
                assert!(
                    (left - right).abs() < 1e-6,
                    "col {col} at knot {knot}: f'' jump {left} vs {right}"
                );
            }
        }
    }

    #[test]
    fn sample_points_match_direct_formula() {
        // Scalar recomputation of the truncated-power construction.
        let k = 5;
        let e = SplineEval::new(k, (0.0, 1.0)).unwrap();
        let knots: Vec<f64> = (0..k).map(|i| i as f64 / (k - 1) as f64).collect();
        let cube = |t: f64| if t > 0.0 { t * t * t } else { 0.0 };
        let d = |j: usize, u: f64| {
            (cube(u - knots[j]) - cube(u - knots[k - 1])) / (knots[k - 1] - knots[j])
        };
        for &u in &[0.0, 0.1, 0.33, 0.5, 0.9, 1.0] {
            let mut row = vec![0.0; k];
            e.eval_into(u, &mut row);
            assert_eq!(row[0], 1.0);
            assert_eq!(row[1], u);
            for j in 0..k - 2 {
                assert!((row[j + 2] - (d(j, u) - d(k - 2, u))).abs() < 1e-15);
            }
        }
    }
}
