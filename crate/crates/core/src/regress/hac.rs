//! Newey-West (Bartlett-kernel) standard errors.
//!
//! The sandwich is
//!
//! ```text
//! cov = (X'X)^-1 [ G_0 + sum_{j=1..L} w_j (G_j + G_j') ] (X'X)^-1,
//! G_j = Z[j..]' Z[..n-j],   Z = X scaled row-wise by the residuals,
//! w_j = 1 - j / (L + 1).
//! ```
//!
//! At lag 0 this reduces to the heteroskedasticity-only (White) estimator.
//! No small-sample correction is applied.

use ndarray::{Array2, ArrayView2, Axis, s};
use ndarray_linalg::Inverse;

use crate::error::{Error, Result};

/// Per-coefficient Newey-West standard errors for a fitted design and its
/// residual vector.
pub fn newey_west_se(
    design: ArrayView2<'_, f64>,
    residuals: &[f64],
    max_lag: usize,
) -> Result<Vec<f64>> {
    let (n, _) = design.dim();
    if residuals.len() != n {
        return Err(Error::invalid(format!(
            "design has {n} rows but residual vector has {}",
            residuals.len()
        )));
    }
    if n == 0 {
        return Err(Error::invalid("empty sample"));
    }
    if max_lag >= n {
        return Err(Error::invalid(format!(
            "max_lag {max_lag} must be smaller than the sample size {n}"
        )));
    }

    let xtx = design.t().dot(&design);
    let bread = xtx
        .inv()
        .map_err(|e| Error::numerical(format!("X'X is singular: {e}")))?;

    // Z has rows x_t * e_t; lagged cross-products become matrix products.
    let mut z = design.to_owned();
    for (mut row, &e) in z.rows_mut().into_iter().zip(residuals.iter()) {
        row.mapv_inplace(|v| v * e);
    }

    let mut meat: Array2<f64> = z.t().dot(&z);
    for lag in 1..=max_lag {
        let w = 1.0 - lag as f64 / (max_lag as f64 + 1.0);
        let lead = z.slice(s![lag.., ..]);
        let trail = z.slice(s![..n - lag, ..]);
        let gamma = lead.t().dot(&trail);
        meat.scaled_add(w, &gamma);
        meat.scaled_add(w, &gamma.t());
    }

    let cov = bread.dot(&meat).dot(&bread);
    Ok(cov
        .diag()
        .axis_iter(Axis(0))
        .map(|v| v.into_scalar().max(0.0).sqrt())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_design(n: usize, p: usize, seed: u64) -> Array2<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Array2::from_shape_fn((n, p), |(_, j)| {
            if j == 0 {
                1.0
            } else {
                rng.random_range(-1.0..1.0)
            }
        })
    }

    #[test]
    fn zero_residuals_give_zero_errors() {
        let x = random_design(50, 3, 1);
        let se = newey_west_se(x.view(), &vec![0.0; 50], 5).unwrap();
        assert!(se.iter().all(|s| *s == 0.0));
    }

    #[test]
    fn lag_zero_matches_direct_white_formula() {
        let n = 200;
        let p = 4;
        let x = random_design(n, p, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let e: Vec<f64> = (0..n).map(|_| rng.random_range(-0.5..0.5)).collect();

        let se = newey_west_se(x.view(), &e, 0).unwrap();

        // Independent scalar-loop sandwich: (X'X)^-1 S (X'X)^-1 with
        // S = sum_t e_t^2 x_t x_t'.
        let mut xtx = vec![vec![0.0; p]; p];
        let mut meat = vec![vec![0.0; p]; p];
        for t in 0..n {
            for i in 0..p {
                for j in 0..p {
                    xtx[i][j] += x[[t, i]] * x[[t, j]];
                    meat[i][j] += e[t] * e[t] * x[[t, i]] * x[[t, j]];
                }
            }
        }
        let inv = invert(&xtx);
        let mut cov = vec![vec![0.0; p]; p];
        for i in 0..p {
            for j in 0..p {
                for a in 0..p {
                    for b in 0..p {
                        cov[i][j] += inv[i][a] * meat[a][b] * inv[b][j];
                    }
                }
            }
        }
        for i in 0..p {
            let direct = cov[i][i].sqrt();
            assert!(
                (se[i] - direct).abs() <= 1e-8 * direct.max(1e-30),
                "coef {i}: {} vs {}",
                se[i],
                direct
            );
        }
    }

    #[test]
    fn rejects_lag_at_or_beyond_sample() {
        let x = random_design(10, 2, 4);
        assert!(newey_west_se(x.view(), &vec![0.1; 10], 10).is_err());
        assert!(newey_west_se(x.view(), &vec![0.1; 10], 9).is_ok());
    }

    // Gauss-Jordan inverse for the test oracle only.
    fn invert(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let p = m.len();
        let mut a: Vec<Vec<f64>> = m.iter().cloned().collect();
        let mut inv = vec![vec![0.0; p]; p];
        for (i, row) in inv.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        for col in 0..p {
            let pivot_row = (col..p)
                .max_by(|&r1, &r2| a[r1][col].abs().partial_cmp(&a[r2][col].abs()).unwrap())
                .unwrap();
            a.swap(col, pivot_row);
            inv.swap(col, pivot_row);
            let pivot = a[col][col];
            for j in 0..p {
                a[col][j] /= pivot;
                inv[col][j] /= pivot;
            }
            for r in 0..p {
                if r != col {
                    let f = a[r][col];
                    for j in 0..p {
                        a[r][j] -= f * a[col][j];
                        inv[r][j] -= f * inv[col][j];
                    }
                }
            }
        }
        inv
    }
}
