//! Least-squares solve via orthogonal decomposition (LAPACK `dgelsd`).
//!
//! Normal equations are never formed for the solve itself; rank-deficient
//! systems fall back to the minimum-norm solution with a logged warning.

use ndarray::{Array1, Array2, ArrayView2};
use ndarray_linalg::LeastSquaresSvd;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct LsFit {
    pub coefficients: Vec<f64>,
    pub residuals: Vec<f64>,
    pub rank: usize,
}

pub fn least_squares(design: ArrayView2<'_, f64>, y: &[f64]) -> Result<LsFit> {
    let (n, p) = design.dim();
    if n == 0 || p == 0 {
        return Err(Error::invalid("least squares needs a non-empty design"));
    }
    if y.len() != n {
        return Err(Error::invalid(format!(
            "design has {n} rows but response has {} entries",
            y.len()
        )));
    }
    if n < p {
        return Err(Error::invalid(format!(
            "least squares needs at least as many rows as columns ({n} < {p})"
        )));
    }
    if y.iter().any(|v| !v.is_finite()) || design.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("non-finite entries in least-squares inputs"));
    }

    let a: Array2<f64> = design.to_owned();
    let b = Array1::from_vec(y.to_vec());
    let solved = a
        .least_squares(&b)
        .map_err(|e| Error::numerical(format!("least-squares solve failed: {e}")))?;
    let rank = solved.rank as usize;
    if rank < p {
        log::warn!(
            "rank-deficient design ({rank} < {p} columns); using the minimum-norm solution"
        );
    }
    let fitted = design.dot(&solved.solution);
    let residuals = b
        .iter()
        .zip(fitted.iter())
        .map(|(yi, fi)| yi - fi)
        .collect();
    Ok(LsFit { coefficients: solved.solution.to_vec(), residuals, rank })
}
