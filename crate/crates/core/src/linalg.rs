//! Small dense linear-algebra helpers: matrix exponential, numerical rank and
//! the full-row-rank right pseudoinverse used by identification.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Relative singular-value threshold for numerical rank.
pub const RANK_TOL: f64 = 1e-10;

/// Largest accepted condition number of `D D^T`.
pub const MAX_GRAM_CONDITION: f64 = 1e12;

/// `exp(a)` by scaling and squaring on a truncated Taylor series.
pub fn expm(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !a.is_square() {
        return Err(Error::InvalidArgument("expm of a non-square matrix".into()));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("expm argument"));
    }
    let n = a.nrows();
    let norm = a.column_iter().map(|c| c.lp_norm(1)).fold(0.0, f64::max);
    let mut squarings = 0;
    if norm > 0.5 {
        squarings = (norm / 0.5).log2().ceil() as i32;
    }
    let scaled = a / 2f64.powi(squarings);

    let mut sum = DMatrix::identity(n, n);
    let mut term = DMatrix::identity(n, n);
    for k in 1..64 {
        term = &term * &scaled / k as f64;
        sum += &term;
        if term.amax() <= 1e-17 * sum.amax() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    Ok(sum)
}

pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Number of singular values above `RANK_TOL * sigma_max`.
pub fn numerical_rank(m: &DMatrix<f64>) -> usize {
    let s = singular_values(m);
    match s.first() {
        Some(&max) if max > 0.0 => s.iter().filter(|&&v| v > RANK_TOL * max).count(),
        _ => 0,
    }
}

/// `D^T (D D^T)^{-1}` for a full-row-rank `D`.
///
/// `resolution` names the data set in the rank diagnostic.
pub fn right_pseudoinverse(d: &DMatrix<f64>, resolution: &str) -> Result<DMatrix<f64>> {
    let rows = d.nrows();
    let rank = numerical_rank(d);
    if rank < rows {
        return Err(Error::RankDeficient {
            resolution: resolution.to_string(),
            rank,
            required: rows,
        });
    }
    let s = singular_values(d);
    let condition = (s[0] / s[rows - 1]).powi(2);
    if !(condition <= MAX_GRAM_CONDITION) {
        return Err(Error::IllConditioned(condition));
    }
    let gram = d * d.transpose();
    let chol = gram.cholesky().ok_or(Error::IllConditioned(condition))?;
    Ok(d.transpose() * chol.inverse())
}
