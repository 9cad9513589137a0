use crate::error::{Error, Result};

/// Split-conformal quantile at miscoverage `delta`, clamped at zero.
///
/// With `N` scores and `r = ceil((N + 1)(1 - delta))`: the maximum score when
/// `r > N`, otherwise the `r`-th smallest score.
pub fn conformal_quantile(scores: &[f64], delta: f64) -> Result<f64> {
    if scores.is_empty() {
        return Err(Error::InvalidArgument("conformal quantile of no scores".into()));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!("miscoverage must lie in (0, 1), got {delta}")));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::NonFinite("conformal scores"));
    }
    let n = scores.len();
    let mut sorted = scores.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let rank = quantile_rank(n, delta);
    let q = if rank > n { sorted[n - 1] } else { sorted[rank - 1] };
    Ok(q.max(0.0))
}

/// `ceil((N + 1)(1 - delta))`, guarded against round-off just above an integer.
pub fn quantile_rank(n: usize, delta: f64) -> usize {
    (((n + 1) as f64) * (1.0 - delta) - 1e-9).ceil().max(1.0) as usize
}

/// Fewer than `ceil(1/delta) - 1` scores make the quantile the maximum score.
pub fn is_degenerate(n: usize, delta: f64) -> bool {
    quantile_rank(n, delta) > n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_small_sample_takes_max() {
        let q = conformal_quantile(&[0.1, 0.2, 0.3, 0.4], 0.05).unwrap();
        assert_eq!(q, 0.4);
        assert!(is_degenerate(4, 0.05));
    }

    #[test]
    fn test_negative_scores_clamp() {
        assert_eq!(conformal_quantile(&[-0.3, -0.1, -2.0], 0.5).unwrap(), 0.0);
    }

    #[test]
    fn test_order_statistic() {
        let scores: Vec<f64> = (1..=99).rev().map(|i| i as f64).collect();
        assert_eq!(quantile_rank(99, 0.05), 95);
        assert_eq!(conformal_quantile(&scores, 0.05).unwrap(), 95.0);
        assert!(!is_degenerate(99, 0.05));
        assert!(conformal_quantile(&[], 0.05).is_err());
        assert!(conformal_quantile(&[1.0], 1.0).is_err());
    }
}
