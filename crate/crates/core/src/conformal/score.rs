use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, Error, Result};
use crate::setcalc::Zonotope;

/// Worst signed violation of the predicted interval hull by any state on any
/// axis. Negative when every state lies strictly inside.
pub fn pointwise_score(predicted: &Zonotope, states: &[DVector<f64>]) -> Result<f64> {
    if states.is_empty() {
        return Err(Error::InvalidArgument("score needs at least one state".into()));
    }
    let hull = predicted.interval_hull();
    let mut worst = f64::NEG_INFINITY;
    for x in states {
        check_dim("score state", hull.dim(), x.len())?;
        for d in 0..hull.dim() {
            worst = worst.max((hull.lower()[d] - x[d]).max(x[d] - hull.upper()[d]));
        }
    }
    Ok(worst)
}

/// Maximum of the pointwise scores over aligned substeps.
pub fn pathwise_score(predicted: &[Zonotope], states: &[Vec<DVector<f64>>]) -> Result<f64> {
    if predicted.len() != states.len() || predicted.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "{} predicted sets against {} state groups",
            predicted.len(),
            states.len()
        )));
    }
    predicted
        .iter()
        .zip(states)
        .try_fold(f64::NEG_INFINITY, |acc, (z, xs)| Ok(acc.max(pointwise_score(z, xs)?)))
}

/// `Z + <0, q I>`.
pub fn inflate(z: &Zonotope, q: f64) -> Result<Zonotope> {
    if !(q >= 0.0) || !q.is_finite() {
        return Err(Error::InvalidArgument(format!("inflation must be a nonnegative number, got {q}")));
    }
    if q == 0.0 {
        return Ok(z.clone());
    }
    let n = z.dim();
    z.minkowski_sum(&Zonotope::new(DVector::zeros(n), DMatrix::identity(n, n) * q)?)
}
