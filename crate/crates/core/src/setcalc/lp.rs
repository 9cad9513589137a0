//! Small linear programs behind the membership oracles.

use microlp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Is there `a` with `||a||_inf <= limit` and `G a = b`?
///
/// A positive answer is confirmed by checking the returned coefficients
/// against the equality residual; a negative answer from the min-norm program
/// is re-checked with a box-bounded feasibility program.
pub(crate) fn has_bounded_solution(g: &DMatrix<f64>, b: &DVector<f64>, limit: f64) -> Result<bool> {
    let scale = g.amax();
    if scale == 0.0 {
        return Ok(b.amax() == 0.0);
    }
    let residual_tol = 1e-9 * (scale + b.amax());
    let verified = |alpha: &DVector<f64>| {
        alpha.amax() <= limit && (g * alpha - b).amax() <= residual_tol
    };
    if let Some(alpha) = solve_min_norm(g, b, scale)? {
        if verified(&alpha) {
            return Ok(true);
        }
    }
    Ok(match solve_box(g, b, scale, limit)? {
        Some(alpha) => verified(&alpha),
        None => false,
    })
}

fn add_equalities(
    problem: &mut Problem,
    vars: &[microlp::Variable],
    g: &DMatrix<f64>,
    b: &DVector<f64>,
    scale: f64,
) -> bool {
    for r in 0..g.nrows() {
        let terms: Vec<_> = vars
            .iter()
            .enumerate()
            .filter(|&(c, _)| g[(r, c)] != 0.0)
            .map(|(c, &a)| (a, g[(r, c)] / scale))
            .collect();
        if terms.is_empty() {
            if b[r] != 0.0 {
                return false;
            }
            continue;
        }
        problem.add_constraint(terms.as_slice(), ComparisonOp::Eq, b[r] / scale);
    }
    true
}

/// `argmin ||a||_inf  s.t.  G a = b`, or `None` when the system is inconsistent.
///
/// The system is scaled by one factor; per-row scaling upsets the simplex on
/// nearly degenerate zonotopes.
fn solve_min_norm(g: &DMatrix<f64>, b: &DVector<f64>, scale: f64) -> Result<Option<DVector<f64>>> {
    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let alpha: Vec<_> = (0..g.ncols())
        .map(|_| problem.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY)))
        .collect();
    let bound = problem.add_var(1.0, (0.0, f64::INFINITY));
    for &a in &alpha {
        problem.add_constraint([(a, 1.0), (bound, -1.0)], ComparisonOp::Le, 0.0);
        problem.add_constraint([(a, -1.0), (bound, -1.0)], ComparisonOp::Le, 0.0);
    }
    if !add_equalities(&mut problem, &alpha, g, b, scale) {
        return Ok(None);
    }
    extract(problem.solve(), &alpha)
}

fn solve_box(g: &DMatrix<f64>, b: &DVector<f64>, scale: f64, limit: f64) -> Result<Option<DVector<f64>>> {
    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let alpha: Vec<_> = (0..g.ncols()).map(|_| problem.add_var(0.0, (-limit, limit))).collect();
    if !add_equalities(&mut problem, &alpha, g, b, scale) {
        return Ok(None);
    }
    extract(problem.solve(), &alpha)
}

fn extract(
    outcome: std::result::Result<microlp::SolveOutcome, microlp::Error>,
    vars: &[microlp::Variable],
) -> Result<Option<DVector<f64>>> {
    match outcome {
        Ok(outcome) => match outcome.solution() {
            Some(solution) => Ok(Some(DVector::from_iterator(
                vars.len(),
                vars.iter().map(|&v| solution[v]),
            ))),
            None => Err(Error::Lp("solver interrupted".into())),
        },
        Err(microlp::Error::Infeasible) => Ok(None),
        Err(e) => Err(Error::Lp(e.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_min_norm_simple() {
        // a1 + a2 = 1 -> best split 0.5 / 0.5
        let g = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        let b = DVector::from_vec(vec![1.0]);
        let norm = solve_min_norm(&g, &b, 1.0).unwrap().unwrap().amax();
        assert!((norm - 0.5).abs() < 1e-12);
    }

    #[test]
    fn test_inconsistent_system() {
        let g = DMatrix::from_row_slice(2, 1, &[1.0, 1.0]);
        let b = DVector::from_vec(vec![1.0, -1.0]);
        assert_eq!(solve_min_norm(&g, &b, 1.0).unwrap(), None);
    }

    #[test]
    fn test_zero_row_nonzero_rhs() {
        let g = DMatrix::from_row_slice(2, 1, &[1.0, 0.0]);
        let b = DVector::from_vec(vec![0.5, 1e-3]);
        assert_eq!(solve_min_norm(&g, &b, 1.0).unwrap(), None);
        assert!(!has_bounded_solution(&g, &b, 10.0).unwrap());
    }

    #[test]
    fn test_bounded_solution() {
        let g = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        let b = DVector::from_vec(vec![1.0]);
        assert!(has_bounded_solution(&g, &b, 0.5 + 1e-9).unwrap());
        assert!(!has_bounded_solution(&g, &b, 0.49).unwrap());
    }
}
