use crate::error::{check_dim, Error, Result};
use crate::setcalc::Zonotope;

/// One substep query: predict the set `j` substeps into an interval of `ns`
/// from the previous set and the interval's endpoint anchor.
#[derive(Debug, Clone, Copy)]
pub struct PredictionQuery<'a> {
    pub current: &'a Zonotope,
    pub endpoint: &'a Zonotope,
    pub j: usize,
    pub ns: usize,
    /// Time of `current` as a fraction of the horizon.
    pub tau_current: f64,
    /// Time of `endpoint` as a fraction of the horizon.
    pub tau_endpoint: f64,
}

/// A deterministic set-valued one-substep predictor.
pub trait SetPredictor: Sync {
    fn predict(&self, query: &PredictionQuery<'_>) -> Result<Zonotope>;
}

/// Convex blend of the current set and the endpoint anchor.
///
/// Center `((ns - j) c_cur + j c_end) / ns`, generators
/// `[(ns - j)/ns G_cur, j/ns G_end]` reduced to `order`.
#[derive(Debug, Clone, Copy)]
pub struct BaselinePredictor {
    pub order: usize,
}

impl BaselinePredictor {
    pub fn blend(&self, current: &Zonotope, endpoint: &Zonotope, j: usize, ns: usize) -> Result<Zonotope> {
        check_dim("baseline predictor", current.dim(), endpoint.dim())?;
        if ns == 0 || j > ns {
            return Err(Error::InvalidArgument(format!("substep {j} outside interval of {ns}")));
        }
        let w_end = j as f64 / ns as f64;
        let w_cur = (ns - j) as f64 / ns as f64;
        if j == 0 {
            return Ok(current.clone());
        }
        current
            .scale(w_cur)
            .minkowski_sum(&endpoint.scale(w_end))?
            .reduce_order(self.order)
    }
}

impl SetPredictor for BaselinePredictor {
    fn predict(&self, q: &PredictionQuery<'_>) -> Result<Zonotope> {
        self.blend(q.current, q.endpoint, q.j, q.ns)
    }
}
