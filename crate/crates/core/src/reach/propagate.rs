use nalgebra::DMatrix;

use super::chain::{ReachChain, SetKind};
use crate::ddmodel::ModelSet;
use crate::error::{check_dim, Error, Result};
use crate::setcalc::{MatrixZonotope, Zonotope};

/// Horizon and resolution shared by every chain.
#[derive(Debug, Clone)]
pub struct ChainConfig {
    /// Number of coarse steps.
    pub k: usize,
    /// Fine substeps per coarse step.
    pub ns: usize,
    /// Reduction order.
    pub order: usize,
    /// Fine step size in seconds.
    pub delta_f: f64,
    pub input_set: Zonotope,
}

impl ChainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ns < 1 || self.order < 1 {
            return Err(Error::InvalidArgument(
                "substeps and reduction order must be positive".into(),
            ));
        }
        if !(self.delta_f > 0.0) {
            return Err(Error::InvalidArgument("fine step must be positive".into()));
        }
        Ok(())
    }

    /// Physical time of fine index `i`.
    pub fn fine_time(&self, i: usize) -> f64 {
        i as f64 * self.delta_f
    }

    pub fn horizon(&self) -> f64 {
        self.fine_time(self.k * self.ns)
    }
}

/// `reduce(M (R x U) + Z_w)`.
pub fn propagate_step(
    model: &MatrixZonotope,
    r: &Zonotope,
    u: &Zonotope,
    noise: &Zonotope,
    order: usize,
) -> Result<Zonotope> {
    model
        .mul_zonotope(&r.cartesian_product(u))?
        .minkowski_sum(noise)?
        .reduce_order(order)
}

/// Sequential coarse chain `R_0 = X0`, `R_{k+1} = step(R_k)`; `K` multiplications.
pub fn compute_anchors(
    cfg: &ChainConfig,
    coarse: &ModelSet,
    x0: &Zonotope,
    coarse_noise: &Zonotope,
) -> Result<ReachChain> {
    let mut chain = ReachChain::new(x0.clone());
    for k in 1..=cfg.k {
        let next = propagate_step(&coarse.mz, chain.last(), &cfg.input_set, coarse_noise, cfg.order)?;
        chain.mult_count += 1;
        chain.push(cfg.fine_time(k * cfg.ns), SetKind::Anchor, next);
    }
    Ok(chain)
}

/// Fine sets `j = 1 .. ns-1` of interval `k`, started from its anchor.
pub fn interpolate_interval(
    cfg: &ChainConfig,
    anchor: &Zonotope,
    fine: &ModelSet,
    fine_noise: &Zonotope,
) -> Result<Vec<Zonotope>> {
    let mut sets = Vec::with_capacity(cfg.ns.saturating_sub(1));
    let mut current = anchor.clone();
    for _ in 1..cfg.ns {
        current = propagate_step(&fine.mz, &current, &cfg.input_set, fine_noise, cfg.order)?;
        sets.push(current.clone());
    }
    Ok(sets)
}

/// `K Ns` sequential fine steps from `X0`.
pub fn run_fine_chain(
    cfg: &ChainConfig,
    fine: &ModelSet,
    x0: &Zonotope,
    fine_noise: &Zonotope,
) -> Result<ReachChain> {
    let mut chain = ReachChain::new(x0.clone());
    for i in 1..=cfg.k * cfg.ns {
        let next = propagate_step(&fine.mz, chain.last(), &cfg.input_set, fine_noise, cfg.order)?;
        chain.mult_count += 1;
        chain.push(cfg.fine_time(i), SetKind::Fine, next);
    }
    Ok(chain)
}

/// Known-model chain `R_{i+1} = A R_i + B U + Z_w` over `steps` steps of size `delta`.
///
/// With `hold > 1` one input from `U` acts over each block of `hold` steps:
/// the block's input gain `S = sum_i A^i B` is tracked as a matrix and `S U`
/// is folded in once per block, giving the exact set under a held input.
#[allow(clippy::too_many_arguments)]
pub fn run_model_based(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    x0: &Zonotope,
    input_set: &Zonotope,
    noise: &Zonotope,
    steps: usize,
    hold: usize,
    order: usize,
    delta: f64,
) -> Result<ReachChain> {
    check_dim("model-based state matrix", x0.dim(), a.ncols())?;
    check_dim("model-based input matrix", input_set.dim(), b.ncols())?;
    let hold = hold.max(1);
    let mut chain = ReachChain::new(x0.clone());
    let mut free = x0.clone();
    let mut gain = DMatrix::zeros(a.nrows(), b.ncols());
    for i in 1..=steps {
        free = free.linear_map(a)?.minkowski_sum(noise)?;
        gain = a * gain + b;
        let set = free.minkowski_sum(&input_set.linear_map(&gain)?)?;
        if i % hold == 0 {
            free = set.reduce_order(order)?;
            gain.fill(0.0);
            chain.push(i as f64 * delta, SetKind::ModelBased, free.clone());
        } else {
            free = free.reduce_order(order)?;
            chain.push(i as f64 * delta, SetKind::ModelBased, set.reduce_order(order)?);
        }
    }
    Ok(chain)
}
