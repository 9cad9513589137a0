use serde::{Deserialize, Serialize};

use super::chain::ReachChain;
use super::propagate::{propagate_step, ChainConfig};
use crate::ddmodel::ModelSet;
use crate::error::{check_dim, Error, Result};
use crate::setcalc::{direction_set, hausdorff_estimate, Zonotope};

/// Interval-hull containment `IH(anchor) ⊆ IH(fine)`.
pub fn check_tightness_premise(anchor: &Zonotope, fine: &Zonotope) -> Result<bool> {
    check_dim("tightness premise", anchor.dim(), fine.dim())?;
    Ok(anchor.interval_hull().is_subset_of(&fine.interval_hull()))
}

/// Largest `h_inner(d) - h_outer(d)` over `n_dirs` directions; nonpositive
/// when `outer` support-dominates `inner`.
pub fn support_excess(inner: &Zonotope, outer: &Zonotope, n_dirs: usize) -> Result<f64> {
    check_dim("support excess", inner.dim(), outer.dim())?;
    let mut worst = f64::NEG_INFINITY;
    for d in direction_set(inner.dim(), n_dirs)? {
        worst = worst.max(inner.support(&d)? - outer.support(&d)?);
    }
    Ok(worst)
}

/// One coarse step against `Ns` fine steps to the same physical time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub time: f64,
    pub coarse_widths: Vec<f64>,
    pub fine_widths: Vec<f64>,
    pub hausdorff: f64,
    /// Largest per-dimension `|w_c - w_f| / max(w_c, w_f)`.
    pub max_relative_gap: f64,
    pub differ: bool,
}

pub fn step_size_sensitivity_report(
    cfg: &ChainConfig,
    coarse: &ModelSet,
    fine: &ModelSet,
    x0: &Zonotope,
    coarse_noise: &Zonotope,
    fine_noise: &Zonotope,
) -> Result<SensitivityReport> {
    let one = propagate_step(&coarse.mz, x0, &cfg.input_set, coarse_noise, cfg.order)?;
    let mut many = x0.clone();
    for _ in 0..cfg.ns {
        many = propagate_step(&fine.mz, &many, &cfg.input_set, fine_noise, cfg.order)?;
    }
    let (wc, wf) = (one.interval_hull().widths(), many.interval_hull().widths());
    let max_relative_gap = wc
        .iter()
        .zip(wf.iter())
        .map(|(a, b)| {
            let scale = a.abs().max(b.abs());
            if scale == 0.0 {
                0.0
            } else {
                (a - b).abs() / scale
            }
        })
        .fold(0.0, f64::max);
    Ok(SensitivityReport {
        time: cfg.fine_time(cfg.ns),
        coarse_widths: wc.iter().copied().collect(),
        fine_widths: wf.iter().copied().collect(),
        hausdorff: hausdorff_estimate(&one, &many, 64.max(2 * x0.dim()))?,
        max_relative_gap,
        differ: max_relative_gap > 1e-6,
    })
}

/// Step counts and ideal speedup under equal per-step cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DepthModel {
    pub total_fine: usize,
    pub work_ira: usize,
    pub depth_ira: usize,
    pub speedup: f64,
}

pub fn depth_model(k: usize, ns: usize) -> Result<DepthModel> {
    if k == 0 || ns == 0 {
        return Err(Error::InvalidArgument("depth model needs K, Ns >= 1".into()));
    }
    let depth = k + ns - 1;
    Ok(DepthModel {
        total_fine: k * ns,
        work_ira: k + k * (ns - 1),
        depth_ira: depth,
        speedup: (k * ns) as f64 / depth as f64,
    })
}

/// Ratio of mean interval-hull widths, excluding `t = 0`. Both chains must
/// share their time grid.
pub fn width_ratio(numerator: &ReachChain, denominator: &ReachChain) -> Result<f64> {
    check_dim("width ratio chains", denominator.len(), numerator.len())?;
    for (a, b) in numerator.entries.iter().zip(&denominator.entries) {
        if (a.time - b.time).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "chains disagree on time grid ({} vs {})",
                a.time, b.time
            )));
        }
    }
    Ok(numerator.mean_width() / denominator.mean_width())
}

/// Largest Hausdorff estimate between two chains over shared entries.
pub fn chain_hausdorff(a: &ReachChain, b: &ReachChain, n_dirs: usize) -> Result<f64> {
    check_dim("chain hausdorff", a.len(), b.len())?;
    a.sets()
        .zip(b.sets())
        .try_fold(0.0f64, |acc, (x, y)| Ok(acc.max(hausdorff_estimate(x, y, n_dirs)?)))
}
