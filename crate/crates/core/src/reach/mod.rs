//! Reachable-set chains: coarse anchors, interpolation, fine and model-based
//! references, and the diagnostics comparing them.

mod analysis;
mod chain;
mod ira;
mod propagate;

pub use analysis::{
    chain_hausdorff, check_tightness_premise, depth_model, step_size_sensitivity_report,
    support_excess, width_ratio, DepthModel, SensitivityReport,
};
pub use chain::{ChainEntry, ReachChain, SetKind};
pub use ira::{run_ira, Execution, IraOptions, IraProblem, IraResult, IraTiming, Surrogate};
pub use propagate::{
    compute_anchors, interpolate_interval, propagate_step, run_fine_chain, run_model_based,
    ChainConfig,
};
