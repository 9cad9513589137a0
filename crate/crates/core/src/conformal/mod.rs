//! Split conformal calibration of set-valued predictors.

mod calibrate;
mod predictor;
mod quantile;
mod score;

pub use calibrate::{
    calibrate, evaluate_coverage, predict_instance, split_calibration, wilson_interval,
    CalibrationInstance, CalibrationRecord, CoverageReport, CoverageStat, InstanceGenerator,
    PromptSource, ScoreMode,
};
pub use predictor::{BaselinePredictor, PredictionQuery, SetPredictor};
pub use quantile::{conformal_quantile, is_degenerate, quantile_rank};
pub use score::{inflate, pathwise_score, pointwise_score};
