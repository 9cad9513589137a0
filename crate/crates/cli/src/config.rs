//! Experiment configuration. Every field defaults to the five-state benchmark,
//! so an empty file is a valid configuration.

use std::path::{Path, PathBuf};

use ira_core::scenario::{CoarseNoiseMode, Scenario};
use ira_core::setcalc::Zonotope;
use ira_core::sysdata::ContinuousSystem;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Tolerance on `delta_c = ns * delta_f`, relative to `delta_c`.
const STEP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SystemSpec {
    /// Only `"benchmark5d"` is known.
    Named(String),
    /// Continuous-time matrices given row by row.
    Matrices { a: Vec<Vec<f64>>, b: Vec<Vec<f64>> },
}

/// `center` plus generators given as columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetSpec {
    pub center: Vec<f64>,
    #[serde(default)]
    pub generators: Vec<Vec<f64>>,
}

impl SetSpec {
    pub fn to_zonotope(&self, what: &str) -> CliResult<Zonotope> {
        let n = self.center.len();
        if let Some(g) = self.generators.iter().find(|g| g.len() != n) {
            return Err(CliError::Config(format!(
                "{what}: generator of length {} in dimension {n}",
                g.len()
            )));
        }
        let gens = DMatrix::from_iterator(n, self.generators.len(), self.generators.iter().flatten().copied());
        Zonotope::new(DVector::from_vec(self.center.clone()), gens)
            .map_err(|e| CliError::Config(format!("{what}: {e}")))
    }

    fn from_zonotope(z: &Zonotope) -> Self {
        Self {
            center: z.center().iter().copied().collect(),
            generators: z.generators().column_iter().map(|c| c.iter().copied().collect()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    /// Inclusive range of coarse step counts.
    pub k: [usize; 2],
    /// Inclusive range of substep counts.
    pub ns: [usize; 2],
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self { k: [2, 5], ns: [3, 3] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrationSpec {
    pub instances: usize,
    pub test_instances: usize,
    /// Simulated trajectories per instance.
    pub n_traj: usize,
    /// Calibration record used by `ta-ira`.
    pub record: Option<PathBuf>,
}

impl Default for CalibrationSpec {
    fn default() -> Self {
        Self {
            instances: 200,
            test_instances: 500,
            n_traj: 20,
            record: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainingSpec {
    /// Number of training pairs to aim for.
    pub samples: usize,
    /// Fraction of chains held out for calibration.
    pub held_out: f64,
}

impl Default for TrainingSpec {
    fn default() -> Self {
        Self {
            samples: 2000,
            held_out: 0.15,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PredictorKind {
    /// In-process convex blend of the current set and the interval end.
    Baseline,
    /// External process speaking the line protocol on stdin/stdout.
    Process,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictorSpec {
    pub kind: PredictorKind,
    #[serde(default)]
    pub command: Option<String>,
    #[serde(default)]
    pub args: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub system: SystemSpec,
    pub sigma_w: f64,
    pub delta_f: f64,
    pub delta_c: f64,
    /// Optional horizon; must equal `k * delta_c` when given.
    pub horizon: Option<f64>,
    pub k: usize,
    pub ns: usize,
    pub order: usize,
    pub data_len: usize,
    /// Miscoverage level.
    pub delta: f64,
    pub seed: u64,
    pub workers: usize,
    pub timing_reps: usize,
    pub out: PathBuf,
    pub x0: SetSpec,
    pub input: SetSpec,
    pub sweep: SweepSpec,
    pub calibration: CalibrationSpec,
    pub training: TrainingSpec,
    pub predictor: Option<PredictorSpec>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let bench = Scenario::benchmark();
        Self {
            system: SystemSpec::Named("benchmark5d".into()),
            sigma_w: 0.005,
            delta_f: bench.delta_f,
            delta_c: bench.delta_c(),
            horizon: None,
            k: bench.k,
            ns: bench.ns,
            order: bench.order,
            data_len: bench.data_len,
            delta: 0.05,
            seed: 0,
            workers: 2,
            timing_reps: 5,
            out: PathBuf::from("out"),
            x0: SetSpec::from_zonotope(&bench.x0),
            input: SetSpec::from_zonotope(&bench.input_set),
            sweep: SweepSpec::default(),
            calibration: CalibrationSpec::default(),
            training: TrainingSpec::default(),
            predictor: None,
        }
    }
}

impl ExperimentConfig {
    /// Read a TOML file, or the `config` field of a JSON run manifest.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let cfg: Self = if path.extension().is_some_and(|e| e == "json") {
            let value: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            let inner = value.get("config").cloned().unwrap_or(value);
            serde_json::from_value(inner).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        } else {
            Self::from_toml(&text).map_err(|e| match e {
                CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
                other => other,
            })?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> CliResult<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if !(self.delta_f > 0.0) || !(self.delta_c > 0.0) {
            return bad("step sizes must be positive".into());
        }
        if self.ns < 2 || self.k < 1 {
            return bad(format!("need k >= 1 and ns >= 2, got k = {}, ns = {}", self.k, self.ns));
        }
        let expected = self.ns as f64 * self.delta_f;
        if (self.delta_c - expected).abs() > STEP_TOL * self.delta_c {
            return bad(format!(
                "delta_c = {} is not ns * delta_f = {} * {}",
                self.delta_c, self.ns, self.delta_f
            ));
        }
        if let Some(h) = self.horizon {
            if (h - self.k as f64 * self.delta_c).abs() > 1e-9 * h.abs().max(1.0) {
                return bad(format!("horizon {h} is not k * delta_c"));
            }
        }
        if self.order < 1 || self.workers < 1 || self.timing_reps < 1 {
            return bad("order, workers and timing_reps must be positive".into());
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad(format!("delta must lie in (0, 1), got {}", self.delta));
        }
        if !(self.sigma_w >= 0.0) {
            return bad("sigma_w must be nonnegative".into());
        }
        if !(0.0..1.0).contains(&self.training.held_out) {
            return bad("training.held_out must lie in [0, 1)".into());
        }
        if self.calibration.n_traj == 0 {
            return bad("calibration.n_traj must be positive".into());
        }
        let [k0, k1] = self.sweep.k;
        let [n0, n1] = self.sweep.ns;
        if k0 < 1 || k0 > k1 || n0 < 2 || n0 > n1 {
            return bad("sweep ranges must be nonempty with k >= 1 and ns >= 2".into());
        }
        if let Some(p) = &self.predictor {
            if p.kind == PredictorKind::Process && p.command.is_none() {
                return bad("a process predictor needs a command".into());
            }
        }
        if let Some(rec) = &self.calibration.record {
            if !rec.exists() {
                return bad(format!("calibration record {} does not exist", rec.display()));
            }
        }
        let sys = self.system()?;
        let n = sys.state_dim();
        let x0 = self.x0.to_zonotope("x0")?;
        let u = self.input.to_zonotope("input")?;
        if x0.dim() != n || u.dim() != sys.input_dim() {
            return bad(format!(
                "x0 has dimension {} and input {}, system needs {n} and {}",
                x0.dim(),
                u.dim(),
                sys.input_dim()
            ));
        }
        if self.data_len < n + sys.input_dim() {
            return bad(format!("data_len {} cannot reach full rank", self.data_len));
        }
        Ok(())
    }

    pub fn system(&self) -> CliResult<ContinuousSystem> {
        match &self.system {
            SystemSpec::Named(name) if name == "benchmark5d" => {
                let b = ContinuousSystem::benchmark();
                ContinuousSystem::new(b.a().clone(), b.b().clone(), self.sigma_w).map_err(|e| CliError::Config(e.to_string()))
            }
            SystemSpec::Named(other) => Err(CliError::Config(format!("unknown system {other:?}"))),
            SystemSpec::Matrices { a, b } => {
                let rows = |m: &[Vec<f64>], what: &str| -> CliResult<DMatrix<f64>> {
                    let cols = m.first().map_or(0, Vec::len);
                    if m.iter().any(|r| r.len() != cols) {
                        return Err(CliError::Config(format!("ragged rows in system matrix {what}")));
                    }
                    Ok(DMatrix::from_row_iterator(m.len(), cols, m.iter().flatten().copied()))
                };
                let (a, b) = (rows(a, "a")?, rows(b, "b")?);
                if !a.is_square() || b.nrows() != a.nrows() {
                    return Err(CliError::Config(format!(
                        "system matrices have shapes {:?} and {:?}",
                        a.shape(),
                        b.shape()
                    )));
                }
                ContinuousSystem::new(a, b, self.sigma_w).map_err(|e| CliError::Config(e.to_string()))
            }
        }
    }

    /// Scenario at the configured `k` and `ns`.
    pub fn scenario(&self) -> CliResult<Scenario> {
        self.scenario_at(self.k, self.ns)
    }

    pub fn scenario_at(&self, k: usize, ns: usize) -> CliResult<Scenario> {
        let x0 = self.x0.to_zonotope("x0")?;
        Ok(Scenario {
            system: self.system()?,
            delta_f: self.delta_f,
            ns,
            k,
            order: self.order,
            data_len: self.data_len,
            data_x0: x0.center().clone(),
            x0,
            input_set: self.input.to_zonotope("input")?,
            seed: self.seed,
            coarse_noise: CoarseNoiseMode::Estimated,
        })
    }

    /// Generators kept per token grid.
    pub fn kappa(&self) -> usize {
        self.order * self.x0.center.len()
    }
}
