use std::io::Write;

use log::warn;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::predictor::{PredictionQuery, SetPredictor};
use super::quantile::{conformal_quantile, is_degenerate};
use super::score::{pathwise_score, pointwise_score};
use crate::ddmodel::ModelSet;
use crate::error::{Error, Result};
use crate::reach::{propagate_step, run_fine_chain, ChainConfig};
use crate::setcalc::Zonotope;
use crate::sysdata::{seeded_rng, DiscreteSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoreMode {
    Pointwise,
    Pathwise,
}

/// One augmented initial set with its fine data-driven chain and sampled
/// true trajectories.
#[derive(Debug, Clone)]
pub struct CalibrationInstance {
    pub x0: Zonotope,
    /// Fine chain, `K Ns + 1` sets.
    pub chain: Vec<Zonotope>,
    /// Coarse anchors `R_0 .. R_K`, when a coarse model was supplied.
    pub anchors: Option<Vec<Zonotope>>,
    /// `N_traj` state sequences of length `K Ns + 1`.
    pub trajectories: Vec<Vec<DVector<f64>>>,
}

impl CalibrationInstance {
    /// All trajectory states at fine index `i`.
    pub fn states_at(&self, i: usize) -> Vec<DVector<f64>> {
        self.trajectories.iter().map(|t| t[i].clone()).collect()
    }
}

/// Draws calibration and test instances from one augmentation distribution.
#[derive(Clone, Copy)]
pub struct InstanceGenerator<'a> {
    pub cfg: &'a ChainConfig,
    pub fine: &'a ModelSet,
    pub fine_noise: &'a Zonotope,
    /// Coarse model and noise for anchor-started evaluation.
    pub coarse: Option<(&'a ModelSet, &'a Zonotope)>,
    /// Ground truth used to simulate trajectories.
    pub truth: &'a DiscreteSystem,
    pub base_x0: &'a Zonotope,
    pub n_traj: usize,
}

impl InstanceGenerator<'_> {
    /// Translate the center within the hull radius of the base set, scale the
    /// generators by a factor in `[0.5, 1.5]` and rotate them randomly.
    pub fn augment<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Zonotope> {
        let n = self.base_x0.dim();
        let radius = self.base_x0.radius();
        let shift = DVector::from_fn(n, |d, _| rng.gen_range(-1.0..=1.0) * radius[d]);
        let factor = rng.gen_range(0.5..=1.5);
        let gauss = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let qr = gauss.qr();
        let (mut q, r) = (qr.q(), qr.r());
        for d in 0..n {
            if r[(d, d)] < 0.0 {
                q.column_mut(d).neg_mut();
            }
        }
        Zonotope::new(
            self.base_x0.center() + shift,
            q * self.base_x0.generators() * factor,
        )
    }

    fn instance(&self, rng: &mut ChaCha8Rng) -> Result<CalibrationInstance> {
        let x0 = self.augment(rng)?;
        let chain: Vec<Zonotope> = run_fine_chain(self.cfg, self.fine, &x0, self.fine_noise)?
            .entries
            .into_iter()
            .map(|e| e.set)
            .collect();
        let anchors = match self.coarse {
            None => None,
            Some((model, noise)) => {
                let mut a = vec![x0.clone()];
                for _ in 0..self.cfg.k {
                    let next =
                        propagate_step(&model.mz, a.last().unwrap(), &self.cfg.input_set, noise, self.cfg.order)?;
                    a.push(next);
                }
                Some(a)
            }
        };
        let steps = self.cfg.k * self.cfg.ns;
        let trajectories = (0..self.n_traj)
            .map(|_| {
                let start = x0.sample(rng);
                self.truth
                    .random_trajectory(&start, &self.cfg.input_set, steps, self.cfg.ns, rng)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CalibrationInstance {
            x0,
            chain,
            anchors,
            trajectories,
        })
    }

    /// `count` instances; instance `i` uses stream `i` of `seed`.
    pub fn generate(&self, count: usize, seed: u64) -> Result<Vec<CalibrationInstance>> {
        if self.n_traj == 0 {
            return Err(Error::InvalidArgument("at least one trajectory per instance".into()));
        }
        (0..count)
            .into_par_iter()
            .map(|i| {
                let mut rng = seeded_rng(seed);
                rng.set_stream(i as u64);
                self.instance(&mut rng)
            })
            .collect()
    }
}

/// Where the predictor's prompts come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PromptSource {
    /// Fine-chain sets as the current set and the interval end.
    TeacherForced,
    /// Coarse anchors, predictions fed back autoregressively.
    Anchored,
}

/// Raw predictions indexed `[k][j - 1]`.
pub fn predict_instance(
    predictor: &dyn SetPredictor,
    cfg: &ChainConfig,
    inst: &CalibrationInstance,
    source: PromptSource,
) -> Result<Vec<Vec<Zonotope>>> {
    let ns = cfg.ns;
    let horizon = cfg.horizon();
    let tau = |i: usize| if horizon > 0.0 { cfg.fine_time(i) / horizon } else { 0.0 };
    let mut out = Vec::with_capacity(cfg.k);
    for k in 0..cfg.k {
        let mut sets = Vec::with_capacity(ns - 1);
        match source {
            PromptSource::TeacherForced => {
                let endpoint = &inst.chain[(k + 1) * ns];
                for j in 1..ns {
                    sets.push(predictor.predict(&PredictionQuery {
                        current: &inst.chain[k * ns + j - 1],
                        endpoint,
                        j,
                        ns,
                        tau_current: tau(k * ns + j - 1),
                        tau_endpoint: tau((k + 1) * ns),
                    })?);
                }
            }
            PromptSource::Anchored => {
                let anchors = inst.anchors.as_ref().ok_or_else(|| {
                    Error::InvalidArgument("instance was generated without anchors".into())
                })?;
                let mut current = anchors[k].clone();
                for j in 1..ns {
                    let next = predictor.predict(&PredictionQuery {
                        current: &current,
                        endpoint: &anchors[k + 1],
                        j,
                        ns,
                        tau_current: tau(k * ns + j - 1),
                        tau_endpoint: tau((k + 1) * ns),
                    })?;
                    sets.push(next.clone());
                    current = next;
                }
            }
        }
        out.push(sets);
    }
    Ok(out)
}

/// Pointwise scores per `(k, j)` and pathwise scores per `k`.
fn instance_scores(
    predictor: &dyn SetPredictor,
    cfg: &ChainConfig,
    inst: &CalibrationInstance,
    source: PromptSource,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let preds = predict_instance(predictor, cfg, inst, source)?;
    let mut point = Vec::new();
    let mut path = Vec::new();
    for (k, sets) in preds.iter().enumerate() {
        let states: Vec<_> = (1..cfg.ns).map(|j| inst.states_at(k * cfg.ns + j)).collect();
        for (z, xs) in sets.iter().zip(&states) {
            point.push(pointwise_score(z, xs)?);
        }
        path.push(pathwise_score(sets, &states)?);
    }
    Ok((point, path))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRecord {
    pub scores: Vec<f64>,
    pub delta: f64,
    pub q_hat: f64,
    pub mode: ScoreMode,
    /// Number of scores.
    pub n_cal: usize,
    /// Calibration instances behind the scores.
    pub n_instances: usize,
    pub n_traj: usize,
    /// The quantile fell back to the maximum score.
    pub degenerate: bool,
}

impl CalibrationRecord {
    pub fn to_document(&self) -> Result<String> {
        crate::document::to_string(self)
    }

    pub fn from_document(text: &str) -> Result<Self> {
        crate::document::from_str(text)
    }
}

/// Score every calibration instance with teacher-forced prompts and take the
/// conformal quantile.
pub fn calibrate(
    predictor: &dyn SetPredictor,
    cfg: &ChainConfig,
    instances: &[CalibrationInstance],
    delta: f64,
    mode: ScoreMode,
) -> Result<CalibrationRecord> {
    if instances.is_empty() {
        return Err(Error::InvalidArgument("no calibration instances".into()));
    }
    let per_instance = instances
        .par_iter()
        .map(|inst| instance_scores(predictor, cfg, inst, PromptSource::TeacherForced))
        .collect::<Result<Vec<_>>>()?;
    let scores: Vec<f64> = per_instance
        .into_iter()
        .flat_map(|(point, path)| match mode {
            ScoreMode::Pointwise => point,
            ScoreMode::Pathwise => path,
        })
        .collect();
    let needed = (1.0 / delta).ceil() as usize - 1;
    if instances.len() < needed {
        warn!(
            "{} calibration instances are fewer than {needed}; the quantile degenerates to the maximum score",
            instances.len()
        );
    }
    let q_hat = conformal_quantile(&scores, delta)?;
    Ok(CalibrationRecord {
        n_cal: scores.len(),
        degenerate: is_degenerate(scores.len(), delta) || instances.len() < needed,
        scores,
        delta,
        q_hat,
        mode,
        n_instances: instances.len(),
        n_traj: instances[0].trajectories.len(),
    })
}

/// Wilson score interval at 95%.
pub fn wilson_interval(successes: usize, total: usize) -> (f64, f64) {
    if total == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959963984540054;
    let n = total as f64;
    let p = successes as f64 / n;
    let denom = 1.0 + z * z / n;
    let mid = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    ((mid - half).max(0.0), (mid + half).min(1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageStat {
    /// `"k.j"` for one substep, `"k"` for an interval path, `"all"` when pooled.
    pub label: String,
    pub covered: usize,
    pub total: usize,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl CoverageStat {
    fn new(label: String, covered: usize, total: usize) -> Self {
        let (ci_low, ci_high) = wilson_interval(covered, total);
        Self {
            label,
            covered,
            total,
            rate: if total == 0 { 0.0 } else { covered as f64 / total as f64 },
            ci_low,
            ci_high,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub q_hat: f64,
    /// Per substep `(k, j)`.
    pub substeps: Vec<CoverageStat>,
    /// Per interval, all substeps jointly.
    pub paths: Vec<CoverageStat>,
    pub pointwise: CoverageStat,
    pub pathwise: CoverageStat,
}

impl CoverageReport {
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "substep,covered,total,coverage,ci_low,ci_high")?;
        for s in self
            .substeps
            .iter()
            .chain(&self.paths)
            .chain([&self.pointwise, &self.pathwise])
        {
            writeln!(
                out,
                "{},{},{},{:.6},{:.6},{:.6}",
                s.label, s.covered, s.total, s.rate, s.ci_low, s.ci_high
            )?;
        }
        Ok(())
    }
}

/// Empirical coverage of predictions inflated by `q_hat`: a substep is covered
/// when every sampled state lies in the inflated interval hull, a path when
/// all of its substeps are.
pub fn evaluate_coverage(
    predictor: &dyn SetPredictor,
    cfg: &ChainConfig,
    q_hat: f64,
    instances: &[CalibrationInstance],
    source: PromptSource,
) -> Result<CoverageReport> {
    let per_instance = instances
        .par_iter()
        .map(|inst| instance_scores(predictor, cfg, inst, source))
        .collect::<Result<Vec<_>>>()?;
    let (k, m) = (cfg.k, cfg.ns - 1);
    let mut sub = vec![0usize; k * m];
    let mut path = vec![0usize; k];
    for (point, paths) in &per_instance {
        for (i, s) in point.iter().enumerate() {
            sub[i] += usize::from(*s <= q_hat);
        }
        for (i, s) in paths.iter().enumerate() {
            path[i] += usize::from(*s <= q_hat);
        }
    }
    let n = instances.len();
    Ok(CoverageReport {
        q_hat,
        substeps: (0..k * m)
            .map(|i| CoverageStat::new(format!("{}.{}", i / m, i % m + 1), sub[i], n))
            .collect(),
        paths: (0..k).map(|i| CoverageStat::new(format!("{i}"), path[i], n)).collect(),
        pointwise: CoverageStat::new("all".into(), sub.iter().sum(), n * k * m),
        pathwise: CoverageStat::new("all_paths".into(), path.iter().sum(), n * k),
    })
}

/// Split off the trailing `fraction` of instances as the calibration set.
pub fn split_calibration<T>(mut items: Vec<T>, fraction: f64) -> (Vec<T>, Vec<T>) {
    let held = ((items.len() as f64) * fraction).round() as usize;
    let cal = items.split_off(items.len() - held.min(items.len()));
    (items, cal)
}
