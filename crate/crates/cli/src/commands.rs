//! One function per subcommand. Each writes its files under `<out>/<name>`
//! together with a `manifest.json` holding the effective configuration.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use ira_core::conformal::{
    calibrate, evaluate_coverage, split_calibration, BaselinePredictor, CalibrationInstance,
    CalibrationRecord, InstanceGenerator, PromptSource, ScoreMode, SetPredictor,
};
use ira_core::document::ZonotopeDoc;
use ira_core::protocol::{serve, training_pairs, ProcessPredictor};
use ira_core::reach::{
    chain_hausdorff, depth_model, propagate_step, run_ira, step_size_sensitivity_report,
    width_ratio, ChainConfig, Execution, IraOptions, IraResult, ReachChain, SensitivityReport,
    Surrogate,
};
use ira_core::scenario::Identified;
use ira_core::setcalc::direction_set;
use log::info;
use serde::Serialize;
use serde_json::json;

use crate::config::{ExperimentConfig, PredictorKind};
use crate::error::{CliError, CliResult};
use crate::timing::{median, millis, timed};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Fine data-driven chain.
    Dd,
    /// Coarse anchors with exact fine interpolation.
    Ira,
    /// Coarse anchors with a learned, conformally inflated interpolator.
    TaIra,
    /// True-model chain on the fine grid.
    Mb,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Self::Dd => "dd",
            Self::Ira => "ira",
            Self::TaIra => "ta-ira",
            Self::Mb => "mb",
        }
    }
}

const DECISIONS: &[&str] = &[
    "widths: mean interval-hull width over all dimensions and fine time points except t = 0",
    "timing: one discarded warmup, median of timing_reps repetitions",
    "coarse noise: fine noise propagated through the fine A-block model set",
    "mb reference: true fine matrices with inputs held per coarse interval",
    "ira-par: intervals start as soon as their anchors exist",
];

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config: &'a ExperimentConfig,
    decisions: &'static [&'static str],
    outputs: Vec<String>,
    summary: serde_json::Value,
}

/// Output directory of one command.
struct Run<'a> {
    cfg: &'a ExperimentConfig,
    name: String,
    dir: PathBuf,
    outputs: Vec<String>,
}

impl<'a> Run<'a> {
    fn start(cfg: &'a ExperimentConfig, name: &str) -> CliResult<Self> {
        let dir = cfg.out.join(name);
        fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
        Ok(Self {
            cfg,
            name: name.to_string(),
            dir,
            outputs: Vec::new(),
        })
    }

    fn write(&mut self, file: &str, contents: impl AsRef<[u8]>) -> CliResult<()> {
        let path = self.dir.join(file);
        fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        self.outputs.push(file.to_string());
        Ok(())
    }

    fn write_with(&mut self, file: &str, f: impl FnOnce(&mut Vec<u8>) -> ira_core::Result<()>) -> CliResult<()> {
        let mut buf = Vec::new();
        f(&mut buf)?;
        self.write(file, buf)
    }

    fn finish(mut self, summary: serde_json::Value) -> CliResult<PathBuf> {
        let manifest = Manifest {
            tool: "ira",
            version: env!("CARGO_PKG_VERSION"),
            command: &self.name,
            config: self.cfg,
            decisions: DECISIONS,
            outputs: std::mem::take(&mut self.outputs),
            summary,
        };
        let text = to_json(&manifest)?;
        let path = self.dir.join("manifest.json");
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        Ok(self.dir)
    }
}

fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    serde_json::to_string_pretty(value).map_err(|e| ira_core::Error::Document(e.to_string()).into())
}

pub fn identify(cfg: &ExperimentConfig, k: usize, ns: usize) -> CliResult<Identified> {
    let scenario = cfg.scenario_at(k, ns)?;
    let id = scenario.identify()?;
    info!(
        "identified {}-state system from {} samples (Ns = {ns})",
        id.fine_sys.state_dim(),
        id.fine_data.len()
    );
    Ok(id)
}

/// The configured predictor, if any. Process predictors are started here.
pub fn make_predictor(cfg: &ExperimentConfig) -> CliResult<Option<Box<dyn SetPredictor>>> {
    let Some(spec) = &cfg.predictor else {
        return Ok(None);
    };
    Ok(Some(match spec.kind {
        PredictorKind::Baseline => Box::new(BaselinePredictor { order: cfg.order }),
        PredictorKind::Process => {
            let command = spec.command.as_deref().unwrap_or_default();
            let p = ProcessPredictor::spawn(command, &spec.args, cfg.kappa(), cfg.x0.center.len())
                .map_err(|e| CliError::PredictorUnavailable(e.to_string()))?;
            Box::new(p)
        }
    }))
}

pub fn instance_generator<'a>(id: &'a Identified, ccfg: &'a ChainConfig, n_traj: usize) -> InstanceGenerator<'a> {
    InstanceGenerator {
        cfg: ccfg,
        fine: &id.fine_model,
        fine_noise: &id.fine_sys.noise,
        coarse: Some((&id.coarse_model, &id.coarse_noise)),
        truth: &id.fine_sys,
        base_x0: &id.scenario.x0,
        n_traj,
    }
}

/// Instance seeds are offset from the data seed so the streams never overlap.
pub fn instance_seed(seed: u64, purpose: u64) -> u64 {
    seed.wrapping_add(purpose << 32)
}

pub fn ira_options(execution: Execution, workers: usize) -> IraOptions {
    IraOptions { execution, workers }
}

/// Median wall-clock time of every fine step.
pub fn dd_step_times(id: &Identified, ccfg: &ChainConfig, reps: usize) -> CliResult<Vec<Duration>> {
    let steps = ccfg.k * ccfg.ns;
    let mut samples = vec![Vec::with_capacity(reps); steps];
    for rep in 0..=reps {
        let mut r = id.scenario.x0.clone();
        for slot in samples.iter_mut() {
            let start = Instant::now();
            r = propagate_step(&id.fine_model.mz, &r, &ccfg.input_set, &id.fine_sys.noise, ccfg.order)?;
            if rep > 0 {
                slot.push(start.elapsed());
            }
        }
    }
    Ok(samples.into_iter().map(median).collect())
}

/// Order high enough that no model-based chain of a benchmark-sized horizon
/// is ever reduced.
const UNREDUCED_ORDER: usize = 1000;

/// Largest support-function gap between the coarse and fine model-based
/// chains at their shared times, computed without order reduction.
pub fn mb_invariance_error(id: &Identified, ccfg: &ChainConfig, n_dirs: usize) -> CliResult<f64> {
    let exact = ChainConfig {
        order: UNREDUCED_ORDER,
        ..ccfg.clone()
    };
    let fine = id.model_based_chain(&exact)?;
    let coarse = id.model_based_coarse_chain(&exact)?;
    let dirs = direction_set(id.fine_sys.state_dim(), n_dirs)?;
    let mut worst: f64 = 0.0;
    for (i, c) in coarse.sets().enumerate() {
        let f = fine.set(i * ccfg.ns);
        for d in &dirs {
            worst = worst.max((c.support(d)? - f.support(d)?).abs());
        }
    }
    Ok(worst)
}

fn load_q_hat(cfg: &ExperimentConfig) -> CliResult<Option<f64>> {
    let Some(path) = &cfg.calibration.record else {
        return Ok(None);
    };
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let rec = CalibrationRecord::from_document(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    Ok(Some(rec.q_hat))
}

fn write_chain(run: &mut Run<'_>, prefix: &str, chain: &ReachChain) -> CliResult<()> {
    run.write(&format!("{prefix}chain.json"), chain.to_document()?)?;
    run.write_with(&format!("{prefix}chain.csv"), |buf| chain.write_csv(buf))
}

fn timing_csv(rows: &[(String, Duration)]) -> String {
    let mut s = String::from("label,median_ms\n");
    for (label, d) in rows {
        s.push_str(&format!("{label},{:.6}\n", millis(*d)));
    }
    s
}

pub fn cmd_reach(cfg: &ExperimentConfig, method: Method) -> CliResult<PathBuf> {
    let id = identify(cfg, cfg.k, cfg.ns)?;
    let ccfg = id.scenario.chain_config();
    let reps = cfg.timing_reps;
    let mut anchors = None;
    let (chain, timing, summary) = match method {
        Method::Dd => {
            let (chain, total) = timed(reps, || id.fine_chain(&ccfg))?;
            let mut rows: Vec<(String, Duration)> = dd_step_times(&id, &ccfg, reps)?
                .into_iter()
                .enumerate()
                .map(|(i, d)| (format!("step_{}", i + 1), d))
                .collect();
            rows.push(("total".into(), total));
            let summary = json!({ "mults": chain.mult_count, "total_ms": millis(total) });
            (chain, rows, summary)
        }
        Method::Mb => {
            let (chain, total) = timed(reps, || id.model_based_chain(&ccfg))?;
            let summary = json!({ "mults": chain.mult_count, "total_ms": millis(total) });
            (chain, vec![("total".into(), total)], summary)
        }
        Method::Ira | Method::TaIra => {
            let predictor;
            let surrogate = if method == Method::TaIra {
                predictor = make_predictor(cfg)?
                    .ok_or_else(|| CliError::PredictorUnavailable("ta-ira needs a [predictor] section".into()))?;
                let q_hat = load_q_hat(cfg)?.ok_or_else(|| {
                    CliError::Config("ta-ira needs calibration.record; run `ira calibrate` first".into())
                })?;
                Some(Surrogate {
                    predictor: predictor.as_ref(),
                    q_hat: Some(q_hat),
                })
            } else {
                None
            };
            let problem = id.problem(&ccfg);
            let options = ira_options(Execution::Pipelined, cfg.workers);
            let (res, total) = timed(reps, || run_ira(&problem, surrogate, options))?;
            anchors = Some(res.anchors);
            let summary = json!({
                "mults": res.chain.mult_count,
                "phase1_mults": res.phase1_mults,
                "phase2_mults": res.phase2_mults,
                "predictor_calls": res.predictor_calls,
                "q_hat": surrogate.and_then(|s| s.q_hat),
                "total_ms": millis(total),
            });
            let rows = vec![("phase1".into(), res.timing.phase1), ("total".into(), total)];
            (res.chain, rows, summary)
        }
    };
    let mut run = Run::start(cfg, &format!("reach-{}", method.name()))?;
    write_chain(&mut run, "", &chain)?;
    if let Some(a) = &anchors {
        write_chain(&mut run, "anchors_", a)?;
    }
    run.write("timing.csv", timing_csv(&timing))?;
    println!(
        "{}: {} sets, mean width {:.6e}, {:.3} ms",
        method.name(),
        chain.len(),
        chain.mean_width(),
        millis(timing.last().expect("total row").1)
    );
    run.finish(summary)
}

/// One row of the runtime and conservatism sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub k: usize,
    pub ns: usize,
    pub dd_ms: f64,
    pub ira_ms: f64,
    pub speedup: f64,
    pub ideal_speedup: f64,
    pub ira_dd: f64,
    pub dd_mb: f64,
    pub ira_mb: f64,
    pub hausdorff: f64,
    pub fine_mults: usize,
    pub phase1_mults: usize,
    pub phase2_mults: usize,
}

pub const SWEEP_HEADER: &str =
    "k,ns,dd_ms,ira_ms,speedup,ideal_speedup,ira_dd,dd_mb,ira_mb,hausdorff,fine_mults,phase1_mults,phase2_mults";

impl SweepRow {
    pub fn csv(&self) -> String {
        format!(
            "{},{},{:.4},{:.4},{:.4},{:.4},{:.6},{:.6},{:.6},{:.6e},{},{},{}",
            self.k,
            self.ns,
            self.dd_ms,
            self.ira_ms,
            self.speedup,
            self.ideal_speedup,
            self.ira_dd,
            self.dd_mb,
            self.ira_mb,
            self.hausdorff,
            self.fine_mults,
            self.phase1_mults,
            self.phase2_mults
        )
    }
}

pub fn sweep_cell(id: &Identified, k: usize, reps: usize, workers: usize) -> CliResult<SweepRow> {
    let ccfg = ChainConfig {
        k,
        ..id.scenario.chain_config()
    };
    let (dd, t_dd) = timed(reps, || id.fine_chain(&ccfg))?;
    let problem = id.problem(&ccfg);
    let options = ira_options(Execution::Pipelined, workers);
    let (ira, t_ira): (IraResult, _) = timed(reps, || run_ira(&problem, None, options))?;
    let mb = id.model_based_chain(&ccfg)?;
    Ok(SweepRow {
        k,
        ns: ccfg.ns,
        dd_ms: millis(t_dd),
        ira_ms: millis(t_ira),
        speedup: t_dd.as_secs_f64() / t_ira.as_secs_f64(),
        ideal_speedup: depth_model(k, ccfg.ns)?.speedup,
        ira_dd: width_ratio(&ira.chain, &dd)?,
        dd_mb: width_ratio(&dd, &mb)?,
        ira_mb: width_ratio(&ira.chain, &mb)?,
        hausdorff: chain_hausdorff(&ira.chain, &dd, 128)?,
        fine_mults: dd.mult_count,
        phase1_mults: ira.phase1_mults,
        phase2_mults: ira.phase2_mults,
    })
}

pub fn cmd_sweep(cfg: &ExperimentConfig) -> CliResult<PathBuf> {
    let mut run = Run::start(cfg, "sweep")?;
    let mut rows = Vec::new();
    for ns in cfg.sweep.ns[0]..=cfg.sweep.ns[1] {
        let id = identify(cfg, cfg.sweep.k[0], ns)?;
        for k in cfg.sweep.k[0]..=cfg.sweep.k[1] {
            let row = sweep_cell(&id, k, cfg.timing_reps, cfg.workers)?;
            info!("K = {k}, Ns = {ns}: speedup {:.3}", row.speedup);
            rows.push(row);
        }
    }
    let mut csv = format!("{SWEEP_HEADER}\n");
    println!("{SWEEP_HEADER}");
    for r in &rows {
        csv.push_str(&r.csv());
        csv.push('\n');
        println!("{}", r.csv());
    }
    run.write("sweep.csv", csv)?;
    run.finish(json!({ "rows": rows }))
}

pub fn calibration_sets(
    cfg: &ExperimentConfig,
    id: &Identified,
    ccfg: &ChainConfig,
) -> CliResult<(Vec<CalibrationInstance>, Vec<CalibrationInstance>)> {
    let generator = instance_generator(id, ccfg, cfg.calibration.n_traj);
    let cal = generator.generate(cfg.calibration.instances, instance_seed(cfg.seed, 1))?;
    let test = generator.generate(cfg.calibration.test_instances, instance_seed(cfg.seed, 2))?;
    Ok((cal, test))
}

pub fn cmd_calibrate(cfg: &ExperimentConfig) -> CliResult<PathBuf> {
    if cfg.calibration.instances == 0 {
        return Err(CliError::Config("calibration.instances must be positive".into()));
    }
    let id = identify(cfg, cfg.k, cfg.ns)?;
    let ccfg = id.scenario.chain_config();
    let predictor = make_predictor(cfg)?.unwrap_or_else(|| Box::new(BaselinePredictor { order: cfg.order }));
    let (cal, test) = calibration_sets(cfg, &id, &ccfg)?;
    let point = calibrate(predictor.as_ref(), &ccfg, &cal, cfg.delta, ScoreMode::Pointwise)?;
    let path = calibrate(predictor.as_ref(), &ccfg, &cal, cfg.delta, ScoreMode::Pathwise)?;
    let mut run = Run::start(cfg, "calibrate")?;
    run.write("calibration.json", point.to_document()?)?;
    run.write("calibration_pathwise.json", path.to_document()?)?;
    let mut summary = json!({
        "q_hat": point.q_hat,
        "q_hat_pathwise": path.q_hat,
        "n_cal": point.n_cal,
        "n_instances": point.n_instances,
        "n_traj": point.n_traj,
        "degenerate": point.degenerate,
    });
    if !test.is_empty() {
        let tf = evaluate_coverage(predictor.as_ref(), &ccfg, point.q_hat, &test, PromptSource::TeacherForced)?;
        let anchored = evaluate_coverage(predictor.as_ref(), &ccfg, point.q_hat, &test, PromptSource::Anchored)?;
        let joint = evaluate_coverage(predictor.as_ref(), &ccfg, path.q_hat, &test, PromptSource::TeacherForced)?;
        run.write_with("coverage.csv", |b| tf.write_csv(b))?;
        run.write_with("coverage_anchored.csv", |b| anchored.write_csv(b))?;
        run.write_with("coverage_pathwise.csv", |b| joint.write_csv(b))?;
        println!(
            "q_hat {:.6e} (pathwise {:.6e}); coverage {:.4} [{:.4}, {:.4}] on {} instances",
            point.q_hat, path.q_hat, tf.pointwise.rate, tf.pointwise.ci_low, tf.pointwise.ci_high, test.len()
        );
        summary["coverage"] = json!(tf.pointwise);
        summary["coverage_anchored"] = json!(anchored.pointwise);
        summary["path_coverage"] = json!(joint.pathwise);
    }
    run.finish(summary)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AblationRow {
    pub method: String,
    pub runtime_ms: f64,
    pub speedup: f64,
    pub width_ratio: f64,
    pub guarantee: String,
}

pub fn cmd_ablation(cfg: &ExperimentConfig) -> CliResult<PathBuf> {
    let id = identify(cfg, cfg.k, cfg.ns)?;
    let ccfg = id.scenario.chain_config();
    let reps = cfg.timing_reps;
    let problem = id.problem(&ccfg);
    let (dd, t_dd) = timed(reps, || id.fine_chain(&ccfg))?;
    let row = |method: &str, t: Duration, chain: &ReachChain, guarantee: &str| -> CliResult<AblationRow> {
        Ok(AblationRow {
            method: method.into(),
            runtime_ms: millis(t),
            speedup: t_dd.as_secs_f64() / t.as_secs_f64(),
            width_ratio: width_ratio(chain, &dd)?,
            guarantee: guarantee.into(),
        })
    };
    let (seq, t_seq) = timed(reps, || run_ira(&problem, None, ira_options(Execution::Sequential, 1)))?;
    let (par, t_par) = timed(reps, || run_ira(&problem, None, ira_options(Execution::Pipelined, cfg.workers)))?;
    let identical = seq.chain.entries == par.chain.entries;
    let mut rows = vec![
        row("IRA-seq", t_seq, &seq.chain, "deterministic")?,
        row("IRA-par", t_par, &par.chain, "deterministic")?,
    ];
    let mut q_hat = None;
    if let Some(predictor) = make_predictor(cfg)? {
        let q = match load_q_hat(cfg)? {
            Some(q) => q,
            None => {
                let generator = instance_generator(&id, &ccfg, cfg.calibration.n_traj);
                let cal = generator.generate(cfg.calibration.instances.max(1), instance_seed(cfg.seed, 1))?;
                calibrate(predictor.as_ref(), &ccfg, &cal, cfg.delta, ScoreMode::Pointwise)?.q_hat
            }
        };
        q_hat = Some(q);
        let options = ira_options(Execution::Pipelined, cfg.workers);
        for (name, q, guarantee) in [
            ("TA-IRA no q_hat", 0.0, "none"),
            ("TA-IRA + conformal", q, "probabilistic"),
        ] {
            let surrogate = Surrogate {
                predictor: predictor.as_ref(),
                q_hat: Some(q),
            };
            let (res, t) = timed(reps, || run_ira(&problem, Some(surrogate), options))?;
            rows.push(row(name, t, &res.chain, guarantee)?);
        }
    } else {
        info!("no predictor configured; skipping the TA-IRA rows");
    }
    rows.push(row("fine DD", t_dd, &dd, "deterministic")?);

    let mut csv = String::from("method,runtime_ms,speedup,width_ratio,guarantee\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{:.4},{:.4},{:.6},{}\n",
            r.method, r.runtime_ms, r.speedup, r.width_ratio, r.guarantee
        ));
    }
    print!("{csv}");
    println!("IRA-seq and IRA-par sets identical: {identical}");
    let mut run = Run::start(cfg, "ablation")?;
    run.write("ablation.csv", csv)?;
    run.finish(json!({ "rows": rows, "seq_par_identical": identical, "q_hat": q_hat }))
}

#[derive(Debug, Clone, Serialize)]
pub struct SensitivityOutput {
    pub data_driven: SensitivityReport,
    /// Support gap between coarse and fine model-based chains.
    pub model_based_error: f64,
}

pub fn sensitivity(id: &Identified, ccfg: &ChainConfig) -> CliResult<SensitivityOutput> {
    Ok(SensitivityOutput {
        data_driven: step_size_sensitivity_report(
            ccfg,
            &id.coarse_model,
            &id.fine_model,
            &id.scenario.x0,
            &id.coarse_noise,
            &id.fine_sys.noise,
        )?,
        model_based_error: mb_invariance_error(id, ccfg, 128)?,
    })
}

pub fn cmd_sensitivity(cfg: &ExperimentConfig) -> CliResult<PathBuf> {
    let id = identify(cfg, cfg.k, cfg.ns)?;
    let out = sensitivity(&id, &id.scenario.chain_config())?;
    println!(
        "data-driven: max relative width gap {:.4e}, hausdorff {:.4e}, differ {}; model-based support gap {:.3e}",
        out.data_driven.max_relative_gap, out.data_driven.hausdorff, out.data_driven.differ, out.model_based_error
    );
    let mut run = Run::start(cfg, "sensitivity")?;
    run.write("sensitivity.json", to_json(&out)?)?;
    run.finish(json!(out))
}

#[derive(Serialize)]
struct HeldOutTrajectories {
    instance: usize,
    x0: ZonotopeDoc,
    /// `[trajectory][fine step][dimension]`.
    states: Vec<Vec<Vec<f64>>>,
}

pub fn cmd_export_training(cfg: &ExperimentConfig) -> CliResult<PathBuf> {
    let id = identify(cfg, cfg.k, cfg.ns)?;
    let ccfg = id.scenario.chain_config();
    let per_chain = ccfg.k * (ccfg.ns - 1);
    let chains = cfg.training.samples.div_ceil(per_chain).max(1);
    let instances = instance_generator(&id, &ccfg, cfg.calibration.n_traj).generate(chains, instance_seed(cfg.seed, 3))?;
    let (train, held) = split_calibration(instances, cfg.training.held_out);
    let kappa = cfg.kappa();
    let ndjson = |set: &[CalibrationInstance], offset: usize| -> CliResult<String> {
        let mut s = String::new();
        for (i, inst) in set.iter().enumerate() {
            for pair in training_pairs(offset + i, inst, &ccfg, kappa)? {
                s.push_str(&serde_json::to_string(&pair).map_err(|e| ira_core::Error::Document(e.to_string()))?);
                s.push('\n');
            }
        }
        Ok(s)
    };
    let mut run = Run::start(cfg, "export-training")?;
    run.write("train_pairs.ndjson", ndjson(&train, 0)?)?;
    run.write("heldout_pairs.ndjson", ndjson(&held, train.len())?)?;
    let mut traj = Vec::new();
    for (i, inst) in held.iter().enumerate() {
        let rec = HeldOutTrajectories {
            instance: train.len() + i,
            x0: ZonotopeDoc::from(&inst.x0),
            states: inst
                .trajectories
                .iter()
                .map(|t| t.iter().map(|x| x.iter().copied().collect()).collect())
                .collect(),
        };
        serde_json::to_writer(&mut traj, &rec).map_err(|e| ira_core::Error::Document(e.to_string()))?;
        traj.write_all(b"\n").map_err(ira_core::Error::from)?;
    }
    run.write("heldout_trajectories.ndjson", traj)?;
    println!(
        "{} training pairs from {} chains, {} held-out chains (kappa = {kappa})",
        train.len() * per_chain,
        train.len(),
        held.len()
    );
    run.finish(json!({
        "kappa": kappa,
        "n": id.fine_sys.state_dim(),
        "train_chains": train.len(),
        "heldout_chains": held.len(),
        "train_pairs": train.len() * per_chain,
        "n_traj": cfg.calibration.n_traj,
    }))
}

/// Answer prediction requests on stdin with the baseline predictor.
pub fn cmd_serve_baseline(cfg: &ExperimentConfig) -> CliResult<()> {
    let stdin = std::io::stdin();
    let stdout = std::io::stdout();
    serve(
        stdin.lock(),
        stdout.lock(),
        &BaselinePredictor { order: cfg.order },
        cfg.kappa(),
        cfg.x0.center.len(),
    )?;
    Ok(())
}
