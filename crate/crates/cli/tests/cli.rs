use std::path::Path;
use std::process::{Command, Output};

use ira_core::conformal::{BaselinePredictor, PredictionQuery, SetPredictor};
use ira_core::protocol::ProcessPredictor;
use ira_core::reach::{run_ira, Execution, IraOptions, ReachChain, SetKind, Surrogate};
use ira_core::scenario::Scenario;
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_ira");

fn ira(dir: &Path, config: &str, args: &[&str]) -> Output {
    let cfg = dir.join("config.toml");
    std::fs::write(&cfg, format!("timing_reps = 1\n{config}")).unwrap();
    Command::new(BIN)
        .args(args)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap()
}

fn read(path: impl AsRef<Path>) -> String {
    std::fs::read_to_string(path.as_ref()).unwrap_or_else(|e| panic!("{}: {e}", path.as_ref().display()))
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn test_reach_ira_layout() {
    let tmp = TempDir::new().unwrap();
    let o = ira(tmp.path(), "", &["reach", "--method", "ira"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let dir = tmp.path().join("out/reach-ira");
    let chain = ReachChain::from_document(&read(dir.join("chain.json"))).unwrap();
    let kinds: Vec<SetKind> = chain.entries.iter().map(|e| e.kind).collect();
    use SetKind::*;
    assert_eq!(kinds, vec![Initial, Interpolated, Interpolated, Anchor, Interpolated, Interpolated, Anchor]);
    assert_eq!(chain.mult_count, 6);
    let anchors = ReachChain::from_document(&read(dir.join("anchors_chain.json"))).unwrap();
    assert_eq!(anchors.len(), 3);
    assert!(read(dir.join("chain.csv")).starts_with("t,dim,lower,upper\n"));
    assert!(read(dir.join("timing.csv")).contains("phase1,"));
    let manifest: serde_json::Value = serde_json::from_str(&read(dir.join("manifest.json"))).unwrap();
    assert_eq!(manifest["summary"]["phase2_mults"], 4);
    assert_eq!(manifest["config"]["seed"], 0);
}

#[test]
fn test_manifest_reproduces_chain() {
    let tmp = TempDir::new().unwrap();
    let o = ira(tmp.path(), "seed = 7\ndata_len = 80", &["reach", "--method", "dd"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let first = tmp.path().join("out/reach-dd");
    let again = tmp.path().join("again");
    let o = Command::new(BIN)
        .args(["reach", "--method", "dd", "--config"])
        .arg(first.join("manifest.json"))
        .arg("--out")
        .arg(&again)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(read(first.join("chain.json")), read(again.join("reach-dd/chain.json")));
    let steps = read(first.join("timing.csv"));
    assert_eq!(steps.lines().count(), 1 + 6 + 1);
}

#[test]
fn test_exit_codes() {
    let tmp = TempDir::new().unwrap();
    let o = ira(tmp.path(), "delta_c = 0.2", &["reach"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("delta_c"));
    let o = ira(tmp.path(), "k = ", &["reach"]);
    assert_eq!(o.status.code(), Some(2));

    let o = ira(tmp.path(), "data_len = 7", &["reach", "--method", "dd"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("coarse"), "{}", stderr(&o));

    let o = ira(tmp.path(), "", &["reach", "--method", "ta-ira"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(!tmp.path().join("out/reach-ta-ira").exists());
    let o = ira(tmp.path(), "[predictor]\nkind = \"process\"\ncommand = \"/no/such/predictor\"", &["ablation"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn test_ablation_without_predictor() {
    let tmp = TempDir::new().unwrap();
    let o = ira(tmp.path(), "", &["ablation"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = read(tmp.path().join("out/ablation/ablation.csv"));
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[1].starts_with("IRA-seq,") && rows[2].starts_with("IRA-par,"));
    let seq: Vec<&str> = rows[1].split(',').collect();
    let par: Vec<&str> = rows[2].split(',').collect();
    assert_eq!(seq[3], par[3]);
    assert!(rows[3].starts_with("fine DD,") && rows[3].contains(",1.0000,1.000000,"));
    assert!(String::from_utf8_lossy(&o.stdout).contains("identical: true"));
}

#[test]
fn test_ablation_with_baseline_predictor() {
    let tmp = TempDir::new().unwrap();
    let cfg = "[predictor]\nkind = \"baseline\"\n[calibration]\ninstances = 30";
    let o = ira(tmp.path(), cfg, &["ablation"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = read(tmp.path().join("out/ablation/ablation.csv"));
    assert_eq!(csv.lines().count(), 6);
    assert!(csv.contains("TA-IRA no q_hat,") && csv.contains("TA-IRA + conformal,"));
}

#[test]
fn test_sweep_single_cell() {
    let tmp = TempDir::new().unwrap();
    let o = ira(tmp.path(), "[sweep]\nk = [2, 2]\nns = [2, 3]", &["sweep"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = read(tmp.path().join("out/sweep/sweep.csv"));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("k,ns,dd_ms,ira_ms,speedup"));
    assert!(lines[1].starts_with("2,2,") && lines[1].ends_with(",4,2,2"));
    assert!(lines[2].starts_with("2,3,") && lines[2].ends_with(",6,2,4"));
}

#[test]
fn test_calibrate_and_ta_ira() {
    let tmp = TempDir::new().unwrap();
    let o = ira(tmp.path(), "[calibration]\ninstances = 25\ntest_instances = 25", &["calibrate"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let dir = tmp.path().join("out/calibrate");
    let rec: serde_json::Value = serde_json::from_str(&read(dir.join("calibration.json"))).unwrap();
    assert!(rec["q_hat"].as_f64().unwrap().is_finite());
    assert_eq!(rec["n_instances"], 25);
    assert!(read(dir.join("coverage.csv")).contains("\nall,"));

    let record = dir.join("calibration.json");
    let cfg = format!(
        "[predictor]\nkind = \"baseline\"\n[calibration]\nrecord = \"{}\"",
        record.display()
    );
    let o = ira(tmp.path(), &cfg, &["reach", "--method", "ta-ira"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let chain = ReachChain::from_document(&read(tmp.path().join("out/reach-ta-ira/chain.json"))).unwrap();
    assert_eq!(chain.entries[1].kind, SetKind::Predicted);
}

#[test]
fn test_export_training() {
    let tmp = TempDir::new().unwrap();
    let o = ira(tmp.path(), "[training]\nsamples = 40\n[calibration]\nn_traj = 3", &["export-training"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let dir = tmp.path().join("out/export-training");
    let train = read(dir.join("train_pairs.ndjson"));
    let held = read(dir.join("heldout_pairs.ndjson"));
    let traj = read(dir.join("heldout_trajectories.ndjson"));
    // 10 chains of 4 pairs, 2 held out
    assert_eq!(train.lines().count(), 32);
    assert_eq!(held.lines().count(), 8);
    assert_eq!(traj.lines().count(), 2);
    let first: serde_json::Value = serde_json::from_str(train.lines().next().unwrap()).unwrap();
    assert_eq!(first["current"].as_array().unwrap().len(), 21);
    assert_eq!(first["current"][0].as_array().unwrap().len(), 6);
    let t: serde_json::Value = serde_json::from_str(traj.lines().next().unwrap()).unwrap();
    assert_eq!(t["instance"], 8);
    assert_eq!(t["states"].as_array().unwrap().len(), 3);
    assert_eq!(t["states"][0].as_array().unwrap().len(), 7);
}

#[test]
fn test_process_predictor_matches_in_process_baseline() {
    let remote = ProcessPredictor::spawn(BIN, &["serve-baseline".to_string()], 20, 5).unwrap();
    let local = BaselinePredictor { order: 4 };
    let id = Scenario::benchmark().identify().unwrap();
    let cfg = id.scenario.chain_config();
    let chain = id.fine_chain(&cfg).unwrap();
    let q = PredictionQuery {
        current: chain.set(1),
        endpoint: chain.set(3),
        j: 2,
        ns: 3,
        tau_current: 1.0 / 6.0,
        tau_endpoint: 0.5,
    };
    assert_eq!(remote.predict(&q).unwrap(), local.predict(&q).unwrap());

    let problem = id.problem(&cfg);
    let run = |p: &dyn SetPredictor| {
        run_ira(
            &problem,
            Some(Surrogate { predictor: p, q_hat: Some(0.01) }),
            IraOptions { execution: Execution::Pipelined, workers: 2 },
        )
        .unwrap()
    };
    let a = run(&remote);
    let b = run(&local);
    assert_eq!(a.chain.entries, b.chain.entries);
    assert_eq!(a.predictor_calls, 4);
}
