mod common;

use std::io::Cursor;

use ira_core::conformal::{BaselinePredictor, InstanceGenerator, PredictionQuery, SetPredictor};
use ira_core::protocol::{
    detokenize, serve, tokenize, tokenize_at, training_pairs, PredictRequest, PredictResponse,
    ProcessPredictor, TokenGrid,
};
use ira_core::scenario::Scenario;
use ira_core::setcalc::Zonotope;
use rand::Rng;

fn run_server(lines: &[String], kappa: usize, n: usize) -> Vec<PredictResponse> {
    let input = lines.join("\n");
    let mut out = Vec::new();
    serve(Cursor::new(input), &mut out, &BaselinePredictor { order: kappa / n }, kappa, n).unwrap();
    String::from_utf8(out)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn request(id: u64, z: &Zonotope, end: &Zonotope, j: usize, ns: usize, kappa: usize) -> PredictRequest {
    PredictRequest {
        id,
        kappa,
        n: z.dim(),
        current: tokenize_at(z, 0.0, kappa).unwrap(),
        endpoint: tokenize_at(end, 0.5, kappa).unwrap(),
        j,
        ns,
        op: None,
    }
}

#[test]
fn test_round_trip_is_lossless() {
    let mut rng = common::rng(21);
    for _ in 0..300 {
        let n = rng.gen_range(1..6);
        let gens = rng.gen_range(0..=4 * n);
        let z = common::random_zonotope(&mut rng, n, gens);
        let t = rng.gen_range(0.0..=0.3);
        let grid = tokenize(&z, t, 0.3, 4 * n).unwrap();
        assert_eq!(grid.rows.len(), 4 * n + 1);
        assert!(grid.rows.iter().all(|r| r.len() == n + 1 && r[n] == t / 0.3));
        let (back, tau) = detokenize(&grid).unwrap();
        if z.generators().column_iter().last().map_or(true, |g| g.iter().any(|v| *v != 0.0)) {
            assert_eq!(back, z);
        }
        assert_eq!(tau, t / 0.3);
        let text = serde_json::to_string(&grid).unwrap();
        assert_eq!(serde_json::from_str::<TokenGrid>(&text).unwrap(), grid);
    }
}

#[test]
fn test_benchmark_grid_shape() {
    let x0 = Scenario::benchmark().x0;
    let grid = tokenize(&x0, 0.0, 0.3, 20).unwrap();
    assert_eq!(grid.kappa(), 20);
    assert_eq!(grid.rows.len(), 21);
    assert_eq!(grid.dim(), 5);
    assert!(grid.rows.iter().all(|r| r.len() == 6));
    assert!(grid.rows[6..].iter().all(|r| r[..5].iter().all(|v| *v == 0.0)));
}

#[test]
fn test_oversized_sets_are_reduced() {
    let mut rng = common::rng(2);
    let z = common::random_zonotope(&mut rng, 2, 15);
    let grid = tokenize_at(&z, 0.0, 6).unwrap();
    let (back, _) = detokenize(&grid).unwrap();
    assert!(back.num_generators() <= 6);
    let h = z.interval_hull();
    let hb = back.interval_hull();
    assert!(h.is_subset_of(&hb.inflate(1e-12)));
    assert!(tokenize_at(&z, 0.0, 5).is_err());
}

#[test]
fn test_serve_echo_and_errors() {
    let mut rng = common::rng(8);
    let z = common::random_zonotope(&mut rng, 3, 4);
    let end = common::random_zonotope(&mut rng, 3, 2);
    let mut echo = request(1, &z, &end, 1, 3, 6);
    echo.op = Some("echo".into());
    let wrong_kappa = request(2, &z, &end, 1, 3, 9);
    let bad_j = request(3, &z, &end, 3, 3, 6);
    let lines = vec![
        serde_json::to_string(&echo).unwrap(),
        "{not json".to_string(),
        serde_json::to_string(&wrong_kappa).unwrap(),
        r#"{"id": 4, "kappa": 6}"#.to_string(),
        serde_json::to_string(&bad_j).unwrap(),
        serde_json::to_string(&request(5, &z, &end, 2, 3, 6)).unwrap(),
    ];
    let out = run_server(&lines, 6, 3);
    assert_eq!(out.len(), 6);
    assert_eq!(out[0].prediction.as_ref(), Some(&echo.current));
    assert!(out[1].error.as_ref().unwrap().contains("malformed"));
    assert!(out[2].error.as_ref().unwrap().contains("kappa"));
    assert_eq!(out[3].id, 4);
    assert!(out[3].error.is_some());
    assert!(out[4].error.is_some());
    let grid = out[5].prediction.as_ref().unwrap();
    let expected = BaselinePredictor { order: 2 }.blend(&z, &end, 2, 3).unwrap();
    assert_eq!(detokenize(grid).unwrap().0, expected);
    // j = 2 of 3 between tau 0 and 0.5
    assert!((grid.tau() - 0.25).abs() < 1e-15);
}

#[test]
fn test_serve_batch_in_order() {
    let id = Scenario::benchmark().identify().unwrap();
    let cfg = id.scenario.chain_config();
    let chain = id.fine_chain(&cfg).unwrap();
    let kappa = cfg.order * 5;
    let mut lines = Vec::new();
    let mut expected = Vec::new();
    for k in 0..cfg.k {
        for j in 1..cfg.ns {
            let req = PredictRequest {
                id: (100 + k * 10 + j) as u64,
                kappa,
                n: 5,
                current: tokenize(chain.set(k * cfg.ns + j - 1), cfg.fine_time(k * cfg.ns + j - 1), cfg.horizon(), kappa)
                    .unwrap(),
                endpoint: tokenize(chain.set((k + 1) * cfg.ns), cfg.fine_time((k + 1) * cfg.ns), cfg.horizon(), kappa)
                    .unwrap(),
                j,
                ns: cfg.ns,
                op: None,
            };
            expected.push(req.id);
            lines.push(serde_json::to_string(&req).unwrap());
        }
    }
    let out = run_server(&lines, kappa, 5);
    assert_eq!(out.len(), cfg.k * (cfg.ns - 1));
    assert_eq!(out.iter().map(|r| r.id).collect::<Vec<_>>(), expected);
    for r in &out {
        let grid = r.prediction.as_ref().expect("prediction");
        assert_eq!(grid.rows.len(), kappa + 1);
        assert!(grid.rows.iter().flatten().all(|v| v.is_finite()));
    }
}

#[test]
fn test_training_pairs_count_and_consistency() {
    let id = Scenario::benchmark().identify().unwrap();
    let cfg = id.scenario.chain_config();
    let inst = InstanceGenerator {
        cfg: &cfg,
        fine: &id.fine_model,
        fine_noise: &id.fine_sys.noise,
        coarse: None,
        truth: &id.fine_sys,
        base_x0: &id.scenario.x0,
        n_traj: 2,
    }
    .generate(1, 0)
    .unwrap();
    let pairs = training_pairs(0, &inst[0], &cfg, 20).unwrap();
    assert_eq!(pairs.len(), 4);
    assert_eq!(pairs[0].endpoint, pairs[1].endpoint);
    assert_eq!(pairs[1].current, tokenize(&inst[0].chain[1], cfg.fine_time(1), cfg.horizon(), 20).unwrap());
    assert_eq!(pairs[0].target, pairs[1].current);
    assert_eq!((pairs[3].k, pairs[3].j), (1, 2));
    let text = serde_json::to_string(&pairs[0]).unwrap();
    assert!(text.contains("\"Ns\":3"));
}

#[test]
fn test_missing_predictor_process() {
    let err = ProcessPredictor::spawn("/nonexistent/predictor", &[], 20, 5).err().unwrap();
    assert!(err.to_string().contains("cannot start"));
}

#[test]
fn test_baseline_is_deterministic() {
    let mut rng = common::rng(4);
    let cur = common::random_zonotope(&mut rng, 3, 5);
    let end = common::random_zonotope(&mut rng, 3, 5);
    let p = BaselinePredictor { order: 2 };
    let q = PredictionQuery { current: &cur, endpoint: &end, j: 1, ns: 3, tau_current: 0.0, tau_endpoint: 0.5 };
    assert_eq!(p.predict(&q).unwrap(), p.predict(&q).unwrap());
    assert_eq!(p.predict(&q).unwrap().dim(), 3);
}
