//! Token grids and the newline-delimited prediction protocol used to talk to
//! out-of-process set predictors.
//!
//! A zonotope with at most `kappa` generators becomes a `(kappa + 1) x (n + 1)`
//! grid: the center, then each generator, every row extended by the time
//! fraction `tau`. Requests and responses are one JSON object per line:
//!
//! ```text
//! {"id": 7, "kappa": 20, "n": 5, "current": [[...]], "endpoint": [[...]], "j": 1, "Ns": 3}
//! {"id": 7, "prediction": [[...]]}
//! {"id": 7, "error": "..."}
//! ```
//!
//! A request with `"op": "echo"` is answered with its `current` grid.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::conformal::{CalibrationInstance, PredictionQuery, SetPredictor};
use crate::error::{Error, Result};
use crate::reach::ChainConfig;
use crate::setcalc::Zonotope;

/// Rows `[c, tau]`, `[g_1, tau]`, ..., `[g_kappa, tau]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TokenGrid {
    pub rows: Vec<Vec<f64>>,
}

impl TokenGrid {
    pub fn kappa(&self) -> usize {
        self.rows.len().saturating_sub(1)
    }

    /// State dimension (row width minus the time column).
    pub fn dim(&self) -> usize {
        self.rows.first().map_or(0, |r| r.len().saturating_sub(1))
    }

    pub fn tau(&self) -> f64 {
        self.rows.first().and_then(|r| r.last()).copied().unwrap_or(0.0)
    }

    fn check(&self, kappa: usize, n: usize) -> Result<()> {
        if self.rows.len() != kappa + 1 {
            return Err(Error::Predictor(format!(
                "token grid has {} rows, expected {}",
                self.rows.len(),
                kappa + 1
            )));
        }
        if let Some(bad) = self.rows.iter().find(|r| r.len() != n + 1) {
            return Err(Error::Predictor(format!(
                "token row has width {}, expected {}",
                bad.len(),
                n + 1
            )));
        }
        Ok(())
    }
}

/// Tokenize `z` at time `t` of a horizon `t_total`.
///
/// Sets with more than `kappa` generators are first reduced to order
/// `kappa / n` (which must then be an integer); fewer generators are padded
/// with zero rows.
pub fn tokenize(z: &Zonotope, t: f64, t_total: f64, kappa: usize) -> Result<TokenGrid> {
    if !(t_total > 0.0) {
        return Err(Error::InvalidArgument("horizon must be positive".into()));
    }
    let tau = t / t_total;
    if !(-1e-12..=1.0 + 1e-12).contains(&tau) {
        return Err(Error::InvalidArgument(format!("time fraction {tau} outside [0, 1]")));
    }
    tokenize_at(z, tau.clamp(0.0, 1.0), kappa)
}

pub fn tokenize_at(z: &Zonotope, tau: f64, kappa: usize) -> Result<TokenGrid> {
    let n = z.dim();
    let reduced;
    let z = if z.num_generators() > kappa {
        if n == 0 || kappa % n != 0 || kappa < n {
            return Err(Error::InvalidArgument(format!(
                "{} generators do not fit kappa = {kappa} in dimension {n}",
                z.num_generators()
            )));
        }
        reduced = z.reduce_order(kappa / n)?;
        &reduced
    } else {
        z
    };
    let row = |v: &mut dyn Iterator<Item = f64>| v.chain(std::iter::once(tau)).collect::<Vec<_>>();
    let mut rows = Vec::with_capacity(kappa + 1);
    rows.push(row(&mut z.center().iter().copied()));
    for g in z.generators().column_iter() {
        rows.push(row(&mut g.iter().copied()));
    }
    while rows.len() < kappa + 1 {
        rows.push(row(&mut std::iter::repeat(0.0).take(n)));
    }
    Ok(TokenGrid { rows })
}

/// Inverse of [`tokenize`]: strips the time column and trailing all-zero
/// generator rows (the padding). Returns the set and its time fraction.
pub fn detokenize(grid: &TokenGrid) -> Result<(Zonotope, f64)> {
    let n = grid.dim();
    grid.check(grid.kappa(), n)?;
    let mut used = grid.kappa();
    while used > 0 && grid.rows[used].iter().take(n).all(|v| *v == 0.0) {
        used -= 1;
    }
    let center = DVector::from_iterator(n, grid.rows[0].iter().take(n).copied());
    let generators = DMatrix::from_iterator(
        n,
        used,
        grid.rows[1..=used].iter().flat_map(|r| r.iter().take(n).copied()),
    );
    Ok((Zonotope::new(center, generators)?, grid.tau()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictRequest {
    pub id: u64,
    pub kappa: usize,
    pub n: usize,
    pub current: TokenGrid,
    pub endpoint: TokenGrid,
    pub j: usize,
    #[serde(rename = "Ns")]
    pub ns: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub op: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictResponse {
    pub id: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prediction: Option<TokenGrid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Time fraction of substep `j` given the grids of substep `j - 1` and the end.
fn predicted_tau(current: f64, endpoint: f64, j: usize, ns: usize) -> f64 {
    let remaining = (ns + 1).saturating_sub(j).max(1) as f64;
    current + (endpoint - current) / remaining
}

fn answer(req: &PredictRequest, predictor: &dyn SetPredictor, kappa: usize, n: usize) -> Result<TokenGrid> {
    if req.kappa != kappa || req.n != n {
        return Err(Error::Predictor(format!(
            "request uses kappa = {}, n = {}; server expects kappa = {kappa}, n = {n}",
            req.kappa, req.n
        )));
    }
    req.current.check(kappa, n)?;
    req.endpoint.check(kappa, n)?;
    match req.op.as_deref() {
        None | Some("predict") => {}
        Some("echo") => return Ok(req.current.clone()),
        Some(other) => return Err(Error::Predictor(format!("unknown op {other:?}"))),
    }
    if req.j == 0 || req.j >= req.ns {
        return Err(Error::Predictor(format!("substep {} outside 1..{}", req.j, req.ns)));
    }
    let (current, tau_current) = detokenize(&req.current)?;
    let (endpoint, tau_endpoint) = detokenize(&req.endpoint)?;
    let out = predictor.predict(&PredictionQuery {
        current: &current,
        endpoint: &endpoint,
        j: req.j,
        ns: req.ns,
        tau_current,
        tau_endpoint,
    })?;
    tokenize_at(&out, predicted_tau(tau_current, tau_endpoint, req.j, req.ns), kappa)
}

/// Answer requests line by line until the input closes. Malformed lines get an
/// error record and the loop continues.
pub fn serve<R: BufRead, W: Write>(
    input: R,
    mut output: W,
    predictor: &dyn SetPredictor,
    kappa: usize,
    n: usize,
) -> Result<()> {
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let response = match serde_json::from_str::<PredictRequest>(&line) {
            Err(e) => PredictResponse {
                id: serde_json::from_str::<serde_json::Value>(&line)
                    .ok()
                    .and_then(|v| v.get("id").and_then(|id| id.as_u64()))
                    .unwrap_or(0),
                prediction: None,
                error: Some(format!("malformed request: {e}")),
            },
            Ok(req) => match answer(&req, predictor, kappa, n) {
                Ok(grid) => PredictResponse {
                    id: req.id,
                    prediction: Some(grid),
                    error: None,
                },
                Err(e) => PredictResponse {
                    id: req.id,
                    prediction: None,
                    error: Some(e.to_string()),
                },
            },
        };
        let text = serde_json::to_string(&response).map_err(|e| Error::Document(e.to_string()))?;
        writeln!(output, "{text}")?;
        output.flush()?;
    }
    Ok(())
}

struct Channel {
    child: Child,
    stdin: ChildStdin,
    stdout: BufReader<ChildStdout>,
}

/// Client for a predictor running as a child process that speaks the protocol
/// on its standard streams. Requests are serialized through one pipe.
pub struct ProcessPredictor {
    channel: Mutex<Channel>,
    kappa: usize,
    n: usize,
    next_id: AtomicU64,
}

impl ProcessPredictor {
    /// Start `program args...` and confirm it answers an echo request.
    pub fn spawn(program: &str, args: &[String], kappa: usize, n: usize) -> Result<Self> {
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| Error::Predictor(format!("cannot start {program}: {e}")))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = BufReader::new(child.stdout.take().expect("piped stdout"));
        let client = Self {
            channel: Mutex::new(Channel { child, stdin, stdout }),
            kappa,
            n,
            next_id: AtomicU64::new(1),
        };
        let probe = tokenize_at(&Zonotope::point(DVector::zeros(n)), 0.0, kappa)?;
        let echoed = client.exchange(PredictRequest {
            id: 0,
            kappa,
            n,
            current: probe.clone(),
            endpoint: probe.clone(),
            j: 1,
            ns: 2,
            op: Some("echo".into()),
        })?;
        if echoed != probe {
            return Err(Error::Predictor("echo request returned a different grid".into()));
        }
        Ok(client)
    }

    fn exchange(&self, mut req: PredictRequest) -> Result<TokenGrid> {
        if req.id == 0 && req.op.is_none() {
            req.id = self.next_id.fetch_add(1, Ordering::Relaxed);
        }
        let text = serde_json::to_string(&req).map_err(|e| Error::Document(e.to_string()))?;
        let mut ch = self.channel.lock().map_err(|_| Error::Predictor("predictor channel poisoned".into()))?;
        writeln!(ch.stdin, "{text}").map_err(|e| Error::Predictor(format!("write failed: {e}")))?;
        ch.stdin.flush().map_err(|e| Error::Predictor(format!("write failed: {e}")))?;
        let mut line = String::new();
        let read = ch
            .stdout
            .read_line(&mut line)
            .map_err(|e| Error::Predictor(format!("read failed: {e}")))?;
        if read == 0 {
            return Err(Error::Predictor("predictor closed its output".into()));
        }
        let resp: PredictResponse =
            serde_json::from_str(&line).map_err(|e| Error::Predictor(format!("bad response: {e}")))?;
        if resp.id != req.id {
            return Err(Error::Predictor(format!("response id {} for request {}", resp.id, req.id)));
        }
        match (resp.prediction, resp.error) {
            (_, Some(err)) => Err(Error::Predictor(err)),
            (Some(grid), None) => {
                grid.check(self.kappa, self.n)?;
                Ok(grid)
            }
            (None, None) => Err(Error::Predictor("empty response".into())),
        }
    }
}

impl SetPredictor for ProcessPredictor {
    fn predict(&self, q: &PredictionQuery<'_>) -> Result<Zonotope> {
        let grid = self.exchange(PredictRequest {
            id: 0,
            kappa: self.kappa,
            n: self.n,
            current: tokenize_at(q.current, q.tau_current, self.kappa)?,
            endpoint: tokenize_at(q.endpoint, q.tau_endpoint, self.kappa)?,
            j: q.j,
            ns: q.ns,
            op: None,
        })?;
        Ok(detokenize(&grid)?.0)
    }
}

impl Drop for ProcessPredictor {
    fn drop(&mut self) {
        if let Ok(ch) = self.channel.get_mut() {
            let _ = ch.child.kill();
            let _ = ch.child.wait();
        }
    }
}

/// One supervised example: encoder grids for the current set and the interval
/// end, decoder target for the next fine set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainPair {
    pub instance: usize,
    pub k: usize,
    pub j: usize,
    #[serde(rename = "Ns")]
    pub ns: usize,
    pub current: TokenGrid,
    pub endpoint: TokenGrid,
    pub target: TokenGrid,
}

/// The `K (Ns - 1)` pairs of one instance's fine chain.
pub fn training_pairs(
    index: usize,
    inst: &CalibrationInstance,
    cfg: &ChainConfig,
    kappa: usize,
) -> Result<Vec<TrainPair>> {
    let ns = cfg.ns;
    let horizon = cfg.horizon();
    let grid = |i: usize| tokenize(&inst.chain[i], cfg.fine_time(i), horizon, kappa);
    let mut pairs = Vec::with_capacity(cfg.k * (ns - 1));
    for k in 0..cfg.k {
        let endpoint = grid((k + 1) * ns)?;
        for j in 1..ns {
            pairs.push(TrainPair {
                instance: index,
                k,
                j,
                ns,
                current: grid(k * ns + j - 1)?,
                endpoint: endpoint.clone(),
                target: grid(k * ns + j)?,
            });
        }
    }
    Ok(pairs)
}
