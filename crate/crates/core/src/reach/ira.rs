use std::sync::Mutex;
use std::time::{Duration, Instant};

use super::chain::{ReachChain, SetKind};
use super::propagate::{interpolate_interval, propagate_step, ChainConfig};
use crate::conformal::{inflate, PredictionQuery, SetPredictor};
use crate::ddmodel::ModelSet;
use crate::error::{Error, Result};
use crate::setcalc::Zonotope;

/// How the interpolation intervals are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    /// Anchors, then every interval, on the calling thread.
    Sequential,
    /// All anchors first, then the intervals in parallel.
    TwoPhase,
    /// Each interval starts on a worker as soon as the anchors it needs exist,
    /// overlapping the remaining coarse steps.
    Pipelined,
}

/// Shared read-only inputs of an IRA run.
#[derive(Debug, Clone, Copy)]
pub struct IraProblem<'a> {
    pub cfg: &'a ChainConfig,
    pub coarse: &'a ModelSet,
    pub fine: &'a ModelSet,
    pub x0: &'a Zonotope,
    pub coarse_noise: &'a Zonotope,
    pub fine_noise: &'a Zonotope,
}

/// A learned predictor replacing the fine steps, with its conformal quantile.
#[derive(Clone, Copy)]
pub struct Surrogate<'a> {
    pub predictor: &'a dyn SetPredictor,
    pub q_hat: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IraOptions {
    pub execution: Execution,
    pub workers: usize,
}

impl Default for IraOptions {
    fn default() -> Self {
        Self {
            execution: Execution::Pipelined,
            workers: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct IraTiming {
    pub phase1: Duration,
    pub total: Duration,
}

#[derive(Debug, Clone)]
pub struct IraResult {
    /// `X0`, then per interval its interpolants followed by its end anchor.
    pub chain: ReachChain,
    /// Coarse chain `X0 .. R_K`.
    pub anchors: ReachChain,
    pub phase1_mults: usize,
    pub phase2_mults: usize,
    pub predictor_calls: usize,
    pub timing: IraTiming,
}

struct IntervalOutput {
    sets: Vec<Zonotope>,
    mults: usize,
    calls: usize,
}

fn run_interval(
    p: &IraProblem<'_>,
    surrogate: Option<(&dyn SetPredictor, f64)>,
    k: usize,
    anchor: &Zonotope,
    endpoint: Option<&Zonotope>,
) -> Result<IntervalOutput> {
    let cfg = p.cfg;
    match surrogate {
        None => Ok(IntervalOutput {
            sets: interpolate_interval(cfg, anchor, p.fine, p.fine_noise)?,
            mults: cfg.ns - 1,
            calls: 0,
        }),
        Some((predictor, q_hat)) => {
            let endpoint = endpoint.expect("surrogate intervals need their end anchor");
            let horizon = cfg.horizon();
            let tau = |i: usize| if horizon > 0.0 { cfg.fine_time(i) / horizon } else { 0.0 };
            let mut sets = Vec::with_capacity(cfg.ns - 1);
            let mut current = anchor.clone();
            for j in 1..cfg.ns {
                let raw = predictor.predict(&PredictionQuery {
                    current: &current,
                    endpoint,
                    j,
                    ns: cfg.ns,
                    tau_current: tau(k * cfg.ns + j - 1),
                    tau_endpoint: tau((k + 1) * cfg.ns),
                })?;
                if raw.dim() != anchor.dim() {
                    return Err(Error::Predictor(format!(
                        "prediction has dimension {}, expected {}",
                        raw.dim(),
                        anchor.dim()
                    )));
                }
                sets.push(inflate(&raw, q_hat)?);
                current = raw;
            }
            Ok(IntervalOutput {
                sets,
                mults: 0,
                calls: cfg.ns - 1,
            })
        }
    }
}

/// Interpolated reachability: sequential coarse anchors, then independent
/// fine interpolation (or surrogate prediction) inside every coarse interval.
///
/// Results do not depend on `options`: every interval is a pure function of
/// its anchors and the shared inputs.
pub fn run_ira(
    p: &IraProblem<'_>,
    surrogate: Option<Surrogate<'_>>,
    options: IraOptions,
) -> Result<IraResult> {
    p.cfg.validate()?;
    if p.cfg.ns < 2 {
        return Err(Error::InvalidArgument("interpolation needs at least two substeps".into()));
    }
    let surrogate = match surrogate {
        None => None,
        Some(Surrogate { q_hat: None, .. }) => {
            return Err(Error::InvalidArgument(
                "a surrogate predictor requires a calibrated quantile".into(),
            ))
        }
        Some(Surrogate {
            predictor,
            q_hat: Some(q),
        }) => Some((predictor, q)),
    };
    // surrogate intervals condition on the end anchor as well
    let lag = usize::from(surrogate.is_some());
    let kk = p.cfg.k;
    let start = Instant::now();

    let slots: Vec<Mutex<Option<Result<IntervalOutput>>>> = (0..kk).map(|_| Mutex::new(None)).collect();
    let mut anchors: Vec<Zonotope> = Vec::with_capacity(kk + 1);
    let mut phase1 = Duration::ZERO;

    let next_anchor = |prev: &Zonotope| {
        propagate_step(&p.coarse.mz, prev, &p.cfg.input_set, p.coarse_noise, p.cfg.order)
    };

    match options.execution {
        Execution::Sequential => {
            anchors.push(p.x0.clone());
            for _ in 0..kk {
                let a = next_anchor(anchors.last().unwrap())?;
                anchors.push(a);
            }
            phase1 = start.elapsed();
            for (k, slot) in slots.iter().enumerate() {
                let out = run_interval(p, surrogate, k, &anchors[k], anchors.get(k + 1));
                *slot.lock().unwrap() = Some(out);
            }
        }
        Execution::TwoPhase | Execution::Pipelined => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(options.workers.max(1))
                .build()
                .map_err(|e| Error::InvalidArgument(format!("worker pool: {e}")))?;
            let pipelined = options.execution == Execution::Pipelined;
            let anchors_ref = &mut anchors;
            let phase1_ref = &mut phase1;
            let slots_ref = &slots;
            pool.scope(|s| -> Result<()> {
                anchors_ref.push(p.x0.clone());
                let task = |k: usize, anchor: Zonotope, end: Option<Zonotope>| {
                    move |_: &rayon::Scope<'_>| {
                        let out = run_interval(p, surrogate, k, &anchor, end.as_ref());
                        *slots_ref[k].lock().unwrap() = Some(out);
                    }
                };
                let mut launched = 0;
                for i in 0..=kk {
                    if i > 0 {
                        let a = next_anchor(anchors_ref.last().unwrap())?;
                        anchors_ref.push(a);
                    }
                    // interval `k` needs anchors up to `k + lag`
                    while pipelined && launched < kk && launched + lag <= i {
                        let k = launched;
                        s.spawn(task(k, anchors_ref[k].clone(), anchors_ref.get(k + 1).cloned()));
                        launched += 1;
                    }
                }
                *phase1_ref = start.elapsed();
                for k in launched..kk {
                    s.spawn(task(k, anchors_ref[k].clone(), anchors_ref.get(k + 1).cloned()));
                }
                Ok(())
            })?;
        }
    }

    let mut chain = ReachChain::new(p.x0.clone());
    let mut anchor_chain = ReachChain::new(p.x0.clone());
    let mut phase2_mults = 0;
    let mut calls = 0;
    let interp_kind = if surrogate.is_some() {
        SetKind::Predicted
    } else {
        SetKind::Interpolated
    };
    for (k, slot) in slots.into_iter().enumerate() {
        let out = slot
            .into_inner()
            .unwrap()
            .expect("every interval is scheduled")?;
        phase2_mults += out.mults;
        calls += out.calls;
        for (j, set) in out.sets.into_iter().enumerate() {
            chain.push(p.cfg.fine_time(k * p.cfg.ns + j + 1), interp_kind, set);
        }
        let t_end = p.cfg.fine_time((k + 1) * p.cfg.ns);
        chain.push(t_end, SetKind::Anchor, anchors[k + 1].clone());
        anchor_chain.push(t_end, SetKind::Anchor, anchors[k + 1].clone());
    }
    chain.mult_count = kk + phase2_mults;
    anchor_chain.mult_count = kk;
    Ok(IraResult {
        chain,
        anchors: anchor_chain,
        phase1_mults: kk,
        phase2_mults,
        predictor_calls: calls,
        timing: IraTiming {
            phase1,
            total: start.elapsed(),
        },
    })
}
