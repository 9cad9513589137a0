//! The end-to-end pipeline: collect data, identify both model sets, estimate
//! the coarse noise and hand out chain inputs.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ddmodel::{build_model_set, estimate_coarse_noise, extract_a_block, ModelSet, Resolution};
use crate::error::{Error, Result};
use crate::reach::{run_fine_chain, run_model_based, ChainConfig, IraProblem, ReachChain};
use crate::setcalc::Zonotope;
use crate::sysdata::{
    collect_data, exact_coarse_noise, seeded_rng, subsample_coarse, Collection, ContinuousSystem,
    DataMatrices, DiscreteSystem,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoarseNoiseMode {
    /// Propagated through the fine A-block model set.
    Estimated,
    /// Computed from the true fine state matrix; for tests only.
    ExactOracle,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub system: ContinuousSystem,
    pub delta_f: f64,
    pub ns: usize,
    pub k: usize,
    pub order: usize,
    pub data_len: usize,
    pub x0: Zonotope,
    pub input_set: Zonotope,
    /// Initial state of the measured trajectory.
    pub data_x0: DVector<f64>,
    pub seed: u64,
    pub coarse_noise: CoarseNoiseMode,
}

impl Scenario {
    /// Five-state benchmark with `K = 2`, `Ns = 3`, order 4 and 150 samples.
    pub fn benchmark() -> Self {
        let x0 = Zonotope::new(DVector::from_element(5, 1.0), DMatrix::identity(5, 5) * 0.1)
            .expect("benchmark initial set");
        Self {
            system: ContinuousSystem::benchmark(),
            delta_f: 0.05,
            ns: 3,
            k: 2,
            order: 4,
            data_len: 150,
            data_x0: x0.center().clone(),
            x0,
            input_set: Zonotope::new(DVector::from_element(1, 10.0), DMatrix::from_element(1, 1, 0.25))
                .expect("benchmark input set"),
            seed: 0,
            coarse_noise: CoarseNoiseMode::Estimated,
        }
    }

    pub fn delta_c(&self) -> f64 {
        self.delta_f * self.ns as f64
    }

    pub fn chain_config(&self) -> ChainConfig {
        ChainConfig {
            k: self.k,
            ns: self.ns,
            order: self.order,
            delta_f: self.delta_f,
            input_set: self.input_set.clone(),
        }
    }

    /// Collect data and identify both resolutions.
    pub fn identify(&self) -> Result<Identified> {
        if self.ns < 2 {
            return Err(Error::InvalidArgument("at least two substeps are required".into()));
        }
        if self.x0.dim() != self.system.state_dim() || self.data_x0.len() != self.system.state_dim() {
            return Err(Error::InvalidArgument("initial set dimension differs from the system".into()));
        }
        let fine_sys = self.system.discretize(self.delta_f)?;
        let coarse_sys = self.system.discretize(self.delta_c())?;
        let fine_data = collect_data(
            &fine_sys,
            &Collection {
                length: self.data_len,
                x0: self.data_x0.clone(),
                input_set: self.input_set.clone(),
                hold: self.ns,
                seed: self.seed,
            },
        )?;
        let coarse_data = subsample_coarse(&fine_data, self.ns)?;
        let fine_model = build_model_set(&fine_data, &fine_sys.noise, Resolution::Fine, self.delta_f)?;
        let exact = exact_coarse_noise(&fine_sys.a, &fine_sys.noise, self.ns)?;
        let (estimated, noise_mults) =
            estimate_coarse_noise(&extract_a_block(&fine_model), &fine_sys.noise, self.ns, self.order)?;
        let coarse_noise = match self.coarse_noise {
            CoarseNoiseMode::Estimated => estimated,
            CoarseNoiseMode::ExactOracle => exact.clone(),
        };
        let coarse_model = build_model_set(&coarse_data, &coarse_noise, Resolution::Coarse, self.delta_c())?;
        Ok(Identified {
            scenario: self.clone(),
            fine_sys,
            coarse_sys,
            fine_data,
            coarse_data,
            fine_model,
            coarse_model,
            coarse_noise,
            exact_coarse_noise: exact,
            noise_mults,
        })
    }
}

/// Everything derived from one data collection.
#[derive(Debug, Clone)]
pub struct Identified {
    pub scenario: Scenario,
    pub fine_sys: DiscreteSystem,
    pub coarse_sys: DiscreteSystem,
    pub fine_data: DataMatrices,
    pub coarse_data: DataMatrices,
    pub fine_model: ModelSet,
    pub coarse_model: ModelSet,
    /// Coarse noise used by the coarse model and anchors.
    pub coarse_noise: Zonotope,
    pub exact_coarse_noise: Zonotope,
    /// Multiplications spent estimating the coarse noise.
    pub noise_mults: usize,
}

impl Identified {
    pub fn problem<'a>(&'a self, cfg: &'a ChainConfig) -> IraProblem<'a> {
        IraProblem {
            cfg,
            coarse: &self.coarse_model,
            fine: &self.fine_model,
            x0: &self.scenario.x0,
            coarse_noise: &self.coarse_noise,
            fine_noise: &self.fine_sys.noise,
        }
    }

    pub fn fine_chain(&self, cfg: &ChainConfig) -> Result<ReachChain> {
        run_fine_chain(cfg, &self.fine_model, &self.scenario.x0, &self.fine_sys.noise)
    }

    /// True-model chain on the fine grid with inputs held per coarse interval.
    pub fn model_based_chain(&self, cfg: &ChainConfig) -> Result<ReachChain> {
        run_model_based(
            &self.fine_sys.a,
            &self.fine_sys.b,
            &self.scenario.x0,
            &cfg.input_set,
            &self.fine_sys.noise,
            cfg.k * cfg.ns,
            cfg.ns,
            cfg.order,
            cfg.delta_f,
        )
    }

    /// True-model chain on the coarse grid with the exact coarse noise.
    pub fn model_based_coarse_chain(&self, cfg: &ChainConfig) -> Result<ReachChain> {
        run_model_based(
            &self.coarse_sys.a,
            &self.coarse_sys.b,
            &self.scenario.x0,
            &cfg.input_set,
            &self.exact_coarse_noise,
            cfg.k,
            1,
            cfg.order,
            cfg.delta_f * cfg.ns as f64,
        )
    }

    /// `count` true trajectories of `K Ns` fine steps: uniform initial states
    /// from `X0`, inputs uniform from `U` held per coarse interval, uniform noise.
    pub fn monte_carlo(&self, cfg: &ChainConfig, count: usize, seed: u64) -> Result<Vec<Vec<DVector<f64>>>> {
        (0..count)
            .into_par_iter()
            .map(|i| {
                let mut rng = seeded_rng(seed);
                rng.set_stream(i as u64);
                let start = self.scenario.x0.sample(&mut rng);
                self.fine_sys
                    .random_trajectory(&start, &cfg.input_set, cfg.k * cfg.ns, cfg.ns, &mut rng)
            })
            .collect()
    }
}
