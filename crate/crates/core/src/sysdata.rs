//! Ground-truth systems, simulation and measured data.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::document::{self, matrix_from_doc, matrix_to_doc, vector_from_doc, vector_to_doc, F17};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{self, numerical_rank};
use crate::setcalc::Zonotope;

/// Deterministic random stream used for every seeded experiment.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `dx/dt = A_c x + B_c u + w` with noise intensity `sigma_w`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousSystem {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    sigma_w: f64,
}

impl ContinuousSystem {
    pub fn new(a: DMatrix<f64>, b: DMatrix<f64>, sigma_w: f64) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::InvalidArgument("state matrix must be square".into()));
        }
        check_dim("input matrix rows", a.nrows(), b.nrows())?;
        if a.iter().chain(b.iter()).any(|v| !v.is_finite()) || !sigma_w.is_finite() {
            return Err(Error::NonFinite("continuous system"));
        }
        if sigma_w < 0.0 {
            return Err(Error::InvalidArgument("noise intensity must be nonnegative".into()));
        }
        if numerical_rank(&a) < a.nrows() {
            return Err(Error::SingularSystem);
        }
        Ok(Self { a, b, sigma_w })
    }

    /// Five-state benchmark: two damped oscillators and a scalar mode, one input.
    pub fn benchmark() -> Self {
        #[rustfmt::skip]
        let a = DMatrix::from_row_slice(5, 5, &[
            -1.0, -4.0,  0.0,  0.0,  0.0,
             4.0, -1.0,  0.0,  0.0,  0.0,
             0.0,  0.0, -3.0,  1.0,  0.0,
             0.0,  0.0, -1.0, -3.0,  0.0,
             0.0,  0.0,  0.0,  0.0, -2.0,
        ]);
        Self::new(a, DMatrix::from_element(5, 1, 1.0), 0.005).expect("benchmark system")
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn sigma_w(&self) -> f64 {
        self.sigma_w
    }

    pub fn state_dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.b.ncols()
    }

    /// Zero-order-hold discretization with step `delta`.
    ///
    /// `A = exp(A_c delta)`, `B_w = A_c^{-1}(A - I)`, `B = B_w B_c` and the noise
    /// set is `<0, sigma_w B_w>`.
    pub fn discretize(&self, delta: f64) -> Result<DiscreteSystem> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::InvalidArgument(format!("step size must be positive, got {delta}")));
        }
        let n = self.state_dim();
        let a = linalg::expm(&(&self.a * delta))?;
        let lu = self.a.clone().lu();
        let b_w = lu
            .solve(&(&a - DMatrix::identity(n, n)))
            .ok_or(Error::SingularSystem)?;
        let b = &b_w * &self.b;
        let noise = Zonotope::new(DVector::zeros(n), b_w * self.sigma_w)?;
        Ok(DiscreteSystem { a, b, delta, noise })
    }
}

/// `x_{k+1} = A x_k + B u_k + w_k`, `w_k in noise`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSystem {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub delta: f64,
    pub noise: Zonotope,
}

impl DiscreteSystem {
    pub fn state_dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.b.ncols()
    }

    /// `[A B]`.
    pub fn stacked(&self) -> DMatrix<f64> {
        let n = self.state_dim();
        let mut ab = DMatrix::zeros(n, n + self.input_dim());
        ab.columns_mut(0, n).copy_from(&self.a);
        ab.columns_mut(n, self.input_dim()).copy_from(&self.b);
        ab
    }

    pub fn step(&self, x: &DVector<f64>, u: &DVector<f64>, w: &DVector<f64>) -> DVector<f64> {
        &self.a * x + &self.b * u + w
    }

    /// States `x_0 .. x_T` driven by the given input and noise sequences.
    pub fn simulate(
        &self,
        x0: &DVector<f64>,
        inputs: &[DVector<f64>],
        noises: &[DVector<f64>],
    ) -> Result<Vec<DVector<f64>>> {
        check_dim("simulation sequences", inputs.len(), noises.len())?;
        check_dim("initial state", self.state_dim(), x0.len())?;
        let mut states = Vec::with_capacity(inputs.len() + 1);
        states.push(x0.clone());
        for (u, w) in inputs.iter().zip(noises) {
            check_dim("input", self.input_dim(), u.len())?;
            check_dim("noise", self.state_dim(), w.len())?;
            let next = self.step(states.last().unwrap(), u, w);
            states.push(next);
        }
        Ok(states)
    }

    /// Random inputs from `input_set`, each held for `hold` consecutive steps.
    pub fn sample_inputs<R: Rng + ?Sized>(
        input_set: &Zonotope,
        steps: usize,
        hold: usize,
        rng: &mut R,
    ) -> Vec<DVector<f64>> {
        let hold = hold.max(1);
        let mut inputs = Vec::with_capacity(steps);
        let mut current = input_set.sample(rng);
        for k in 0..steps {
            if k > 0 && k % hold == 0 {
                current = input_set.sample(rng);
            }
            inputs.push(current.clone());
        }
        inputs
    }

    /// One random trajectory from `x0` with held inputs and uniform noise.
    pub fn random_trajectory<R: Rng + ?Sized>(
        &self,
        x0: &DVector<f64>,
        input_set: &Zonotope,
        steps: usize,
        hold: usize,
        rng: &mut R,
    ) -> Result<Vec<DVector<f64>>> {
        let inputs = Self::sample_inputs(input_set, steps, hold, rng);
        let noises: Vec<_> = (0..steps).map(|_| self.noise.sample(rng)).collect();
        self.simulate(x0, &inputs, &noises)
    }
}

/// `X_+`, `X_-`, `U_-` from one measured trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrices {
    x_plus: DMatrix<f64>,
    x_minus: DMatrix<f64>,
    u_minus: DMatrix<f64>,
}

impl DataMatrices {
    pub fn new(x_plus: DMatrix<f64>, x_minus: DMatrix<f64>, u_minus: DMatrix<f64>) -> Result<Self> {
        check_dim("data columns", x_minus.ncols(), x_plus.ncols())?;
        check_dim("data columns", x_minus.ncols(), u_minus.ncols())?;
        check_dim("state rows", x_minus.nrows(), x_plus.nrows())?;
        Ok(Self {
            x_plus,
            x_minus,
            u_minus,
        })
    }

    /// Data from a state sequence `x_0 .. x_T` and inputs `u_0 .. u_{T-1}`.
    pub fn from_trajectory(states: &[DVector<f64>], inputs: &[DVector<f64>]) -> Result<Self> {
        check_dim("trajectory length", inputs.len() + 1, states.len())?;
        if inputs.is_empty() {
            return Err(Error::InvalidArgument("trajectory has no transitions".into()));
        }
        let t = inputs.len();
        let x_minus = DMatrix::from_columns(&states[..t]);
        let x_plus = DMatrix::from_columns(&states[1..]);
        let u_minus = DMatrix::from_columns(inputs);
        Self::new(x_plus, x_minus, u_minus)
    }

    pub fn len(&self) -> usize {
        self.x_minus.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn state_dim(&self) -> usize {
        self.x_minus.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.u_minus.nrows()
    }

    pub fn x_plus(&self) -> &DMatrix<f64> {
        &self.x_plus
    }

    pub fn x_minus(&self) -> &DMatrix<f64> {
        &self.x_minus
    }

    pub fn u_minus(&self) -> &DMatrix<f64> {
        &self.u_minus
    }

    /// `D_- = [X_-; U_-]`.
    pub fn d_minus(&self) -> DMatrix<f64> {
        let (n, m, t) = (self.state_dim(), self.input_dim(), self.len());
        let mut d = DMatrix::zeros(n + m, t);
        d.rows_mut(0, n).copy_from(&self.x_minus);
        d.rows_mut(n, m).copy_from(&self.u_minus);
        d
    }

    /// `X_+[:, k] == X_-[:, k + 1]` for every `k`.
    pub fn is_shift_consistent(&self) -> bool {
        (0..self.len().saturating_sub(1)).all(|k| self.x_plus.column(k) == self.x_minus.column(k + 1))
    }

    /// Rank condition on `D_-`.
    pub fn check_rank(&self) -> bool {
        check_rank(&self.d_minus())
    }

    /// Recover `x_0 .. x_T` from shift-consistent data.
    pub fn states(&self) -> Result<Vec<DVector<f64>>> {
        if !self.is_shift_consistent() {
            return Err(Error::InvalidArgument("data is not a single trajectory".into()));
        }
        let mut states: Vec<_> = self.x_minus.column_iter().map(|c| c.into_owned()).collect();
        if let Some(last) = self.x_plus.column_iter().last() {
            states.push(last.into_owned());
        }
        Ok(states)
    }
}

/// Full row rank of `d` at relative singular-value threshold 1e-10.
pub fn check_rank(d: &DMatrix<f64>) -> bool {
    numerical_rank(d) == d.nrows()
}

/// How a measured trajectory is generated.
#[derive(Debug, Clone)]
pub struct Collection {
    pub length: usize,
    pub x0: DVector<f64>,
    pub input_set: Zonotope,
    /// Steps over which each sampled input is held.
    pub hold: usize,
    pub seed: u64,
}

/// Simulate one noisy trajectory and assemble its data matrices.
pub fn collect_data(sys: &DiscreteSystem, spec: &Collection) -> Result<DataMatrices> {
    check_dim("input set", sys.input_dim(), spec.input_set.dim())?;
    let mut rng = seeded_rng(spec.seed);
    let inputs = DiscreteSystem::sample_inputs(&spec.input_set, spec.length, spec.hold, &mut rng);
    let noises: Vec<_> = (0..spec.length).map(|_| sys.noise.sample(&mut rng)).collect();
    let states = sys.simulate(&spec.x0, &inputs, &noises)?;
    DataMatrices::from_trajectory(&states, &inputs)
}

/// Coarse data: every `ns`-th state, its successor `ns` steps later, and the
/// input applied at the interval start. Yields `floor(T / ns)` columns.
pub fn subsample_coarse(fine: &DataMatrices, ns: usize) -> Result<DataMatrices> {
    if ns == 0 {
        return Err(Error::InvalidArgument("subsampling factor must be positive".into()));
    }
    if ns == 1 {
        return Ok(fine.clone());
    }
    if fine.len() < 2 * ns {
        return Err(Error::InvalidArgument(format!(
            "{} fine columns are too few to subsample by {ns}",
            fine.len()
        )));
    }
    let states = fine.states()?;
    let count = fine.len() / ns;
    let x_minus = DMatrix::from_columns(&(0..count).map(|k| states[k * ns].clone()).collect::<Vec<_>>());
    let x_plus =
        DMatrix::from_columns(&(0..count).map(|k| states[(k + 1) * ns].clone()).collect::<Vec<_>>());
    let u_minus = DMatrix::from_columns(
        &(0..count)
            .map(|k| fine.u_minus.column(k * ns).into_owned())
            .collect::<Vec<_>>(),
    );
    DataMatrices::new(x_plus, x_minus, u_minus)
}

/// `sum_{i < ns} A^i Z_w`: the disturbance accumulated over `ns` fine steps.
pub fn exact_coarse_noise(a: &DMatrix<f64>, noise: &Zonotope, ns: usize) -> Result<Zonotope> {
    if ns == 0 {
        return Err(Error::InvalidArgument("substep count must be positive".into()));
    }
    check_dim("coarse noise", a.ncols(), noise.dim())?;
    let mut power = DMatrix::identity(a.nrows(), a.ncols());
    let mut total = noise.clone();
    for _ in 1..ns {
        power = a * power;
        total = total.minkowski_sum(&noise.linear_map(&power)?)?;
    }
    Ok(total)
}

/// Provenance written alongside a data dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataHeader {
    pub seed: u64,
    pub delta: f64,
    pub hold: usize,
    pub rank_ok: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct DataDoc {
    header: DataHeader,
    n: usize,
    m: usize,
    x_plus: Vec<Vec<F17>>,
    x_minus: Vec<Vec<F17>>,
    u_minus: Vec<Vec<F17>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TrajectoryDoc {
    seed: u64,
    delta: F17,
    states: Vec<Vec<F17>>,
}

impl DataMatrices {
    pub fn to_document(&self, header: &DataHeader) -> Result<String> {
        document::to_string(&DataDoc {
            header: header.clone(),
            n: self.state_dim(),
            m: self.input_dim(),
            x_plus: matrix_to_doc(&self.x_plus),
            x_minus: matrix_to_doc(&self.x_minus),
            u_minus: matrix_to_doc(&self.u_minus),
        })
    }

    pub fn from_document(text: &str) -> Result<(DataMatrices, DataHeader)> {
        let doc: DataDoc = document::from_str(text)?;
        let data = DataMatrices::new(
            matrix_from_doc(&doc.x_plus, doc.n)?,
            matrix_from_doc(&doc.x_minus, doc.n)?,
            matrix_from_doc(&doc.u_minus, doc.m)?,
        )?;
        Ok((data, doc.header))
    }
}

pub fn trajectory_to_document(states: &[DVector<f64>], seed: u64, delta: f64) -> Result<String> {
    document::to_string(&TrajectoryDoc {
        seed,
        delta: F17(delta),
        states: states.iter().map(vector_to_doc).collect(),
    })
}

pub fn trajectory_from_document(text: &str) -> Result<(Vec<DVector<f64>>, u64)> {
    let doc: TrajectoryDoc = document::from_str(text)?;
    Ok((doc.states.iter().map(|s| vector_from_doc(s)).collect(), doc.seed))
}
