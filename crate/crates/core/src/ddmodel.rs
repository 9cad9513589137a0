//! Matrix-zonotope model sets identified from noisy data.

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::document::{self, MatrixZonotopeDoc};
use crate::error::{check_dim, Error, Result};
use crate::linalg::right_pseudoinverse;
use crate::setcalc::{MatrixZonotope, Zonotope};
use crate::sysdata::DataMatrices;

/// Feasibility tolerance for matrix membership.
pub const MEMBERSHIP_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Resolution {
    Fine,
    Coarse,
}

impl fmt::Display for Resolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Resolution::Fine => "fine",
            Resolution::Coarse => "coarse",
        })
    }
}

/// All `[A B]` consistent with the data and the noise bound.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSet {
    pub mz: MatrixZonotope,
    pub resolution: Resolution,
    pub step: f64,
}

/// The state-matrix part of a model set.
#[derive(Debug, Clone, PartialEq)]
pub struct ABlock {
    pub mz: MatrixZonotope,
}

impl ModelSet {
    pub fn state_dim(&self) -> usize {
        self.mz.shape().0
    }

    pub fn input_dim(&self) -> usize {
        self.mz.shape().1 - self.state_dim()
    }

    /// A model set holding the single matrix `[A B]`.
    pub fn point(ab: DMatrix<f64>, resolution: Resolution, step: f64) -> Self {
        Self {
            mz: MatrixZonotope::point(ab),
            resolution,
            step,
        }
    }
}

/// `(X_+ - M_w) D_-^+` with `M_w` the `T`-fold self-concatenation of `noise`.
///
/// Generator `(i, j)` of `M_w` holds `g_i` in column `j` only, so its image is
/// the rank-one matrix `-g_i p_j` with `p_j` row `j` of the pseudoinverse.
pub fn build_model_set(
    data: &DataMatrices,
    noise: &Zonotope,
    resolution: Resolution,
    step: f64,
) -> Result<ModelSet> {
    check_dim("noise set", data.state_dim(), noise.dim())?;
    let pinv = right_pseudoinverse(&data.d_minus(), &resolution.to_string())?;
    let t = data.len();

    let mut centered = data.x_plus().clone();
    for mut col in centered.column_iter_mut() {
        col -= noise.center();
    }
    let center = centered * &pinv;

    let mut generators = Vec::with_capacity(noise.num_generators() * t);
    for g in noise.generators().column_iter() {
        for j in 0..t {
            generators.push(-(&g * pinv.row(j)));
        }
    }
    Ok(ModelSet {
        mz: MatrixZonotope::new(center, generators)?,
        resolution,
        step,
    })
}

pub fn extract_a_block(ms: &ModelSet) -> ABlock {
    ABlock {
        mz: ms
            .mz
            .columns(0, ms.state_dim())
            .expect("model set has at least n columns"),
    }
}

/// Over-approximation of the noise accumulated over `ns` fine steps when the
/// fine state matrix is only known to lie in `ab`:
/// `S_0 = Z_w`, `S_i = reduce(A S_{i-1} + Z_w)`. Returns the set and the
/// number of matrix-zonotope multiplications performed (`ns - 1`).
pub fn estimate_coarse_noise(
    ab: &ABlock,
    fine_noise: &Zonotope,
    ns: usize,
    order: usize,
) -> Result<(Zonotope, usize)> {
    if ns == 0 {
        return Err(Error::InvalidArgument("substep count must be positive".into()));
    }
    let mut s = fine_noise.clone();
    let mut mults = 0;
    for _ in 1..ns {
        s = ab.mz.mul_zonotope(&s)?.minkowski_sum(fine_noise)?.reduce_order(order)?;
        mults += 1;
    }
    Ok((s, mults))
}

/// Is `m` a member of the model set (coefficients within `1 + 1e-8`)?
pub fn verify_membership(ms: &ModelSet, m: &DMatrix<f64>) -> Result<bool> {
    ms.mz.contains_matrix(m, MEMBERSHIP_TOL)
}

/// Provenance stored with a serialized model set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelHeader {
    pub resolution: Resolution,
    pub step: f64,
    pub data_len: usize,
    pub seed: u64,
    pub rank_ok: bool,
}

#[derive(Serialize, Deserialize)]
struct ModelSetDoc {
    header: ModelHeader,
    set: MatrixZonotopeDoc,
}

impl ModelSet {
    pub fn to_document(&self, data_len: usize, seed: u64) -> Result<String> {
        document::to_string(&ModelSetDoc {
            header: ModelHeader {
                resolution: self.resolution,
                step: self.step,
                data_len,
                seed,
                rank_ok: true,
            },
            set: MatrixZonotopeDoc::from(&self.mz),
        })
    }

    pub fn from_document(text: &str) -> Result<(ModelSet, ModelHeader)> {
        let doc: ModelSetDoc = document::from_str(text)?;
        let mz = MatrixZonotope::try_from(&doc.set)?;
        if mz.shape().1 < mz.shape().0 {
            return Err(Error::Document("model set has fewer columns than rows".into()));
        }
        Ok((
            ModelSet {
                mz,
                resolution: doc.header.resolution,
                step: doc.header.step,
            },
            doc.header,
        ))
    }
}
