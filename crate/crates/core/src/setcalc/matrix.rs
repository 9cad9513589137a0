use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::lp;
use super::zonotope::Zonotope;
use crate::error::{check_dim, Error, Result};

/// A matrix zonotope `{C + sum_i a_i G_i : a in [-1, 1]^p}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixZonotope {
    center: DMatrix<f64>,
    generators: Vec<DMatrix<f64>>,
}

impl MatrixZonotope {
    pub fn new(center: DMatrix<f64>, generators: Vec<DMatrix<f64>>) -> Result<Self> {
        for g in &generators {
            if g.shape() != center.shape() {
                return Err(Error::InvalidArgument(format!(
                    "generator shape {:?} differs from center shape {:?}",
                    g.shape(),
                    center.shape()
                )));
            }
        }
        let finite = center.iter().all(|v| v.is_finite())
            && generators.iter().all(|g| g.iter().all(|v| v.is_finite()));
        if !finite {
            return Err(Error::NonFinite("matrix zonotope"));
        }
        Ok(Self { center, generators })
    }

    pub(crate) fn from_parts(center: DMatrix<f64>, generators: Vec<DMatrix<f64>>) -> Self {
        Self { center, generators }
    }

    /// A single fixed matrix.
    pub fn point(center: DMatrix<f64>) -> Self {
        Self {
            center,
            generators: Vec::new(),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        self.center.shape()
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn center(&self) -> &DMatrix<f64> {
        &self.center
    }

    pub fn generators(&self) -> &[DMatrix<f64>] {
        &self.generators
    }

    /// Right multiplication by a fixed matrix: `{M P : M in self}`.
    pub fn right_mul(&self, p: &DMatrix<f64>) -> Result<MatrixZonotope> {
        check_dim("matrix zonotope right product", self.shape().1, p.nrows())?;
        Ok(Self::from_parts(
            &self.center * p,
            self.generators.iter().map(|g| g * p).collect(),
        ))
    }

    /// Restrict every member to the column range `start..start + count`.
    pub fn columns(&self, start: usize, count: usize) -> Result<MatrixZonotope> {
        if start + count > self.shape().1 {
            return Err(Error::InvalidArgument(format!(
                "column range {start}..{} exceeds {} columns",
                start + count,
                self.shape().1
            )));
        }
        let take = |m: &DMatrix<f64>| m.columns(start, count).into_owned();
        Ok(Self::from_parts(
            take(&self.center),
            self.generators.iter().map(take).collect(),
        ))
    }

    /// Zonotope enclosure of `{M x : M in self, x in z}`.
    ///
    /// Generator layout: `[C G_z | G_i c_z for each i | G_i g_j, i outer, j inner]`,
    /// giving `gamma_z + gamma_M + gamma_M * gamma_z` generators.
    pub fn mul_zonotope(&self, z: &Zonotope) -> Result<Zonotope> {
        let (rows, cols) = self.shape();
        check_dim("matrix zonotope product", cols, z.dim())?;
        let gz = z.generators();
        let cz = z.center();
        let (p, q) = (gz.ncols(), self.generators.len());

        let mut out = DMatrix::zeros(rows, p + q + q * p);
        out.columns_mut(0, p).copy_from(&(&self.center * gz));
        for (i, g) in self.generators.iter().enumerate() {
            out.set_column(p + i, &(g * cz));
        }
        let cross_start = p + q;
        for (i, g) in self.generators.iter().enumerate() {
            out.columns_mut(cross_start + i * p, p)
                .gemm(1.0, g, gz, 0.0);
        }
        Ok(Zonotope::from_parts(&self.center * cz, out))
    }

    /// Does `m` belong to the set, up to `tol` on the coefficient bound?
    ///
    /// Vectorizes the matrices and minimizes `||a||_inf` subject to
    /// `C + sum_i a_i G_i = m`.
    pub fn contains_matrix(&self, m: &DMatrix<f64>, tol: f64) -> Result<bool> {
        if m.shape() != self.shape() {
            return Err(Error::InvalidArgument(format!(
                "matrix shape {:?} differs from set shape {:?}",
                m.shape(),
                self.shape()
            )));
        }
        let offset = m - &self.center;
        if self.generators.is_empty() {
            return Ok(offset.amax() <= tol);
        }
        let entries = offset.len();
        let mut g = DMatrix::zeros(entries, self.generators.len());
        for (i, gen) in self.generators.iter().enumerate() {
            g.set_column(i, &DVector::from_column_slice(gen.as_slice()));
        }
        let b = DVector::from_column_slice(offset.as_slice());
        lp::has_bounded_solution(&g, &b, 1.0 + tol)
    }

    /// Member with coefficients drawn uniformly from `[-1, 1]`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> DMatrix<f64> {
        let mut m = self.center.clone();
        for g in &self.generators {
            m += g * rng.gen_range(-1.0..=1.0);
        }
        m
    }
}
