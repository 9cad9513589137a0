use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::interval::IntervalBox;
use super::lp;
use super::matrix::MatrixZonotope;
use crate::error::{check_dim, Error, Result};

/// Absolute slack on the infinity-norm bound when deciding point membership.
pub const CONTAINMENT_TOL: f64 = 1e-9;

/// A zonotope `{c + G a : a in [-1, 1]^p}`.
///
/// Generators are the columns of `generators`; a zonotope with zero
/// generators is a single point.
#[derive(Debug, Clone, PartialEq)]
pub struct Zonotope {
    center: DVector<f64>,
    generators: DMatrix<f64>,
}

impl Zonotope {
    pub fn new(center: DVector<f64>, generators: DMatrix<f64>) -> Result<Self> {
        check_dim("zonotope generators", center.len(), generators.nrows())?;
        if center.iter().chain(generators.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("zonotope"));
        }
        Ok(Self { center, generators })
    }

    /// Construct without validation. Callers guarantee matching shapes.
    pub(crate) fn from_parts(center: DVector<f64>, generators: DMatrix<f64>) -> Self {
        debug_assert_eq!(center.len(), generators.nrows());
        Self { center, generators }
    }

    pub fn point(center: DVector<f64>) -> Self {
        let n = center.len();
        Self {
            center,
            generators: DMatrix::zeros(n, 0),
        }
    }

    /// Axis-aligned box `center ± radius` as a zonotope with one generator per
    /// axis.
    pub fn from_box(center: DVector<f64>, radius: &DVector<f64>) -> Result<Self> {
        check_dim("box radius", center.len(), radius.len())?;
        Self::new(center, DMatrix::from_diagonal(&radius.abs()))
    }

    pub fn from_interval(hull: &IntervalBox) -> Self {
        let center = (hull.lower() + hull.upper()) * 0.5;
        let radius = (hull.upper() - hull.lower()) * 0.5;
        Self::from_parts(center, DMatrix::from_diagonal(&radius))
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn num_generators(&self) -> usize {
        self.generators.ncols()
    }

    pub fn center(&self) -> &DVector<f64> {
        &self.center
    }

    pub fn generators(&self) -> &DMatrix<f64> {
        &self.generators
    }

    pub fn into_parts(self) -> (DVector<f64>, DMatrix<f64>) {
        (self.center, self.generators)
    }

    /// `L Z = <L c, L G>`.
    pub fn linear_map(&self, l: &DMatrix<f64>) -> Result<Zonotope> {
        check_dim("linear map", self.dim(), l.ncols())?;
        Ok(Self::from_parts(l * &self.center, l * &self.generators))
    }

    pub fn translate(&self, offset: &DVector<f64>) -> Result<Zonotope> {
        check_dim("translate", self.dim(), offset.len())?;
        Ok(Self::from_parts(&self.center + offset, self.generators.clone()))
    }

    pub fn scale(&self, factor: f64) -> Zonotope {
        Self::from_parts(&self.center * factor, &self.generators * factor)
    }

    /// Negated set `-Z`.
    pub fn neg(&self) -> Zonotope {
        self.scale(-1.0)
    }

    /// Minkowski sum: centers add, generator lists concatenate.
    pub fn minkowski_sum(&self, other: &Zonotope) -> Result<Zonotope> {
        check_dim("minkowski sum", self.dim(), other.dim())?;
        let n = self.dim();
        let (p, q) = (self.num_generators(), other.num_generators());
        let mut gens = DMatrix::zeros(n, p + q);
        gens.columns_mut(0, p).copy_from(&self.generators);
        gens.columns_mut(p, q).copy_from(&other.generators);
        Ok(Self::from_parts(&self.center + &other.center, gens))
    }

    /// Cartesian product with a block-diagonal generator matrix.
    pub fn cartesian_product(&self, other: &Zonotope) -> Zonotope {
        let (n1, n2) = (self.dim(), other.dim());
        let (p1, p2) = (self.num_generators(), other.num_generators());
        let mut center = DVector::zeros(n1 + n2);
        center.rows_mut(0, n1).copy_from(&self.center);
        center.rows_mut(n1, n2).copy_from(&other.center);
        let mut gens = DMatrix::zeros(n1 + n2, p1 + p2);
        gens.view_mut((0, 0), (n1, p1)).copy_from(&self.generators);
        gens.view_mut((n1, p1), (n2, p2)).copy_from(&other.generators);
        Self::from_parts(center, gens)
    }

    /// The set of `n x T` matrices whose columns are independently drawn from
    /// this zonotope. Generator `(i, j)` carries `g_i` in column `j`; the list
    /// is ordered with `i` outer and `j` inner.
    pub fn self_concatenate(&self, copies: usize) -> Result<MatrixZonotope> {
        if copies == 0 {
            return Err(Error::InvalidArgument(
                "self-concatenation needs at least one copy".into(),
            ));
        }
        let n = self.dim();
        let mut center = DMatrix::zeros(n, copies);
        for j in 0..copies {
            center.set_column(j, &self.center);
        }
        let mut generators = Vec::with_capacity(self.num_generators() * copies);
        for g in self.generators.column_iter() {
            for j in 0..copies {
                let mut m = DMatrix::zeros(n, copies);
                m.set_column(j, &g);
                generators.push(m);
            }
        }
        Ok(MatrixZonotope::from_parts(center, generators))
    }

    /// Tight axis-aligned bounding box.
    pub fn interval_hull(&self) -> IntervalBox {
        let radius = self.radius();
        IntervalBox::from_parts(&self.center - &radius, &self.center + &radius)
    }

    /// Per-axis half-width `sum_i |G_{d,i}|`.
    pub fn radius(&self) -> DVector<f64> {
        let n = self.dim();
        DVector::from_iterator(
            n,
            (0..n).map(|d| self.generators.row(d).iter().map(|v| v.abs()).sum()),
        )
    }

    /// Support function `h(d) = d'c + sum_i |d'g_i|`.
    pub fn support(&self, direction: &DVector<f64>) -> Result<f64> {
        check_dim("support function", self.dim(), direction.len())?;
        let spread: f64 = self
            .generators
            .column_iter()
            .map(|g| g.dot(direction).abs())
            .sum();
        Ok(direction.dot(&self.center) + spread)
    }

    /// Girard box reduction to at most `order * n` generators.
    ///
    /// Generators are ranked by `||g||_1 - ||g||_inf`; the
    /// `gamma - (order - 1) n` lowest-ranked ones are replaced by their interval
    /// hull (`n` axis-aligned generators appended after the kept ones).
    pub fn reduce_order(&self, order: usize) -> Result<Zonotope> {
        if order == 0 {
            return Err(Error::InvalidArgument(
                "reduction order must be at least 1".into(),
            ));
        }
        let n = self.dim();
        let gamma = self.num_generators();
        if gamma <= order * n {
            return Ok(self.clone());
        }
        let keep = (order - 1) * n;

        let mut ranked: Vec<(f64, usize)> = self
            .generators
            .column_iter()
            .enumerate()
            .map(|(i, g)| (g.lp_norm(1) - g.amax(), i))
            .collect();
        // Descending metric, ties by original index.
        ranked.sort_by(|a, b| match b.0.total_cmp(&a.0) {
            Ordering::Equal => a.1.cmp(&b.1),
            other => other,
        });

        let mut kept: Vec<usize> = ranked[..keep].iter().map(|&(_, i)| i).collect();
        kept.sort_unstable();

        let mut box_radius = DVector::zeros(n);
        for &(_, i) in &ranked[keep..] {
            for d in 0..n {
                box_radius[d] += self.generators[(d, i)].abs();
            }
        }

        let mut gens = DMatrix::zeros(n, keep + n);
        for (col, &i) in kept.iter().enumerate() {
            gens.set_column(col, &self.generators.column(i));
        }
        for d in 0..n {
            gens[(d, keep + d)] = box_radius[d];
        }
        Ok(Self::from_parts(self.center.clone(), gens))
    }

    /// Exact point membership: is there `a` with `||a||_inf <= 1` and
    /// `c + G a = x`? Decided by minimizing `||a||_inf` with a linear program,
    /// accepting a slack of [`CONTAINMENT_TOL`].
    pub fn contains_point(&self, x: &DVector<f64>) -> Result<bool> {
        check_dim("point containment", self.dim(), x.len())?;
        let offset = x - &self.center;
        if self.num_generators() == 0 {
            return Ok(offset.amax() <= CONTAINMENT_TOL);
        }
        // Cheap rejection through the interval hull.
        let radius = self.radius();
        if offset
            .iter()
            .zip(radius.iter())
            .any(|(o, r)| o.abs() > r + CONTAINMENT_TOL * (1.0 + r))
        {
            return Ok(false);
        }
        lp::has_bounded_solution(&self.generators, &offset, 1.0 + CONTAINMENT_TOL)
    }

    /// Sample by drawing every generator coefficient uniformly from `[-1, 1]`.
    ///
    /// For parallelotopes (including boxes and segments) this is uniform over
    /// the set.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<f64> {
        let alpha = DVector::from_fn(self.num_generators(), |_, _| rng.gen_range(-1.0..=1.0));
        &self.center + &self.generators * alpha
    }

    /// Vertex candidate for a sign pattern `s in {-1, 1}^p`.
    pub fn corner(&self, signs: &[f64]) -> DVector<f64> {
        let mut x = self.center.clone();
        for (g, s) in self.generators.column_iter().zip(signs) {
            x.axpy(*s, &g, 1.0);
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2(c: [f64; 2], g: &[f64]) -> Zonotope {
        Zonotope::new(
            DVector::from_column_slice(&c),
            DMatrix::from_column_slice(2, g.len() / 2, g),
        )
        .unwrap()
    }

    #[test]
    fn test_rejects_bad_shapes() {
        assert!(Zonotope::new(DVector::zeros(2), DMatrix::zeros(3, 1)).is_err());
        assert!(Zonotope::new(DVector::from_vec(vec![f64::NAN]), DMatrix::zeros(1, 0)).is_err());
    }

    #[test]
    fn test_linear_map_identity_and_zero() {
        let z = z2([1.0, 1.0], &[1.0, 0.0, 0.0, 1.0]);
        assert_eq!(z.linear_map(&DMatrix::identity(2, 2)).unwrap(), z);

        let zero = z.linear_map(&DMatrix::zeros(1, 2)).unwrap();
        assert_eq!(zero.dim(), 1);
        assert_eq!(zero.center()[0], 0.0);
        assert_eq!(zero.interval_hull().widths()[0], 0.0);
    }

    #[test]
    fn test_linear_map_diagonal() {
        let z = z2([1.0, 0.0], &[1.0, 0.0, 0.0, 1.0]);
        let l = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 3.0]);
        let mapped = z.linear_map(&l).unwrap();
        assert_eq!(mapped.center().as_slice(), &[2.0, 0.0]);
        assert_eq!(mapped.generators().as_slice(), &[2.0, 0.0, 0.0, 3.0]);
        assert!(z.linear_map(&DMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn test_minkowski_sum_identity_and_box() {
        let z = z2([0.5, -1.0], &[1.0, 2.0, -0.5, 0.25]);
        let origin = Zonotope::point(DVector::zeros(2));
        assert_eq!(z.minkowski_sum(&origin).unwrap(), z);

        let unit = z2([0.0, 0.0], &[1.0, 0.0, 0.0, 1.0]);
        let sum = unit.minkowski_sum(&unit).unwrap();
        assert_eq!(sum.num_generators(), 4);
        let hull = sum.interval_hull();
        assert_eq!(hull.lower().as_slice(), &[-2.0, -2.0]);
        assert_eq!(hull.upper().as_slice(), &[2.0, 2.0]);

        assert!(unit.minkowski_sum(&Zonotope::point(DVector::zeros(3))).is_err());
    }

    #[test]
    fn test_cartesian_product() {
        let a = Zonotope::new(DVector::from_vec(vec![1.0]), DMatrix::from_element(1, 1, 1.0)).unwrap();
        let b = Zonotope::new(DVector::from_vec(vec![2.0]), DMatrix::from_element(1, 1, 3.0)).unwrap();
        let p = a.cartesian_product(&b);
        assert_eq!(p.center().as_slice(), &[1.0, 2.0]);
        assert_eq!(p.generators(), &DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 3.0]));

        let with_point = a.cartesian_product(&Zonotope::point(DVector::from_vec(vec![7.0, 8.0])));
        assert_eq!(with_point.center().as_slice(), &[1.0, 7.0, 8.0]);
        assert_eq!(with_point.num_generators(), 1);
    }

    #[test]
    fn test_self_concatenate() {
        let z = Zonotope::new(DVector::from_vec(vec![0.0]), DMatrix::from_element(1, 1, 1.0)).unwrap();
        let m = z.self_concatenate(2).unwrap();
        assert_eq!(m.center(), &DMatrix::zeros(1, 2));
        assert_eq!(m.generators()[0], DMatrix::from_row_slice(1, 2, &[1.0, 0.0]));
        assert_eq!(m.generators()[1], DMatrix::from_row_slice(1, 2, &[0.0, 1.0]));

        let z = z2([1.0, 2.0], &[1.0, 0.0, 0.5, 0.5]);
        let single = z.self_concatenate(1).unwrap();
        assert_eq!(single.center().column(0), z.center().column(0));
        assert_eq!(single.num_generators(), 2);
        assert_eq!(single.generators()[1].column(0), z.generators().column(1));
        assert!(z.self_concatenate(0).is_err());
    }

    #[test]
    fn test_interval_hull() {
        let p = Zonotope::point(DVector::from_vec(vec![1.0, 2.0]));
        let hull = p.interval_hull();
        assert_eq!(hull.lower(), hull.upper());

        let z = z2([1.0, 1.0], &[1.0, 0.0, 0.5, 0.5]);
        let hull = z.interval_hull();
        assert_eq!(hull.lower().as_slice(), &[-0.5, 0.5]);
        assert_eq!(hull.upper().as_slice(), &[2.5, 1.5]);
    }

    #[test]
    fn test_support_function_basics() {
        let p = Zonotope::point(DVector::from_vec(vec![1.0, 2.0]));
        let d = DVector::from_vec(vec![0.6, 0.8]);
        assert!((p.support(&d).unwrap() - 2.2).abs() < 1e-15);

        let unit = z2([0.0, 0.0], &[1.0, 0.0, 0.0, 1.0]);
        assert_eq!(unit.support(&DVector::from_vec(vec![1.0, 0.0])).unwrap(), 1.0);
    }

    #[test]
    fn test_reduce_order_noop_and_axis_aligned() {
        let z = z2([0.0, 0.0], &[1.0, 0.5, -0.5, 1.0, 0.2, 0.1]);
        assert_eq!(z.reduce_order(2).unwrap(), z);
        assert!(z.reduce_order(0).is_err());

        let mut gens = Vec::new();
        for i in 0..10 {
            let v = 0.1 * (i + 1) as f64;
            if i % 2 == 0 {
                gens.extend_from_slice(&[v, 0.0]);
            } else {
                gens.extend_from_slice(&[0.0, -v]);
            }
        }
        let z = z2([1.0, -1.0], &gens);
        let reduced = z.reduce_order(1).unwrap();
        assert_eq!(reduced.num_generators(), 2);
        assert_eq!(reduced.interval_hull(), z.interval_hull());
        let diag = reduced.generators();
        assert_eq!(diag[(0, 1)], 0.0);
        assert_eq!(diag[(1, 0)], 0.0);
    }

    #[test]
    fn test_reduce_order_keeps_largest() {
        // order 2 in 1-D keeps one generator and boxes the rest
        let z = Zonotope::new(
            DVector::from_vec(vec![0.0, 0.0]),
            DMatrix::from_column_slice(2, 5, &[1.0, 1.0, 0.1, 0.0, 3.0, -3.0, 0.2, 0.2, 0.0, 0.5]),
        )
        .unwrap();
        let reduced = z.reduce_order(2).unwrap();
        assert_eq!(reduced.num_generators(), 4);
        // (3, -3) and (1, 1) have the largest l1 - linf metric
        assert_eq!(reduced.generators().column(0).as_slice(), &[1.0, 1.0]);
        assert_eq!(reduced.generators().column(1).as_slice(), &[3.0, -3.0]);
        assert!((reduced.generators()[(0, 2)] - 0.3).abs() < 1e-15);
        assert!((reduced.generators()[(1, 3)] - 0.7).abs() < 1e-15);
    }

    #[test]
    fn test_contains_point_basics() {
        let unit = z2([0.0, 0.0], &[1.0, 0.0, 0.0, 1.0]);
        assert!(unit.contains_point(&DVector::zeros(2)).unwrap());
        assert!(unit.contains_point(&DVector::from_vec(vec![1.0, -1.0])).unwrap());
        assert!(!unit.contains_point(&DVector::from_vec(vec![1.0001, 0.0])).unwrap());

        let p = Zonotope::point(DVector::from_vec(vec![1.0, 2.0]));
        assert!(p.contains_point(&DVector::from_vec(vec![1.0, 2.0])).unwrap());
        assert!(!p.contains_point(&DVector::from_vec(vec![1.0, 2.0 + 1e-6])).unwrap());

        // degenerate segment in 2-D
        let seg = z2([0.0, 0.0], &[1.0, 1.0]);
        assert!(seg.contains_point(&DVector::from_vec(vec![0.5, 0.5])).unwrap());
        assert!(!seg.contains_point(&DVector::from_vec(vec![0.5, 0.4])).unwrap());
        assert!(seg.contains_point(&DVector::zeros(3)).is_err());
    }

    #[test]
    fn test_contains_point_skewed() {
        // parallelogram spanned by (1, 0) and (1, 1)
        let z = z2([0.0, 0.0], &[1.0, 0.0, 1.0, 1.0]);
        assert!(z.contains_point(&DVector::from_vec(vec![2.0, 1.0])).unwrap());
        assert!(!z.contains_point(&DVector::from_vec(vec![-1.5, 1.0])).unwrap());
        assert!(z.contains_point(&DVector::from_vec(vec![-1.5, -0.8])).unwrap());
    }
}
