use nalgebra::DVector;
use statrs::distribution::{ContinuousCDF, Normal};

use super::zonotope::Zonotope;
use crate::error::{check_dim, Error, Result};

const PRIMES: [u32; 24] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
];

fn radical_inverse(mut index: u64, base: u32) -> f64 {
    let base = base as u64;
    let mut inv = 1.0 / base as f64;
    let mut result = 0.0;
    while index > 0 {
        result += (index % base) as f64 * inv;
        index /= base;
        inv /= base as f64;
    }
    result
}

/// Deterministic set of `count` unit directions in `R^dim`: the `2 dim`
/// signed axes first, then Halton points pushed through the inverse normal
/// CDF and normalized (uniform on the sphere in the limit).
pub fn direction_set(dim: usize, count: usize) -> Result<Vec<DVector<f64>>> {
    if count < 2 * dim {
        return Err(Error::InvalidArgument(format!(
            "need at least {} directions in dimension {dim}, got {count}",
            2 * dim
        )));
    }
    if dim > PRIMES.len() {
        return Err(Error::InvalidArgument(format!(
            "direction sets support at most {} dimensions",
            PRIMES.len()
        )));
    }
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    let mut dirs = Vec::with_capacity(count);
    for axis in 0..dim {
        for sign in [1.0, -1.0] {
            let mut d = DVector::zeros(dim);
            d[axis] = sign;
            dirs.push(d);
        }
    }
    let mut index = 1u64;
    while dirs.len() < count {
        let v = DVector::from_fn(dim, |k, _| normal.inverse_cdf(radical_inverse(index, PRIMES[k])));
        index += 1;
        let norm = v.norm();
        if norm.is_finite() && norm > 1e-12 {
            dirs.push(v / norm);
        }
    }
    Ok(dirs)
}

/// Support-function estimate of the Hausdorff distance between two zonotopes:
/// `max_d |h_1(d) - h_2(d)|` over [`direction_set`]`(n, n_dirs)`.
///
/// For convex sets this is a lower bound on the true distance and equals it
/// once the maximizing direction is sampled.
pub fn hausdorff_estimate(z1: &Zonotope, z2: &Zonotope, n_dirs: usize) -> Result<f64> {
    check_dim("hausdorff estimate", z1.dim(), z2.dim())?;
    let mut worst: f64 = 0.0;
    for d in direction_set(z1.dim(), n_dirs)? {
        worst = worst.max((z1.support(&d)? - z2.support(&d)?).abs());
    }
    Ok(worst)
}
