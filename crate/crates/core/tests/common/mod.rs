#![allow(dead_code)]

use ira_core::setcalc::{MatrixZonotope, Zonotope};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vector<R: Rng>(rng: &mut R, n: usize, scale: f64) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.gen_range(-scale..scale))
}

pub fn random_zonotope<R: Rng>(rng: &mut R, n: usize, gens: usize) -> Zonotope {
    Zonotope::new(
        random_vector(rng, n, 2.0),
        DMatrix::from_fn(n, gens, |_, _| rng.gen_range(-1.0..1.0)),
    )
    .unwrap()
}

pub fn random_matrix_zonotope<R: Rng>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    gens: usize,
) -> MatrixZonotope {
    MatrixZonotope::new(
        DMatrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..1.0)),
        (0..gens)
            .map(|_| DMatrix::from_fn(rows, cols, |_, _| rng.gen_range(-0.3..0.3)))
            .collect(),
    )
    .unwrap()
}

pub fn random_unit<R: Rng>(rng: &mut R, n: usize) -> DVector<f64> {
    loop {
        let v = random_vector(rng, n, 1.0);
        let norm = v.norm();
        if norm > 1e-3 {
            return v / norm;
        }
    }
}

/// All `2^p` sign-pattern corners of a zonotope.
pub fn corners(z: &Zonotope) -> Vec<DVector<f64>> {
    let p = z.num_generators();
    (0..1u32 << p)
        .map(|mask| {
            let signs: Vec<f64> = (0..p)
                .map(|i| if mask >> i & 1 == 1 { 1.0 } else { -1.0 })
                .collect();
            z.corner(&signs)
        })
        .collect()
}
