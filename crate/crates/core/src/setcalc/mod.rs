//! Zonotope and matrix-zonotope algebra.
//!
//! Everything here is a pure function over immutable values. Operations that
//! cannot be represented exactly (products with matrix zonotopes, order
//! reduction) return enclosures.

mod directions;
mod interval;
mod lp;
mod matrix;
mod zonotope;

pub use directions::{direction_set, hausdorff_estimate};
pub use interval::IntervalBox;
pub use matrix::MatrixZonotope;
pub use zonotope::{Zonotope, CONTAINMENT_TOL};
