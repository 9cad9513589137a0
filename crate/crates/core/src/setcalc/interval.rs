use nalgebra::DVector;

use crate::error::{check_dim, Error, Result};

/// Axis-aligned box `[lower, upper]`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalBox {
    lower: DVector<f64>,
    upper: DVector<f64>,
}

impl IntervalBox {
    pub fn new(lower: DVector<f64>, upper: DVector<f64>) -> Result<Self> {
        check_dim("interval box", lower.len(), upper.len())?;
        if lower.iter().zip(upper.iter()).any(|(l, u)| !(l <= u)) {
            return Err(Error::InvalidArgument(
                "interval lower bound exceeds upper bound".into(),
            ));
        }
        Ok(Self { lower, upper })
    }

    pub(crate) fn from_parts(lower: DVector<f64>, upper: DVector<f64>) -> Self {
        Self { lower, upper }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &DVector<f64> {
        &self.lower
    }

    pub fn upper(&self) -> &DVector<f64> {
        &self.upper
    }

    pub fn widths(&self) -> DVector<f64> {
        &self.upper - &self.lower
    }

    pub fn mean_width(&self) -> f64 {
        if self.dim() == 0 {
            0.0
        } else {
            self.widths().mean()
        }
    }

    /// Grow every face outward by `margin`.
    pub fn inflate(&self, margin: f64) -> IntervalBox {
        Self::from_parts(
            self.lower.add_scalar(-margin),
            self.upper.add_scalar(margin),
        )
    }

    pub fn contains(&self, x: &DVector<f64>) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.lower.iter().zip(self.upper.iter()))
                .all(|(v, (l, u))| *l <= *v && *v <= *u)
    }

    /// Componentwise containment `self ⊆ other`.
    pub fn is_subset_of(&self, other: &IntervalBox) -> bool {
        self.dim() == other.dim()
            && (0..self.dim())
                .all(|d| other.lower[d] <= self.lower[d] && self.upper[d] <= other.upper[d])
    }
}
