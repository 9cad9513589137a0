//! Set-based reachability for linear systems identified from data.
//!
//! Zonotope arithmetic lives in [`setcalc`], simulation and data assembly in
//! [`sysdata`], model-set identification in [`ddmodel`] and the propagation
//! chains in [`reach`]. [`conformal`] calibrates learned set predictors and
//! [`protocol`] speaks to out-of-process ones. [`scenario`] wires everything
//! into the benchmark pipeline.

pub mod conformal;
pub mod ddmodel;
pub mod document;
pub mod error;
pub mod linalg;
pub mod protocol;
pub mod reach;
pub mod scenario;
pub mod setcalc;
pub mod sysdata;

pub use error::{Error, Result};
