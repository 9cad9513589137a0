//! JSON documents for sets, data and chains.
//!
//! Every floating-point value is written with 17 significant digits so that
//! finite doubles survive a write/read cycle bit for bit. Matrices are stored
//! column-major as a list of columns.

use nalgebra::{DMatrix, DVector};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;

use crate::error::{Error, Result};
use crate::setcalc::{MatrixZonotope, Zonotope};

/// A double that serializes with 17 significant digits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct F17(pub f64);

impl Serialize for F17 {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::Error as _;
        if !self.0.is_finite() {
            return Err(S::Error::custom("non-finite value in document"));
        }
        let raw = RawValue::from_string(format!("{:.16e}", self.0)).map_err(S::Error::custom)?;
        raw.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for F17 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        f64::deserialize(deserializer).map(F17)
    }
}

pub fn vector_to_doc(v: &DVector<f64>) -> Vec<F17> {
    v.iter().copied().map(F17).collect()
}

pub fn vector_from_doc(v: &[F17]) -> DVector<f64> {
    DVector::from_iterator(v.len(), v.iter().map(|x| x.0))
}

pub fn matrix_to_doc(m: &DMatrix<f64>) -> Vec<Vec<F17>> {
    m.column_iter()
        .map(|c| c.iter().copied().map(F17).collect())
        .collect()
}

pub fn matrix_from_doc(cols: &[Vec<F17>], rows: usize) -> Result<DMatrix<f64>> {
    if let Some(bad) = cols.iter().find(|c| c.len() != rows) {
        return Err(Error::Document(format!(
            "column of length {} where {rows} rows were expected",
            bad.len()
        )));
    }
    Ok(DMatrix::from_iterator(
        rows,
        cols.len(),
        cols.iter().flat_map(|c| c.iter().map(|x| x.0)),
    ))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZonotopeDoc {
    pub dim: usize,
    pub center: Vec<F17>,
    pub generators: Vec<Vec<F17>>,
}

impl From<&Zonotope> for ZonotopeDoc {
    fn from(z: &Zonotope) -> Self {
        Self {
            dim: z.dim(),
            center: vector_to_doc(z.center()),
            generators: matrix_to_doc(z.generators()),
        }
    }
}

impl TryFrom<&ZonotopeDoc> for Zonotope {
    type Error = Error;

    fn try_from(doc: &ZonotopeDoc) -> Result<Self> {
        if doc.center.len() != doc.dim {
            return Err(Error::Document(format!(
                "center has {} entries, dim is {}",
                doc.center.len(),
                doc.dim
            )));
        }
        Zonotope::new(
            vector_from_doc(&doc.center),
            matrix_from_doc(&doc.generators, doc.dim)?,
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixZonotopeDoc {
    pub rows: usize,
    pub cols: usize,
    pub center: Vec<Vec<F17>>,
    pub generators: Vec<Vec<Vec<F17>>>,
}

impl From<&MatrixZonotope> for MatrixZonotopeDoc {
    fn from(m: &MatrixZonotope) -> Self {
        let (rows, cols) = m.shape();
        Self {
            rows,
            cols,
            center: matrix_to_doc(m.center()),
            generators: m.generators().iter().map(matrix_to_doc).collect(),
        }
    }
}

impl TryFrom<&MatrixZonotopeDoc> for MatrixZonotope {
    type Error = Error;

    fn try_from(doc: &MatrixZonotopeDoc) -> Result<Self> {
        let read = |cols: &[Vec<F17>]| -> Result<DMatrix<f64>> {
            let m = matrix_from_doc(cols, doc.rows)?;
            if m.ncols() != doc.cols {
                return Err(Error::Document(format!(
                    "matrix with {} columns where {} were expected",
                    m.ncols(),
                    doc.cols
                )));
            }
            Ok(m)
        };
        let center = read(&doc.center)?;
        let generators = doc
            .generators
            .iter()
            .map(|g| read(g))
            .collect::<Result<Vec<_>>>()?;
        MatrixZonotope::new(center, generators)
    }
}

pub fn to_string<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::Document(e.to_string()))
}

pub fn from_str<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))
}

impl Zonotope {
    pub fn to_document(&self) -> Result<String> {
        to_string(&ZonotopeDoc::from(self))
    }

    pub fn from_document(text: &str) -> Result<Zonotope> {
        let doc: ZonotopeDoc = from_str(text)?;
        Zonotope::try_from(&doc)
    }
}
