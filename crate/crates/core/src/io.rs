//! JSON file formats for operators, states and subspaces.
//!
//! A complex entry is `[re, im]`, a matrix is an array of rows and a vector an
//! array of entries. Floats are written in shortest round-trip form, so every
//! value re-parses to the identical `f64`.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qm::matrix::{check_square, ComplexMatrix, ComplexVector};
use crate::qm::{validate_measurement, DensityMatrix, GeneralizedMeasurement, HermitianOperator, KrausSet, Subspace};
use num_complex::Complex64;

pub type JsonComplex = [f64; 2];
pub type JsonMatrix = Vec<Vec<JsonComplex>>;
pub type JsonVector = Vec<JsonComplex>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementFile {
    pub dim: usize,
    pub elements: Vec<JsonMatrix>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub kraus: Option<Vec<Vec<JsonMatrix>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub dim: usize,
    pub rho: JsonMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubspaceFile {
    pub dim: usize,
    pub basis: Vec<JsonVector>,
}

pub fn matrix_to_json(m: &ComplexMatrix) -> JsonMatrix {
    (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect()).collect()
}

pub fn vector_to_json(v: &ComplexVector) -> JsonVector {
    v.iter().map(|z| [z.re, z.im]).collect()
}

/// Parses a `dim x dim` matrix.
pub fn matrix_from_json(rows: &JsonMatrix, dim: usize) -> Result<ComplexMatrix> {
    if rows.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: rows.len() });
    }
    if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
        return Err(Error::NotSquare { rows: dim, cols: bad.len() });
    }
    let m = ComplexMatrix::from_fn(dim, dim, |r, c| Complex64::new(rows[r][c][0], rows[r][c][1]));
    check_square(&m)?;
    Ok(m)
}

pub fn vector_from_json(v: &JsonVector, dim: usize) -> Result<ComplexVector> {
    if v.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
    }
    Ok(ComplexVector::from_iterator(dim, v.iter().map(|z| Complex64::new(z[0], z[1]))))
}

impl MeasurementFile {
    pub fn from_measurement(c: &GeneralizedMeasurement) -> Self {
        Self {
            dim: c.dim(),
            elements: c.elements().iter().map(|e| matrix_to_json(e.matrix())).collect(),
            kraus: c
                .kraus()
                .map(|k| k.iter().map(|ops| ops.iter().map(matrix_to_json).collect()).collect()),
        }
    }

    pub fn to_measurement(&self) -> Result<GeneralizedMeasurement> {
        let elements = self
            .elements
            .iter()
            .map(|m| HermitianOperator::new(matrix_from_json(m, self.dim)?))
            .collect::<Result<Vec<_>>>()?;
        let kraus = match &self.kraus {
            None => None,
            Some(sets) => Some(KrausSet::new(
                sets.iter()
                    .map(|ops| ops.iter().map(|m| matrix_from_json(m, self.dim)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?,
            )),
        };
        validate_measurement(elements, kraus)
    }
}

impl StateFile {
    pub fn from_state(rho: &DensityMatrix) -> Self {
        Self { dim: rho.dim(), rho: matrix_to_json(rho.matrix()) }
    }

    pub fn to_state(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(matrix_from_json(&self.rho, self.dim)?)
    }
}

impl SubspaceFile {
    pub fn from_subspace(g: &Subspace) -> Self {
        Self { dim: g.ambient_dim(), basis: g.basis().iter().map(vector_to_json).collect() }
    }

    pub fn to_subspace(&self) -> Result<Subspace> {
        let basis = self.basis.iter().map(|v| vector_from_json(v, self.dim)).collect::<Result<Vec<_>>>()?;
        Subspace::new(self.dim, basis)
    }
}

fn parse<T: DeserializeOwned>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

pub fn parse_measurement(text: &str) -> Result<GeneralizedMeasurement> {
    parse::<MeasurementFile>(text, "measurement")?.to_measurement()
}

pub fn parse_state(text: &str) -> Result<DensityMatrix> {
    parse::<StateFile>(text, "state")?.to_state()
}

pub fn parse_subspace(text: &str) -> Result<Subspace> {
    parse::<SubspaceFile>(text, "subspace")?.to_subspace()
}

pub fn measurement_to_string(c: &GeneralizedMeasurement) -> String {
    serde_json::to_string_pretty(&MeasurementFile::from_measurement(c)).expect("finite floats serialize")
}

pub fn state_to_string(rho: &DensityMatrix) -> String {
    serde_json::to_string_pretty(&StateFile::from_state(rho)).expect("finite floats serialize")
}

pub fn subspace_to_string(g: &Subspace) -> String {
    serde_json::to_string_pretty(&SubspaceFile::from_subspace(g)).expect("finite floats serialize")
}
