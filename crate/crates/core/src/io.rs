//! Matrix and vector files: JSON `{ "n": int, "entries": [[re, im], ...] }`.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// On-disk form of a vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorFile {
    pub n: usize,
    pub entries: Vec<[f64; 2]>,
}

impl VectorFile {
    pub fn from_vector(x: &[Complex64]) -> Self {
        VectorFile {
            n: x.len(),
            entries: x.iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn into_vector(self) -> Result<Vec<Complex64>> {
        if self.entries.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: self.entries.len(),
            });
        }
        Ok(self.entries.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }
}

pub fn parse_matrix(text: &str) -> Result<ComplexMatrix> {
    serde_json::from_str(text).map_err(|e| Error::InvalidMatrix(e.to_string()))
}

pub fn parse_vector(text: &str) -> Result<Vec<Complex64>> {
    serde_json::from_str::<VectorFile>(text)?.into_vector()
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<ComplexMatrix> {
    parse_matrix(&fs::read_to_string(path)?)
}

pub fn read_vector(path: impl AsRef<Path>) -> Result<Vec<Complex64>> {
    parse_vector(&fs::read_to_string(path)?)
}

pub fn write_matrix(path: impl AsRef<Path>, a: &ComplexMatrix) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(a)?)?;
    Ok(())
}

pub fn write_vector(path: impl AsRef<Path>, x: &[Complex64]) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(&VectorFile::from_vector(x))?)?;
    Ok(())
}
