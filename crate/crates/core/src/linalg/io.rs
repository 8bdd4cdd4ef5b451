use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::dims::DimsProfile;
use super::matrix::{ComplexMatrix, HermitianMatrix};
use crate::error::{Error, Result};

/// On-disk matrix: `{"dims": [d1, ..., dm], "entries": [[re, im], ...]}`,
/// entries row-major over the full `d x d` matrix.
///
/// Floats are written in shortest round-trip form, so reading back a written
/// file reproduces every entry bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dims: DimsProfile,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixFile {
    pub fn from_hermitian(h: &HermitianMatrix, dims: &DimsProfile) -> Result<Self> {
        dims.check_matches(h.dim())?;
        Ok(Self {
            dims: dims.clone(),
            entries: h.matrix().row_major().iter().map(|z| [z.re, z.im]).collect(),
        })
    }

    pub fn to_hermitian(&self) -> Result<HermitianMatrix> {
        let d = self.dims.materializable_dim()?;
        let entries = self
            .entries
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        HermitianMatrix::new(ComplexMatrix::from_row_major(d, d, entries)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("matrix file serializes")
    }
}

pub fn read_matrix_file(path: impl AsRef<Path>) -> Result<(HermitianMatrix, DimsProfile)> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| Error::Parse(format!("{}: {e}", path.as_ref().display())))?;
    let file = MatrixFile::from_json(&text)?;
    Ok((file.to_hermitian()?, file.dims))
}

pub fn write_matrix_file(
    path: impl AsRef<Path>,
    h: &HermitianMatrix,
    dims: &DimsProfile,
) -> Result<()> {
    let file = MatrixFile::from_hermitian(h, dims)?;
    std::fs::write(path.as_ref(), file.to_json())
        .map_err(|e| Error::Parse(format!("{}: {e}", path.as_ref().display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_validates() {
        let f = MatrixFile::from_json(
            r#"{"dims":[2],"entries":[[0.5,0],[0,0.25],[0,-0.25],[0.5,0]]}"#,
        )
        .unwrap();
        let h = f.to_hermitian().unwrap();
        assert_eq!(h.get(0, 1), Complex64::new(0.0, 0.25));
        assert!(MatrixFile::from_json("{not json").is_err());
        let short = MatrixFile::from_json(r#"{"dims":[2],"entries":[[1,0]]}"#).unwrap();
        assert!(short.to_hermitian().is_err());
        assert!(MatrixFile::from_json(r#"{"dims":[1],"entries":[[1,0]]}"#).is_err());
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let x = 1.0 / 3.0;
        let h = HermitianMatrix::from_real_diagonal(&[x, 1.0 - x, 0.1 + 0.2, std::f64::consts::PI]);
        let dims = DimsProfile::new(vec![2, 2]).unwrap();
        let json = MatrixFile::from_hermitian(&h, &dims).unwrap().to_json();
        let back = MatrixFile::from_json(&json).unwrap().to_hermitian().unwrap();
        assert_eq!(back, h);
    }
}
