use serde::{Deserialize, Serialize};

use super::matrix::check_cap;
use crate::error::{Error, Result};

/// Ordered local dimensions `(d_1, ..., d_m)` of a multipartite system.
///
/// Profiles with an astronomically large total dimension are allowed (the
/// formula-level bounds work in the log domain); only [`DimsProfile::dim`]
/// and materialization require the product to be representable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct DimsProfile {
    dims: Vec<usize>,
}

impl DimsProfile {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidDims("at least one party is required".into()));
        }
        if let Some(&bad) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidDims(format!(
                "every local dimension must be >= 2, got {bad}"
            )));
        }
        Ok(Self { dims })
    }

    /// `m` parties of dimension `d0`.
    pub fn uniform(d0: usize, m: usize) -> Result<Self> {
        Self::new(vec![d0; m])
    }

    pub fn qubits(m: usize) -> Result<Self> {
        Self::uniform(2, m)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn parties(&self) -> usize {
        self.dims.len()
    }

    /// Total dimension, if it fits in a `usize`.
    pub fn dim(&self) -> Result<usize> {
        self.dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| Error::InvalidDims("total dimension overflows".into()))
    }

    /// Total dimension, refused above the materialization cap.
    pub fn materializable_dim(&self) -> Result<usize> {
        let d = self.dim()?;
        check_cap(d)?;
        Ok(d)
    }

    /// `ln(prod d_i)`, always finite.
    pub fn ln_dim(&self) -> f64 {
        self.dims.iter().map(|&d| (d as f64).ln()).sum()
    }

    /// `Some(d0)` when every party has the same dimension.
    pub fn homogeneous(&self) -> Option<usize> {
        let first = self.dims[0];
        self.dims.iter().all(|&d| d == first).then_some(first)
    }

    /// Copy with dimensions in ascending order.
    pub fn sorted(&self) -> Self {
        let mut dims = self.dims.clone();
        dims.sort_unstable();
        Self { dims }
    }

    pub(crate) fn check_matches(&self, dim: usize) -> Result<()> {
        let expected = self.dim()?;
        if expected != dim {
            Err(Error::DimensionMismatch {
                expected,
                found: dim,
            })
        } else {
            Ok(())
        }
    }
}

impl TryFrom<Vec<usize>> for DimsProfile {
    type Error = Error;

    fn try_from(dims: Vec<usize>) -> Result<Self> {
        Self::new(dims)
    }
}

impl From<DimsProfile> for Vec<usize> {
    fn from(p: DimsProfile) -> Self {
        p.dims
    }
}

impl std::fmt::Display for DimsProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}
