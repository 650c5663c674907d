//! Normalized amplitude vectors over the drift eigenbasis.

use alloc::vec::Vec;

use crate::{CVector, Error, Result, C64, NORM_TOL};

/// Normalized complex amplitudes `c_i` over the drift eigenbasis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: CVector,
}

impl StateVector {
    /// Validated constructor: at least two levels, finite entries and unit
    /// norm within [`NORM_TOL`].
    pub fn new(amplitudes: impl Into<Vec<C64>>) -> Result<Self> {
        Self::with_tolerance(CVector::from_vec(amplitudes.into()), NORM_TOL)
    }

    /// Validated constructor from real amplitudes.
    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&a| C64::new(a, 0.0)).collect::<Vec<_>>())
    }

    /// Like [`StateVector::new`] with a caller chosen norm tolerance.
    pub fn with_tolerance(amplitudes: CVector, tol: f64) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(Error::DimensionTooSmall(amplitudes.len()));
        }
        if amplitudes.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite("state amplitudes"));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > tol {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { amplitudes })
    }

    /// Scales an arbitrary nonzero vector to unit norm.
    pub fn normalized(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NotNormalized { norm });
        }
        Self::with_tolerance(amplitudes.unscale(norm), NORM_TOL)
    }

    /// The computational basis vector `e_index`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::DimensionTooSmall(dim));
        }
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, dim });
        }
        let mut v = CVector::zeros(dim);
        v[index] = C64::new(1.0, 0.0);
        Ok(Self { amplitudes: v })
    }

    /// Wraps the result of a norm preserving map without re-checking it.
    pub(crate) fn from_unitary_image(amplitudes: CVector) -> Self {
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn into_inner(self) -> CVector {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `|c_i|` per basis index.
    pub fn magnitudes(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|c| c.norm()).collect()
    }

    /// `|c_i|^2` per basis index.
    pub fn populations(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|c| c.norm_sqr()).collect()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        self.inner(other).map(|z| z.norm_sqr())
    }

    /// Total population on the given indices. Out of range indices are ignored.
    pub fn weight_on(&self, indices: &[usize]) -> f64 {
        indices.iter().filter_map(|&i| self.amplitudes.get(i)).map(|c| c.norm_sqr()).sum()
    }
}
