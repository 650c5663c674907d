//! The controlled system `i dC/dt = (A + u(t) B) C`.

use alloc::vec::Vec;

use num_rational::Rational64;

use crate::{CMatrix, Error, Result, C64, HERMITICITY_TOL};

/// Diagonal drift `A = diag(λ)` and Hermitian coupling `B`, both expressed in
/// the drift eigenbasis. Basis order is the order given; it is never sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    drift: Vec<f64>,
    coupling: CMatrix,
    exact_drift: Option<Vec<Rational64>>,
}

impl SystemSpec {
    pub fn new(drift: Vec<f64>, coupling: CMatrix) -> Result<Self> {
        let n = drift.len();
        if n < 2 {
            return Err(Error::DimensionTooSmall(n));
        }
        if coupling.nrows() != n {
            return Err(Error::DimensionMismatch { expected: n, found: coupling.nrows() });
        }
        if coupling.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: coupling.ncols() });
        }
        if drift.iter().any(|l| !l.is_finite()) {
            return Err(Error::NonFinite("drift eigenvalues"));
        }
        if coupling.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite("coupling matrix"));
        }
        for i in 0..n {
            for j in i..n {
                let deviation = (coupling[(i, j)] - coupling[(j, i)].conj()).norm();
                if deviation > HERMITICITY_TOL {
                    return Err(Error::NotHermitian { row: i, col: j, deviation });
                }
            }
        }
        Ok(Self { drift, coupling, exact_drift: None })
    }

    /// Spec whose drift eigenvalues are known exactly. This makes the
    /// rationality condition of the controllability criteria decidable.
    pub fn with_exact_drift(drift: Vec<Rational64>, coupling: CMatrix) -> Result<Self> {
        let approx = drift.iter().map(rational_to_f64).collect();
        let mut spec = Self::new(approx, coupling)?;
        spec.exact_drift = Some(drift);
        Ok(spec)
    }

    pub fn dim(&self) -> usize {
        self.drift.len()
    }

    pub fn drift(&self) -> &[f64] {
        &self.drift
    }

    pub fn exact_drift(&self) -> Option<&[Rational64]> {
        self.exact_drift.as_deref()
    }

    pub fn coupling(&self) -> &CMatrix {
        &self.coupling
    }

    /// `ν_ij = λ_i − λ_j`.
    pub fn transition_frequency(&self, i: usize, j: usize) -> f64 {
        self.drift[i] - self.drift[j]
    }

    /// Exact `ν_ij` when the drift was supplied as rationals.
    pub fn exact_transition_frequency(&self, i: usize, j: usize) -> Option<Rational64> {
        self.exact_drift.as_ref().map(|d| d[i] - d[j])
    }

    /// `A + u B`.
    pub fn hamiltonian(&self, u: f64) -> CMatrix {
        let mut h = self.coupling.scale(u);
        for (i, &l) in self.drift.iter().enumerate() {
            h[(i, i)] += C64::new(l, 0.0);
        }
        h
    }

    /// Max entry of `|[A, B]|`. Since `A` is diagonal, `[A,B]_ij = ν_ij B_ij`.
    pub fn commutator_norm(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.coupling[(i, j)] * self.transition_frequency(i, j)).norm());
            }
        }
        worst
    }

    /// `[A, B] = 0`: the control cannot induce any transition between
    /// non-degenerate levels and the control problem is trivial.
    pub fn is_trivial(&self) -> bool {
        self.commutator_norm() <= HERMITICITY_TOL
    }
}

pub(crate) fn rational_to_f64(r: &Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn sigma_x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)])
    }

    #[test]
    fn rejects_non_hermitian_and_names_entry() {
        let mut b = sigma_x();
        b[(0, 1)] = C64::new(1.0, 0.5);
        let err = SystemSpec::new(vec![0.0, 1.0], b).unwrap_err();
        assert!(matches!(err, Error::NotHermitian { row: 0, col: 1, .. }));
    }

    #[test]
    fn rejects_complex_diagonal() {
        let mut b = sigma_x();
        b[(1, 1)] = C64::new(0.0, 1e-6);
        assert!(matches!(SystemSpec::new(vec![0.0, 1.0], b), Err(Error::NotHermitian { row: 1, col: 1, .. })));
    }

    #[test]
    fn commuting_coupling_is_trivial() {
        let spec = SystemSpec::new(vec![0.0, 0.0], sigma_x()).unwrap();
        assert!(spec.is_trivial());
        let spec = SystemSpec::new(vec![0.0, 1.0], sigma_x()).unwrap();
        assert!(!spec.is_trivial());
    }

    #[test]
    fn exact_drift_keeps_rationals() {
        let spec = SystemSpec::with_exact_drift(vec![Rational64::new(1, 3), Rational64::new(2, 3)], sigma_x()).unwrap();
        assert_eq!(spec.exact_transition_frequency(1, 0), Some(Rational64::new(1, 3)));
        assert!((spec.transition_frequency(1, 0) - 1.0 / 3.0).abs() < 1e-15);
    }
}
