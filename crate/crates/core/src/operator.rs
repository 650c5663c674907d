//! Unitary operators and the state-preparation unitary.

use crate::state::StateVector;
use crate::{CMatrix, CVector, Error, Result, C64, UNITARITY_TOL};

/// A square complex matrix with `U†U = I` within [`UNITARITY_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOperator {
    matrix: CMatrix,
}

impl UnitaryOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch { expected: matrix.nrows(), found: matrix.ncols() });
        }
        if matrix.nrows() < 2 {
            return Err(Error::DimensionTooSmall(matrix.nrows()));
        }
        if matrix.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite("operator entries"));
        }
        let deviation = unitarity_deviation(&matrix);
        if deviation > UNITARITY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self { matrix })
    }

    /// Wraps a matrix that is unitary by construction.
    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        debug_assert!(unitarity_deviation(&matrix) < 1e-8);
        Self { matrix }
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: CMatrix::identity(dim, dim) }
    }

    /// Diagonal unitary from unit-modulus entries.
    pub fn diagonal(phases: &CVector) -> Result<Self> {
        Self::new(CMatrix::from_diagonal(phases))
    }

    /// Permutation operator sending basis state `j` to `perm[j]`.
    pub fn permutation(perm: &[usize]) -> Result<Self> {
        let n = perm.len();
        let mut m = CMatrix::zeros(n, n);
        for (j, &i) in perm.iter().enumerate() {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, dim: n });
            }
            m[(i, j)] = C64::new(1.0, 0.0);
        }
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_inner(self) -> CMatrix {
        self.matrix
    }

    /// `U^{-1} = U†`.
    pub fn adjoint(&self) -> Self {
        Self { matrix: self.matrix.adjoint() }
    }

    /// `self · other` (apply `other` first).
    pub fn compose(&self, other: &UnitaryOperator) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(Self { matrix: &self.matrix * &other.matrix })
    }

    /// `self^power` by repeated squaring.
    pub fn pow(&self, mut power: u64) -> Self {
        let mut result = CMatrix::identity(self.dim(), self.dim());
        let mut base = self.matrix.clone();
        while power > 0 {
            if power & 1 == 1 {
                result = &result * &base;
            }
            power >>= 1;
            if power > 0 {
                base = &base * &base;
            }
        }
        Self { matrix: result }
    }

    /// Max entry of `|U†U - I|`.
    pub fn unitarity_deviation(&self) -> f64 {
        unitarity_deviation(&self.matrix)
    }
}

pub(crate) fn unitarity_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let product = m.adjoint() * m;
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let expected = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((product[(i, j)] - C64::new(expected, 0.0)).norm());
        }
    }
    worst
}

/// Matrix-vector product `U|state⟩`. No renormalization is applied.
pub fn apply_operator(op: &UnitaryOperator, state: &StateVector) -> Result<StateVector> {
    if op.dim() != state.dim() {
        return Err(Error::DimensionMismatch { expected: op.dim(), found: state.dim() });
    }
    Ok(StateVector::from_unitary_image(&op.matrix * state.amplitudes()))
}

/// Unitary `U` with `U e_0 = target`.
///
/// Built as `H · D` where `D = diag(-ω, 1, …, 1)` carries the phase `ω` of
/// `target[0]` and `H` is the Householder reflection sending `e_0` to
/// `w = -conj(ω)·target`. Since `w[0] = -|target[0]| ≤ 0`, the reflection
/// vector `e_0 - w` never suffers cancellation in its leading entry.
pub fn prepare_unitary(target: &StateVector) -> Result<UnitaryOperator> {
    let norm = target.norm();
    if (norm - 1.0).abs() > crate::NORM_TOL {
        return Err(Error::NotNormalized { norm });
    }
    let n = target.dim();
    let t = target.amplitudes();
    let lead = t[0].norm();
    let omega = if lead > 0.0 { t[0].unscale(lead) } else { C64::new(1.0, 0.0) };

    let w: CVector = t.map(|c| -omega.conj() * c);
    let mut v = -w;
    v[0] += C64::new(1.0, 0.0);
    let v_norm_sqr = v.norm_squared();

    let mut h = CMatrix::identity(n, n);
    // v[0] ≥ 1 so v is never zero.
    h -= (&v * v.adjoint()).scale(2.0 / v_norm_sqr);

    let mut d = CVector::from_element(n, C64::new(1.0, 0.0));
    d[0] = -omega;
    let u = h * CMatrix::from_diagonal(&d);
    UnitaryOperator::new(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn assert_vec_close(a: &CVector, b: &CVector, tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b.iter()) {
            assert!((x - y).norm() < tol, "{x} vs {y}");
        }
    }

    #[test]
    fn prepare_first_basis_vector_is_identity() {
        let u = prepare_unitary(&StateVector::basis(4, 0).unwrap()).unwrap();
        let id = CMatrix::identity(4, 4);
        assert!((u.matrix() - id).iter().all(|c| c.norm() < 1e-15));
    }

    #[test]
    fn prepare_second_basis_vector() {
        let target = StateVector::basis(2, 1).unwrap();
        let u = prepare_unitary(&target).unwrap();
        let image = apply_operator(&u, &StateVector::basis(2, 0).unwrap()).unwrap();
        assert_vec_close(image.amplitudes(), target.amplitudes(), 1e-10);
    }

    #[test]
    fn prepare_hydrogen_case_one_state() {
        let target = StateVector::from_real(&[0.7, 0.5, 0.3, 0.4, 0.1]).unwrap();
        let u = prepare_unitary(&target).unwrap();
        assert!(u.unitarity_deviation() < 1e-10);
        let image = apply_operator(&u, &StateVector::basis(5, 0).unwrap()).unwrap();
        assert_vec_close(image.amplitudes(), target.amplitudes(), 1e-10);
    }

    #[test]
    fn prepare_complex_leading_phase() {
        let s = 0.5f64.sqrt();
        let target = StateVector::new(vec![C64::new(0.0, s), C64::new(0.5, 0.0), C64::new(0.0, -0.5)]).unwrap();
        let u = prepare_unitary(&target).unwrap();
        let image = apply_operator(&u, &StateVector::basis(3, 0).unwrap()).unwrap();
        assert_vec_close(image.amplitudes(), target.amplitudes(), 1e-12);
    }

    #[test]
    fn prepare_rejects_unnormalized() {
        let raw = StateVector::from_unitary_image(CVector::from_vec(vec![C64::new(2.0, 0.0), C64::new(0.0, 0.0)]));
        assert!(matches!(prepare_unitary(&raw), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn identity_leaves_state_alone() {
        let s = StateVector::from_real(&[0.6, 0.8]).unwrap();
        let out = apply_operator(&UnitaryOperator::identity(2), &s).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn swap_permutation() {
        let p = UnitaryOperator::permutation(&[1, 0, 2]).unwrap();
        let out = apply_operator(&p, &StateVector::basis(3, 0).unwrap()).unwrap();
        assert_eq!(out, StateVector::basis(3, 1).unwrap());
    }

    #[test]
    fn dimension_mismatch() {
        let err = apply_operator(&UnitaryOperator::identity(3), &StateVector::basis(2, 0).unwrap()).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 3, found: 2 });
    }

    #[test]
    fn rejects_non_unitary() {
        let m = CMatrix::from_element(2, 2, C64::new(1.0, 0.0));
        assert!(matches!(UnitaryOperator::new(m), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn pow_matches_repeated_product() {
        let target = StateVector::from_real(&[0.6, 0.0, 0.8]).unwrap();
        let u = prepare_unitary(&target).unwrap();
        let mut expected = UnitaryOperator::identity(3);
        for _ in 0..5 {
            expected = u.compose(&expected).unwrap();
        }
        let got = u.pow(5);
        assert!((got.matrix() - expected.matrix()).iter().all(|c| c.norm() < 1e-12));
    }
}
