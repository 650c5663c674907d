//! Exact propagation of the coefficient equation under piecewise-constant
//! controls. Units are chosen so that `ħ = 1`.

use alloc::vec::Vec;

use nalgebra::SymmetricEigen;

use crate::operator::UnitaryOperator;
use crate::state::StateVector;
use crate::system::SystemSpec;
use crate::{CMatrix, Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSegment {
    pub duration: f64,
    pub value: f64,
}

/// Piecewise-constant control `u(t)`: each segment holds `value` for
/// `duration`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ControlPulse {
    segments: Vec<PulseSegment>,
}

impl ControlPulse {
    pub fn new(segments: Vec<PulseSegment>) -> Result<Self> {
        for (index, s) in segments.iter().enumerate() {
            if !(s.duration.is_finite() && s.duration > 0.0) {
                return Err(Error::InvalidPulse { index, duration: s.duration });
            }
            if !s.value.is_finite() {
                return Err(Error::NonFinite("pulse value"));
            }
        }
        Ok(Self { segments })
    }

    pub fn constant(value: f64, duration: f64) -> Result<Self> {
        Self::new(alloc::vec![PulseSegment { duration, value }])
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn segments(&self) -> &[PulseSegment] {
        &self.segments
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// Field value at time `t`; zero outside `[0, T)`.
    pub fn value_at(&self, t: f64) -> f64 {
        let mut start = 0.0;
        for s in &self.segments {
            if t >= start && t < start + s.duration {
                return s.value;
            }
            start += s.duration;
        }
        0.0
    }

    /// Concatenation, `self` first.
    pub fn then(&self, other: &ControlPulse) -> ControlPulse {
        let mut segments = self.segments.clone();
        segments.extend_from_slice(&other.segments);
        ControlPulse { segments }
    }
}

/// `exp(-i (A + uB) dt)` via the eigendecomposition of the Hermitian
/// generator.
pub fn segment_propagator(spec: &SystemSpec, u: f64, dt: f64) -> UnitaryOperator {
    let h = spec.hamiltonian(u);
    // Symmetrize away round-off so the solver sees an exactly Hermitian input.
    let h = (&h + h.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(h);
    let phases: CMatrix = CMatrix::from_diagonal(&eig.eigenvalues.map(|l| {
        let angle = -l * dt;
        C64::new(libm::cos(angle), libm::sin(angle))
    }));
    let v = &eig.eigenvectors;
    UnitaryOperator::from_matrix_unchecked(v * phases * v.adjoint())
}

/// Propagator of the whole pulse, segments applied in order.
pub fn pulse_propagator(spec: &SystemSpec, pulse: &ControlPulse) -> UnitaryOperator {
    let n = spec.dim();
    let mut total = CMatrix::identity(n, n);
    for s in pulse.segments() {
        total = segment_propagator(spec, s.value, s.duration).matrix() * total;
    }
    UnitaryOperator::from_matrix_unchecked(total)
}

/// `C(T)` for the given pulse and initial coefficients. An empty pulse
/// returns `initial` unchanged.
pub fn propagate(spec: &SystemSpec, pulse: &ControlPulse, initial: &StateVector) -> Result<StateVector> {
    if spec.dim() != initial.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), found: initial.dim() });
    }
    let mut c = initial.amplitudes().clone();
    for s in pulse.segments() {
        c = segment_propagator(spec, s.value, s.duration).matrix() * c;
    }
    StateVector::with_tolerance(c, crate::PROPAGATED_NORM_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn rabi_spec() -> SystemSpec {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        SystemSpec::new(vec![0.0, 0.0], CMatrix::from_row_slice(2, 2, &[zero, one, one, zero])).unwrap()
    }

    #[test]
    fn empty_pulse_is_identity() {
        let s = StateVector::from_real(&[0.6, 0.8]).unwrap();
        assert_eq!(propagate(&rabi_spec(), &ControlPulse::empty(), &s).unwrap(), s);
    }

    #[test]
    fn free_evolution_of_eigenstate_is_a_phase() {
        let b = CMatrix::from_element(3, 3, C64::new(0.3, 0.0));
        let spec = SystemSpec::new(vec![0.0, 1.5, -2.0], b).unwrap();
        let t = 1.7;
        let out =
            propagate(&spec, &ControlPulse::constant(0.0, t).unwrap(), &StateVector::basis(3, 1).unwrap()).unwrap();
        let expected = C64::new(libm::cos(-1.5 * t), libm::sin(-1.5 * t));
        assert!((out.amplitudes()[1] - expected).norm() < 1e-12);
        assert!(out.amplitudes()[0].norm() < 1e-12);
        assert!(out.amplitudes()[2].norm() < 1e-12);
    }

    #[test]
    fn two_level_rabi_populations() {
        let spec = rabi_spec();
        for &(u, t) in &[(0.3, 1.0), (1.0, 0.7), (2.5, 3.1)] {
            let out =
                propagate(&spec, &ControlPulse::constant(u, t).unwrap(), &StateVector::basis(2, 0).unwrap()).unwrap();
            let p = out.populations();
            let c = libm::cos(u * t);
            assert!((p[0] - c * c).abs() < 1e-12);
            assert!((p[1] - (1.0 - c * c)).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_segment() {
        let err = ControlPulse::new(vec![
            PulseSegment { duration: 1.0, value: 0.0 },
            PulseSegment { duration: 0.0, value: 1.0 },
        ])
        .unwrap_err();
        assert_eq!(err, Error::InvalidPulse { index: 1, duration: 0.0 });
    }

    #[test]
    fn value_lookup() {
        let p = ControlPulse::new(vec![
            PulseSegment { duration: 1.0, value: 2.0 },
            PulseSegment { duration: 0.5, value: -1.0 },
        ])
        .unwrap();
        assert_eq!(p.value_at(0.5), 2.0);
        assert_eq!(p.value_at(1.2), -1.0);
        assert_eq!(p.value_at(1.6), 0.0);
        assert_eq!(p.total_duration(), 1.5);
    }
}
