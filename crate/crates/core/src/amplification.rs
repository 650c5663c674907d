//! Amplitude amplification toward a good subspace of basis states.
//!
//! With `U e_0 = |Φ⟩`, the operator
//! `Q = −U · P_0(φ₁) · U† · P_χ(φ₂)` keeps the plane spanned by the good and
//! bad projections `|Φ_g⟩`, `|Φ_b⟩` of `|Φ⟩` invariant. For `φ₁ = φ₂ = π`,
//! `L` applications rotate the good-subspace weight from `sin²θ` to
//! `sin²((2L+1)θ)`, where `sin²θ = g = ⟨Φ_g|Φ_g⟩`.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::operator::{prepare_unitary, UnitaryOperator};
use crate::state::StateVector;
use crate::{CMatrix, CVector, Error, Result, C64};

/// Good weights at or below this are treated as no overlap at all.
pub const ZERO_OVERLAP: f64 = 1e-15;

/// Mixing angle (radians) of the optional pre-rotation used when the
/// initial state has no good component.
pub const PRE_ROTATION_ANGLE: f64 = 0.1;

/// Default upper bound on the iteration count searched by auto mode.
pub const DEFAULT_L_MAX: u64 = 1_000_000;

const TIE_TOL: f64 = 1e-12;

/// Basis indices marked good (`χ = 1`). Nonempty strict subset of `0..dim`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoodSubspace {
    indices: Vec<usize>,
    dim: usize,
}

impl GoodSubspace {
    pub fn new(indices: impl Into<Vec<usize>>, dim: usize) -> Result<Self> {
        let mut indices = indices.into();
        indices.sort_unstable();
        indices.dedup();
        if let Some(&bad) = indices.iter().find(|&&i| i >= dim) {
            return Err(Error::IndexOutOfRange { index: bad, dim });
        }
        if indices.is_empty() {
            return Err(Error::InvalidGoodSubspace("no indices given".into()));
        }
        if indices.len() >= dim {
            return Err(Error::InvalidGoodSubspace(format!("all {dim} basis states are marked good")));
        }
        Ok(Self { indices, dim })
    }

    pub fn single(index: usize, dim: usize) -> Result<Self> {
        Self::new(alloc::vec![index], dim)
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    pub fn complement(&self) -> Vec<usize> {
        (0..self.dim).filter(|&i| !self.contains(i)).collect()
    }

    fn project(&self, v: &CVector) -> (CVector, CVector) {
        let mut good = CVector::zeros(v.len());
        let mut bad = v.clone();
        for &i in &self.indices {
            good[i] = v[i];
            bad[i] = C64::new(0.0, 0.0);
        }
        (good, bad)
    }
}

/// Amplitude pair `(α, β)` of a state `α|Φ_g⟩ + β|Φ_b⟩` in the invariant
/// plane of `Q`, where `|Φ_g⟩`, `|Φ_b⟩` are the projections of the state
/// `Q` was built from and `reference_g = ⟨Φ_g|Φ_g⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneAmplitudes {
    pub good: C64,
    pub bad: C64,
    pub reference_g: f64,
}

impl PlaneAmplitudes {
    pub fn new(reference_g: f64) -> Self {
        Self { good: C64::new(1.0, 0.0), bad: C64::new(1.0, 0.0), reference_g }
    }

    /// One application of `Q(φ₁, φ₂)`:
    ///
    /// ```text
    /// Q|Φ_g⟩ = e^{iφ₂}((1 − e^{iφ₁})g − 1)|Φ_g⟩ + e^{iφ₂}(1 − e^{iφ₁})g|Φ_b⟩
    /// Q|Φ_b⟩ = (1 − e^{iφ₁})(1 − g)|Φ_g⟩ − ((1 − e^{iφ₁})g + e^{iφ₁})|Φ_b⟩
    /// ```
    pub fn step(self, phi1: f64, phi2: f64) -> Self {
        let g = self.reference_g;
        let one = C64::new(1.0, 0.0);
        let e1 = C64::from_polar(1.0, phi1);
        let e2 = C64::from_polar(1.0, phi2);
        let k = one - e1;
        let gg = e2 * (k * g - one);
        let gb = e2 * k * g;
        let bg = k * (1.0 - g);
        let bb = -(k * g + e1);
        Self { good: self.good * gg + self.bad * bg, bad: self.good * gb + self.bad * bb, reference_g: g }
    }

    pub fn good_weight(&self) -> f64 {
        self.good.norm_sqr() * self.reference_g
    }

    pub fn bad_weight(&self) -> f64 {
        self.bad.norm_sqr() * (1.0 - self.reference_g)
    }
}

/// Split of a state into its good and bad projections.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    good_part: CVector,
    bad_part: CVector,
    g: f64,
    theta: f64,
    reference_good: CVector,
    reference_bad: CVector,
    amplitudes: PlaneAmplitudes,
}

impl Decomposition {
    /// Unnormalized good projection `|Φ_g⟩`.
    pub fn good_part(&self) -> &CVector {
        &self.good_part
    }

    /// Unnormalized bad projection `|Φ_b⟩`.
    pub fn bad_part(&self) -> &CVector {
        &self.bad_part
    }

    /// `g = ⟨Φ_g|Φ_g⟩`.
    pub fn g(&self) -> f64 {
        self.g
    }

    /// `b = 1 − g`.
    pub fn b(&self) -> f64 {
        1.0 - self.g
    }

    /// `θ ∈ [0, π/2]` with `sin²θ = g`.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Coordinates relative to the decomposition this one was stepped from.
    pub fn plane_amplitudes(&self) -> PlaneAmplitudes {
        self.amplitudes
    }

    /// `good_part + bad_part`.
    pub fn state(&self) -> CVector {
        &self.good_part + &self.bad_part
    }

    fn refresh(&mut self) {
        self.good_part = self.reference_good.map(|c| c * self.amplitudes.good);
        self.bad_part = self.reference_bad.map(|c| c * self.amplitudes.bad);
        self.g = self.good_part.norm_squared();
        self.theta = theta_of(self.g);
    }
}

fn theta_of(g: f64) -> f64 {
    libm::asin(libm::sqrt(g.clamp(0.0, 1.0)))
}

pub fn decompose(state: &StateVector, good: &GoodSubspace) -> Result<Decomposition> {
    if state.dim() != good.dim() {
        return Err(Error::DimensionMismatch { expected: good.dim(), found: state.dim() });
    }
    let (good_part, bad_part) = good.project(state.amplitudes());
    let g = good_part.norm_squared();
    Ok(Decomposition {
        reference_good: good_part.clone(),
        reference_bad: bad_part.clone(),
        good_part,
        bad_part,
        g,
        theta: theta_of(g),
        amplitudes: PlaneAmplitudes::new(g),
    })
}

/// Closed-form action of `Q(φ₁, φ₂)` on the decomposition, where `Q` is the
/// operator built from the state `d` was first decomposed from.
pub fn lemma2_step(d: &Decomposition, phi1: f64, phi2: f64) -> Decomposition {
    let mut next = d.clone();
    next.amplitudes = d.amplitudes.step(phi1, phi2);
    next.refresh();
    next
}

fn check_phase(phi: f64) -> Result<f64> {
    if (0.0..=PI).contains(&phi) {
        Ok(phi)
    } else {
        Err(Error::InvalidPhase(phi))
    }
}

/// `P_0(φ₁) = I − (1 − e^{iφ₁})|0⟩⟨0|`.
pub fn phase_oracle_zero(dim: usize, phi1: f64) -> Result<UnitaryOperator> {
    check_phase(phi1)?;
    let mut d = CVector::from_element(dim, C64::new(1.0, 0.0));
    if dim > 0 {
        d[0] = C64::from_polar(1.0, phi1);
    }
    UnitaryOperator::diagonal(&d)
}

/// `P_χ(φ₂) = I − (1 − e^{iφ₂}) Σ_{χ(x)=1} |x⟩⟨x|`.
pub fn phase_oracle_chi(good: &GoodSubspace, phi2: f64) -> Result<UnitaryOperator> {
    check_phase(phi2)?;
    let mut d = CVector::from_element(good.dim(), C64::new(1.0, 0.0));
    for &i in good.indices() {
        d[i] = C64::from_polar(1.0, phi2);
    }
    UnitaryOperator::diagonal(&d)
}

/// `Q = −U · P_0(φ₁) · U† · P_χ(φ₂)`.
pub fn build_q(prep: &UnitaryOperator, good: &GoodSubspace, phi1: f64, phi2: f64) -> Result<UnitaryOperator> {
    if prep.dim() != good.dim() {
        return Err(Error::DimensionMismatch { expected: prep.dim(), found: good.dim() });
    }
    let p0 = phase_oracle_zero(prep.dim(), phi1)?;
    let pchi = phase_oracle_chi(good, phi2)?;
    let u = prep.matrix();
    let q: CMatrix = -(u * p0.matrix() * u.adjoint() * pchi.matrix());
    UnitaryOperator::new(q)
}

fn check_probability(g: f64) -> Result<f64> {
    if g.is_finite() && g > 0.0 && g <= 1.0 + 1e-12 {
        Ok(g.min(1.0))
    } else {
        Err(Error::InvalidProbability(g))
    }
}

/// `sin²((2L+1)θ)` with `sin²θ = g`: the good weight after `L` iterations of
/// `Q(π, π)`.
pub fn theorem2_success(g: f64, iterations: u64) -> Result<f64> {
    let theta = theta_of(check_probability(g)?);
    let s = libm::sin((2.0 * iterations as f64 + 1.0) * theta);
    Ok(s * s)
}

/// Iteration count maximizing the success probability of `Q(π, π)` over the
/// first amplification lobe `(2L+1)θ ≤ π`, clamped to `l_max`.
///
/// Starts from the nearest integer to `π/(4θ) − 1/2` (where
/// `(2L+1)θ ≈ π/2`) and checks its neighbours. Ties go to the smaller `L`.
pub fn optimal_iterations(g: f64, l_max: u64) -> Result<u64> {
    let g = check_probability(g)?;
    if g >= 1.0 {
        return Ok(0);
    }
    let theta = theta_of(g);
    let estimate = libm::round(PI / (4.0 * theta) - 0.5).max(0.0);
    let center = if estimate >= l_max as f64 { l_max } else { estimate as u64 };
    let lo = center.saturating_sub(1);
    let hi = center.saturating_add(1).min(l_max);
    let mut best = lo;
    let mut best_value = theorem2_success(g, lo)?;
    for l in lo + 1..=hi {
        let v = theorem2_success(g, l)?;
        if v > best_value + TIE_TOL {
            best = l;
            best_value = v;
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Phases {
    pub phi1: f64,
    pub phi2: f64,
}

impl Phases {
    pub const STANDARD: Phases = Phases { phi1: PI, phi2: PI };

    pub fn new(phi1: f64, phi2: f64) -> Result<Self> {
        Ok(Self { phi1: check_phase(phi1)?, phi2: check_phase(phi2)? })
    }

    pub fn is_standard(&self) -> bool {
        (self.phi1 - PI).abs() < 1e-12 && (self.phi2 - PI).abs() < 1e-12
    }
}

impl Default for Phases {
    fn default() -> Self {
        Self::STANDARD
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Iterations {
    #[default]
    Auto,
    Fixed(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmplificationPlan {
    pub preparation: UnitaryOperator,
    pub good: GoodSubspace,
    pub phases: Phases,
    pub iterations: u64,
    /// Good weight of the state the plan was built for.
    pub initial_good_weight: f64,
    pub predicted_success: f64,
}

impl AmplificationPlan {
    /// Plans amplification of `initial` toward `good`. Fails with
    /// [`Error::ZeroGoodOverlap`] when `initial` has no good component.
    pub fn new(
        initial: &StateVector,
        good: &GoodSubspace,
        phases: Phases,
        iterations: Iterations,
        l_max: u64,
    ) -> Result<Self> {
        let d = decompose(initial, good)?;
        if d.g() <= ZERO_OVERLAP {
            return Err(Error::ZeroGoodOverlap);
        }
        let iterations = match iterations {
            Iterations::Auto => optimal_iterations(d.g(), l_max)?,
            Iterations::Fixed(l) => l,
        };
        let predicted_success = if phases.is_standard() {
            theorem2_success(d.g(), iterations)?
        } else {
            let mut a = PlaneAmplitudes::new(d.g());
            for _ in 0..iterations {
                a = a.step(phases.phi1, phases.phi2);
            }
            a.good_weight()
        };
        Ok(Self {
            preparation: prepare_unitary(initial)?,
            good: good.clone(),
            phases,
            iterations,
            initial_good_weight: d.g(),
            predicted_success,
        })
    }

    pub fn theta(&self) -> f64 {
        theta_of(self.initial_good_weight)
    }

    pub fn q(&self) -> Result<UnitaryOperator> {
        build_q(&self.preparation, &self.good, self.phases.phi1, self.phases.phi2)
    }

    /// `Q^L U e_0`, by explicit matrix-vector products.
    pub fn amplify(&self) -> Result<StateVector> {
        let q = self.q()?;
        let mut v = self.preparation.matrix().column(0).into_owned();
        for _ in 0..self.iterations {
            v = q.matrix() * v;
        }
        StateVector::with_tolerance(v, crate::PROPAGATED_NORM_TOL)
    }
}

/// Givens rotation by [`PRE_ROTATION_ANGLE`] mixing the most populated bad
/// index into the first good index, so the rotated state has `g > 0`.
pub fn mixing_rotation(state: &StateVector, good: &GoodSubspace) -> Result<UnitaryOperator> {
    if state.dim() != good.dim() {
        return Err(Error::DimensionMismatch { expected: good.dim(), found: state.dim() });
    }
    let target = good.indices()[0];
    let source = good
        .complement()
        .into_iter()
        .fold(None::<(usize, f64)>, |best, i| {
            let w = state.amplitudes()[i].norm_sqr();
            match best {
                Some((_, bw)) if bw >= w => best,
                _ => Some((i, w)),
            }
        })
        .map(|(i, _)| i)
        .expect("good subspace is a strict subset");
    let (s, c) = (libm::sin(PRE_ROTATION_ANGLE), libm::cos(PRE_ROTATION_ANGLE));
    let n = state.dim();
    let mut m = CMatrix::identity(n, n);
    m[(source, source)] = C64::new(c, 0.0);
    m[(target, target)] = C64::new(c, 0.0);
    m[(source, target)] = C64::new(-s, 0.0);
    m[(target, source)] = C64::new(s, 0.0);
    UnitaryOperator::new(m)
}
