//! Five-level hydrogen model under a z-polarized field.
//!
//! Basis order is `(φ_a, φ_b1, φ_b2, φ_b3, φ_b4)`: the 1s ground state and the
//! four degenerate n = 2 states 2s, 2p₀, 2p₊₁, 2p₋₁. A field along z couples
//! 1s–2p₀ and 2s–2p₀ only; 2p±₁ are untouched.
//!
//! Dipole matrix elements are measured in units of `a·e` (Bohr radius times
//! elementary charge) and absorbed into the field amplitude, so with `ħ = 1`
//! the couplings are the pure numbers `128√2/243` and `3`:
//!
//! ```text
//! B[a, b2]  = B[b2, a]  = −128√2/243
//! B[b1, b2] = B[b2, b1] = 3
//! ```
//!
//! In the interaction picture `C(t) = e^{iAt} C_S(t)` the coefficients obey
//! `dC/dt = T(t) C` with `T_ij = −i u(t) B_ij e^{i(λ_i − λ_j)t}`. The printed
//! form of this matrix in the literature puts `e^{−i(E_b−E_a)t}` on both
//! `T[a, b2]` and `T[b2, a]`, which is not skew-Hermitian and does not
//! conserve the norm; [`PhaseConvention::AsPrinted`] reproduces it for
//! comparison.

use alloc::vec;
use alloc::vec::Vec;

use crate::amplification::{GoodSubspace, Phases};
use crate::propagate::ControlPulse;
use crate::state::StateVector;
use crate::system::SystemSpec;
use crate::{CMatrix, CVector, Error, Result, C64};

pub const DIM: usize = 5;

pub const BASIS_LABELS: [&str; DIM] = ["a", "b1", "b2", "b3", "b4"];

pub const GROUND: usize = 0;
pub const B1: usize = 1;
pub const B2: usize = 2;
pub const B3: usize = 3;
pub const B4: usize = 4;

/// `|⟨1s|z|2p₀⟩| / a = 128√2/243`.
pub fn ground_coupling() -> f64 {
    128.0 * libm::sqrt(2.0) / 243.0
}

/// `|⟨2s|z|2p₀⟩| / a = 3`.
pub const EXCITED_COUPLING: f64 = 3.0;

const STEP_TOL: f64 = 1e-10;
const MAX_NORM_DRIFT: f64 = 1e-6;
const MAX_REFINEMENTS: u32 = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseConvention {
    /// `T[b2, a]` carries the conjugate phase of `T[a, b2]`.
    #[default]
    Hermitian,
    /// Both off-diagonal ground-state entries carry `e^{−i(E_b−E_a)t}`.
    AsPrinted,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HydrogenModel {
    pub ground_energy: f64,
    /// `E_b − E_a`, positive.
    pub gap: f64,
    /// Coupling strength of the a–b2 channel.
    pub ground_coupling: f64,
    /// Coupling strength of the b1–b2 channel.
    pub excited_coupling: f64,
    pub convention: PhaseConvention,
}

impl Default for HydrogenModel {
    fn default() -> Self {
        Self {
            ground_energy: 0.0,
            gap: 1.0,
            ground_coupling: ground_coupling(),
            excited_coupling: EXCITED_COUPLING,
            convention: PhaseConvention::Hermitian,
        }
    }
}

impl HydrogenModel {
    pub fn drift(&self) -> Vec<f64> {
        let eb = self.ground_energy + self.gap;
        vec![self.ground_energy, eb, eb, eb, eb]
    }

    pub fn coupling(&self) -> CMatrix {
        let mut b = CMatrix::zeros(DIM, DIM);
        b[(GROUND, B2)] = C64::new(-self.ground_coupling, 0.0);
        b[(B2, GROUND)] = C64::new(-self.ground_coupling, 0.0);
        b[(B1, B2)] = C64::new(self.excited_coupling, 0.0);
        b[(B2, B1)] = C64::new(self.excited_coupling, 0.0);
        b
    }

    pub fn spec(&self) -> Result<SystemSpec> {
        SystemSpec::new(self.drift(), self.coupling())
    }

    fn couplings(&self) -> Vec<(usize, usize, f64, f64)> {
        let drift = self.drift();
        let b = self.coupling();
        let mut out = Vec::new();
        for i in 0..DIM {
            for j in 0..DIM {
                if b[(i, j)].norm() > 0.0 {
                    let nu = drift[i] - drift[j];
                    let nu = match self.convention {
                        PhaseConvention::Hermitian => nu,
                        PhaseConvention::AsPrinted => -nu.abs(),
                    };
                    out.push((i, j, b[(i, j)].re, nu));
                }
            }
        }
        out
    }

    /// Interaction-picture generator at time `t` for field value `field`.
    pub fn t_matrix(&self, field: f64, t: f64) -> CMatrix {
        let mut m = CMatrix::zeros(DIM, DIM);
        for (i, j, b, nu) in self.couplings() {
            m[(i, j)] = C64::new(0.0, -field * b) * C64::from_polar(1.0, nu * t);
        }
        m
    }
}

/// The default model as a [`SystemSpec`] (`E_a = 0`, `E_b = 1`).
pub fn hydrogen_spec() -> SystemSpec {
    HydrogenModel::default().spec().expect("hydrogen coupling is Hermitian")
}

fn derivative(couplings: &[(usize, usize, f64, f64)], field: f64, t: f64, c: &CVector) -> CVector {
    let mut out = CVector::zeros(DIM);
    for &(i, j, b, nu) in couplings {
        out[i] += C64::new(0.0, -field * b) * C64::from_polar(1.0, nu * t) * c[j];
    }
    out
}

fn rk4(couplings: &[(usize, usize, f64, f64)], pulse: &ControlPulse, initial: &CVector, h_max: f64) -> CVector {
    let mut c = initial.clone();
    let mut t0 = 0.0;
    for seg in pulse.segments() {
        let steps = libm::ceil(seg.duration / h_max).max(1.0) as u64;
        let h = seg.duration / steps as f64;
        let u = seg.value;
        for k in 0..steps {
            let t = t0 + k as f64 * h;
            let k1 = derivative(couplings, u, t, &c);
            let k2 = derivative(couplings, u, t + 0.5 * h, &(&c + k1.scale(0.5 * h)));
            let k3 = derivative(couplings, u, t + 0.5 * h, &(&c + k2.scale(0.5 * h)));
            let k4 = derivative(couplings, u, t + h, &(&c + k3.scale(h)));
            c += (k1 + k2.scale(2.0) + k3.scale(2.0) + k4).scale(h / 6.0);
        }
        t0 += seg.duration;
    }
    c
}

/// Integrates `dC/dt = T(t) C` with fourth-order Runge–Kutta, halving the
/// step until two successive resolutions agree to `1e-10`.
pub fn propagate_interaction_picture(
    model: &HydrogenModel,
    field: &ControlPulse,
    initial: &StateVector,
) -> Result<StateVector> {
    if initial.dim() != DIM {
        return Err(Error::DimensionMismatch { expected: DIM, found: initial.dim() });
    }
    let couplings = model.couplings();
    let peak_field = field.segments().iter().map(|s| s.value.abs()).fold(0.0, f64::max);
    let rate = (peak_field * model.ground_coupling.max(model.excited_coupling)).max(model.gap.abs()).max(1.0);
    let mut h = 0.1 / rate;

    let mut coarse = rk4(&couplings, field, initial.amplitudes(), h);
    let mut converged = None;
    for _ in 0..MAX_REFINEMENTS {
        h *= 0.5;
        let fine = rk4(&couplings, field, initial.amplitudes(), h);
        let diff = (&fine - &coarse).camax();
        coarse = fine;
        if diff <= STEP_TOL {
            converged = Some(coarse.clone());
            break;
        }
    }
    let drift = (coarse.norm() - initial.norm()).abs();
    match converged {
        Some(c) if drift <= MAX_NORM_DRIFT => StateVector::with_tolerance(c, 1e-8),
        _ => Err(Error::RefinementFailure { drift }),
    }
}

/// Which algorithm a preset exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseKind {
    /// Target reachable from one eigenstate; good set is that eigenstate.
    EigenstateTarget,
    /// Target inside a controllable subspace; good set is the subspace.
    Subspace,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CasePreset {
    pub name: &'static str,
    pub kind: CaseKind,
    pub initial: StateVector,
    pub good: GoodSubspace,
    pub phases: Phases,
    pub expected_iterations: u64,
    pub expected_success: f64,
}

/// Amplify `φ_b4` out of `0.7φ_a + 0.5φ_b1 + 0.3φ_b2 + 0.4φ_b3 + 0.1φ_b4`.
pub fn case1_preset() -> CasePreset {
    CasePreset {
        name: "hydrogen-case1",
        kind: CaseKind::EigenstateTarget,
        initial: StateVector::from_real(&[0.7, 0.5, 0.3, 0.4, 0.1]).expect("normalized"),
        good: GoodSubspace::single(B4, DIM).expect("valid index"),
        phases: Phases::STANDARD,
        expected_iterations: 7,
        expected_success: 0.9953,
    }
}

/// Amplify the coupled block `{φ_a, φ_b1, φ_b2}` out of
/// `0.1φ_a + 0.06φ_b1 + 0.08φ_b2 + 0.7φ_b3 + 0.7φ_b4`.
pub fn case2_preset() -> CasePreset {
    CasePreset {
        name: "hydrogen-case2",
        kind: CaseKind::Subspace,
        initial: StateVector::from_real(&[0.1, 0.06, 0.08, 0.7, 0.7]).expect("normalized"),
        good: GoodSubspace::new(vec![GROUND, B1, B2], DIM).expect("valid indices"),
        phases: Phases::STANDARD,
        expected_iterations: 5,
        expected_success: 0.9999,
    }
}
