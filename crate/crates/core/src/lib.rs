//! Incoherent control of locally controllable finite-level quantum systems.
//!
//! The crate covers the full pipeline of the scheme: a state is amplified
//! toward a "good" set of drift eigenstates by iterating an amplitude
//! amplification operator, a projective measurement collapses it (with high
//! probability) into that set, and a user supplied coherent pulse carries
//! the collapsed state on to the target. Alongside the pipeline sit the
//! graph-based controllability criteria used to pick the good set, and a
//! built-in five-level hydrogen model.
//!
//! Basis indices are zero-based throughout this crate.
//!
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod algorithms;
pub mod amplification;
pub mod controllability;
pub mod error;
pub mod hydrogen;
pub mod measurement;
pub mod operator;
pub mod propagate;
pub mod rational;
pub mod state;
pub mod system;

pub use error::{Error, Result};
pub use operator::UnitaryOperator;
pub use propagate::{ControlPulse, PulseSegment};
pub use state::StateVector;
pub use system::SystemSpec;

/// Complex scalar used for amplitudes and matrix entries.
pub type C64 = num_complex::Complex64;

/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;

/// Dense complex column vector.
pub type CVector = nalgebra::DVector<C64>;

/// Tolerance on `U†U = I` for anything accepted as a unitary.
pub const UNITARITY_TOL: f64 = 1e-10;
/// Tolerance on the norm of user supplied states.
pub const NORM_TOL: f64 = 1e-10;
/// Tolerance on the norm of propagated states.
pub const PROPAGATED_NORM_TOL: f64 = 1e-9;
/// Tolerance on `B = B†`.
pub const HERMITICITY_TOL: f64 = 1e-12;
