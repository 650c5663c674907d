//! Best rational approximation under a denominator bound.

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Approximation {
    pub numer: i64,
    pub denom: u64,
    /// `|x − numer/denom|`.
    pub error: f64,
}

impl Approximation {
    fn new(x: f64, numer: f64, denom: f64) -> Self {
        Self { numer: numer as i64, denom: denom as u64, error: (x - numer / denom).abs() }
    }
}

/// The fraction `p/q` with `q ≤ max_denominator` closest to `x`.
///
/// Walks the continued-fraction expansion of `x`; once the next convergent
/// would exceed the bound, the best semiconvergent is compared against the
/// last convergent.
pub fn best_rational(x: f64, max_denominator: u64) -> Result<Approximation> {
    if max_denominator == 0 {
        return Err(Error::InvalidMaxDenominator);
    }
    if !x.is_finite() {
        return Err(Error::NonFinite("ratio"));
    }
    let bound = max_denominator as f64;
    // (p0, q0) = convergent k-2, (p1, q1) = convergent k-1.
    let (mut p0, mut q0, mut p1, mut q1) = (0.0f64, 1.0f64, 1.0f64, 0.0f64);
    let mut r = x;
    loop {
        let a = libm::floor(r);
        let q2 = a * q1 + q0;
        if q2 > bound {
            let k = libm::floor((bound - q0) / q1);
            let semi = Approximation::new(x, p0 + k * p1, q0 + k * q1);
            let conv = Approximation::new(x, p1, q1);
            return Ok(if semi.error < conv.error { semi } else { conv });
        }
        let p2 = a * p1 + p0;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = r - a;
        if frac <= 0.0 || p1 / q1 == x {
            return Ok(Approximation::new(x, p1, q1));
        }
        r = 1.0 / frac;
    }
}

/// Whether `x` lies within `tol` of a fraction with denominator at most
/// `max_denominator`.
pub fn is_rational_within(x: f64, max_denominator: u64, tol: f64) -> Result<bool> {
    Ok(best_rational(x, max_denominator)?.error <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_force(x: f64, max_den: u64) -> f64 {
        (1..=max_den)
            .map(|q| {
                let p = (x * q as f64).round();
                (x - p / q as f64).abs()
            })
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn integers_and_simple_fractions() {
        let a = best_rational(3.0, 10).unwrap();
        assert_eq!((a.numer, a.denom), (3, 1));
        let a = best_rational(0.4, 10).unwrap();
        assert_eq!((a.numer, a.denom), (2, 5));
        let a = best_rational(-2.5, 10).unwrap();
        assert_eq!((a.numer, a.denom), (-5, 2));
        assert_eq!(best_rational(0.0, 5).unwrap().error, 0.0);
    }

    #[test]
    fn pi_convergents() {
        let a = best_rational(core::f64::consts::PI, 10).unwrap();
        assert_eq!((a.numer, a.denom), (22, 7));
        let a = best_rational(core::f64::consts::PI, 200).unwrap();
        assert_eq!((a.numer, a.denom), (355, 113));
    }

    #[test]
    fn sqrt_two_is_not_rational_at_default_knobs() {
        let x = core::f64::consts::SQRT_2;
        let a = best_rational(x, 10_000).unwrap();
        assert_eq!((a.numer, a.denom), (8119, 5741));
        assert!((a.error - brute_force(x, 10_000)).abs() < 1e-15);
        assert!(!is_rational_within(x, 10_000, 1e-9).unwrap());
    }

    #[test]
    fn zero_bound_is_rejected() {
        assert_eq!(best_rational(0.5, 0).unwrap_err(), Error::InvalidMaxDenominator);
    }

    proptest! {
        #[test]
        fn matches_brute_force(x in -20.0f64..20.0, max_den in 1u64..400) {
            let a = best_rational(x, max_den).unwrap();
            prop_assert!(a.denom <= max_den && a.denom >= 1);
            prop_assert!((a.error - brute_force(x, max_den)).abs() <= 1e-12);
        }
    }
}
