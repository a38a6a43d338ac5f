//! The thermal entropy function `g(x) = (x+1) ln(x+1) - x ln x` and the gap
//! function `Δ_Y(X) = g(X/(Y+1)) - g(X+Y) + g(Y)` together with their
//! derivatives.
//!
//! Everything here is in nats. `g(x)` is the von Neumann entropy of a thermal
//! state with mean photon number `x`; `Δ_Y(X)` is the difference between the
//! additive-extension upper bound and the coherent-state rate when `X = λN`
//! and `Y = (1-λ)N_E`.
//!
//! `g` is evaluated as `x ln(1 + 1/x) + ln(1 + x)` with `ln_1p`, which keeps
//! full relative precision at both ends of `[1e-12, 1e12]`. The textbook form
//! cancels two numbers of size `x ln x` for large `x`.

use crate::error::{domain, Error, Result};
use serde::{Deserialize, Serialize};

/// Below this the continuous extension `g(0) = 0` is returned.
const G_ZERO_CUTOFF: f64 = 1e-300;

/// A validated mean photon number: finite and nonnegative.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct PhotonNumber(f64);

impl PhotonNumber {
    pub const ZERO: PhotonNumber = PhotonNumber(0.0);

    pub fn new(value: f64) -> Result<Self> {
        check_nonnegative("photon number", value)?;
        Ok(PhotonNumber(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for PhotonNumber {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        PhotonNumber::new(value)
    }
}

impl From<PhotonNumber> for f64 {
    fn from(n: PhotonNumber) -> f64 {
        n.0
    }
}

fn check_nonnegative(name: &'static str, x: f64) -> Result<()> {
    if x.is_nan() {
        return Err(domain(name, x, "NaN"));
    }
    if !x.is_finite() {
        return Err(domain(name, x, "must be finite"));
    }
    if x < 0.0 {
        return Err(domain(name, x, "must be nonnegative"));
    }
    Ok(())
}

fn check_positive(name: &'static str, x: f64) -> Result<()> {
    check_nonnegative(name, x)?;
    if x == 0.0 {
        return Err(domain(name, x, "must be strictly positive"));
    }
    Ok(())
}

/// `g` without argument checks. Callers guarantee `x >= 0` and finite.
#[inline]
pub(crate) fn g_unchecked(x: f64) -> f64 {
    if x < G_ZERO_CUTOFF {
        return 0.0;
    }
    x * (1.0 / x).ln_1p() + x.ln_1p()
}

#[inline]
pub(crate) fn delta_unchecked(y: f64, x: f64) -> f64 {
    g_unchecked(x / (y + 1.0)) - g_unchecked(x + y) + g_unchecked(y)
}

/// `g(x) = (x+1) ln(x+1) - x ln x` in nats, with `g(0) = 0`.
pub fn g(x: f64) -> Result<f64> {
    check_nonnegative("x", x)?;
    Ok(g_unchecked(x))
}

/// `g'(x) = ln(1 + 1/x)`.
pub fn g_prime(x: f64) -> Result<f64> {
    check_positive("x", x)?;
    Ok((1.0 / x).ln_1p())
}

/// `g''(x) = -1 / (x (x + 1))`.
pub fn g_second(x: f64) -> Result<f64> {
    check_positive("x", x)?;
    Ok(-1.0 / (x * (x + 1.0)))
}

/// `Δ_Y(X) = g(X/(Y+1)) - g(X+Y) + g(Y)`.
///
/// Nonnegative, increasing in `X`, and bounded above by [`delta_limit`]`(Y) < 1`.
pub fn delta(y: f64, x: f64) -> Result<f64> {
    check_positive("Y", y)?;
    check_nonnegative("X", x)?;
    Ok(delta_unchecked(y, x))
}

/// `Δ'_Y(X) = ln(1 + (Y+1)/X)/(Y+1) - ln(1 + 1/(X+Y))`.
pub fn delta_prime(y: f64, x: f64) -> Result<f64> {
    check_positive("Y", y)?;
    check_positive("X", x)?;
    Ok(((y + 1.0) / x).ln_1p() / (y + 1.0) - (1.0 / (x + y)).ln_1p())
}

/// `Δ''_Y(X) = (1/(X+Y) - 1/X) / (X+Y+1)`.
pub fn delta_second(y: f64, x: f64) -> Result<f64> {
    check_positive("Y", y)?;
    check_positive("X", x)?;
    // 1/(X+Y) - 1/X = -Y / (X (X+Y)), written without the cancellation
    Ok(-y / (x * (x + y) * (x + y + 1.0)))
}

/// `lim_{X→∞} Δ_Y(X) = Y ln(1 + 1/Y)`, which lies in `(0, 1)`.
pub fn delta_limit(y: f64) -> Result<f64> {
    check_positive("Y", y)?;
    Ok(y * (1.0 / y).ln_1p())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::LN_2;

    // 60-digit mpmath evaluations of (x+1)ln(x+1) - x ln x.
    const G_REFERENCE: &[(f64, f64)] = &[
        (1e-12, 2.86310211159290482082159e-11),
        (1e-9, 2.172326583744641115599526e-8),
        (1e-6, 1.481551105796410743752462e-5),
        (1e-3, 7.908255112398753752030183e-3),
        (0.37, 0.7991640547180767215296322),
        (1.0, 1.386294361119890618834464),
        (3.7, 2.432712358259599229878523),
        (10.0, 3.350997070841619144501465),
        (123.4, 5.81947207439496616358442),
        (1e6, 14.81551105796410743752462),
        (1e9, 21.72326583744641115599526),
        (1e12, 28.6310211159290482082159),
    ];

    #[test]
    fn g_matches_high_precision_reference() {
        for &(x, expected) in G_REFERENCE {
            let got = g(x).unwrap();
            assert!(
                ((got - expected) / expected).abs() <= 1e-13,
                "g({x}) = {got}, expected {expected}"
            );
        }
    }

    #[test]
    fn g_examples() {
        assert_eq!(g(0.0).unwrap(), 0.0);
        assert_relative_eq!(g(1.0).unwrap(), 2.0 * LN_2, max_relative = 1e-15);
        assert_relative_eq!(g(10.0).unwrap(), 3.3509971, epsilon = 1e-7);
        assert_eq!(g(1e-301).unwrap(), 0.0);
    }

    #[test]
    fn g_rejects_bad_arguments() {
        assert!(g(-1e-9).is_err());
        assert!(g(f64::NAN).is_err());
        assert!(g(f64::INFINITY).is_err());
        assert!(matches!(g(-1.0), Err(Error::Domain { name: "x", .. })));
    }

    #[test]
    fn first_and_second_derivative_examples() {
        assert_relative_eq!(g_prime(1.0).unwrap(), LN_2, max_relative = 1e-15);
        assert_relative_eq!(g_prime(0.5).unwrap(), 3f64.ln(), max_relative = 1e-15);
        assert!(g_prime(1e15).unwrap() < 1e-14);
        assert!(g_prime(0.0).is_err());
        assert!(g_prime(-2.0).is_err());

        assert_relative_eq!(g_second(1.0).unwrap(), -0.5, max_relative = 1e-15);
        assert_relative_eq!(g_second(0.5).unwrap(), -4.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(g_second(10.0).unwrap(), -1.0 / 110.0, max_relative = 1e-15);
        assert!(g_second(0.0).is_err());
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta(1.0, 0.0).unwrap(), 0.0);
        assert_relative_eq!(
            delta(1.0, 1.0).unwrap(),
            0.4315231086776713911588285,
            max_relative = 1e-13
        );
        assert!((delta(1.0, 1e9).unwrap() - LN_2).abs() < 1e-8);
        assert!(delta(0.0, 1.0).is_err());
        assert!(delta(1.0, -1.0).is_err());
    }

    #[test]
    fn delta_prime_examples() {
        assert_relative_eq!(
            delta_prime(1.0, 1.0).unwrap(),
            0.1438410362258904637196095,
            max_relative = 1e-13
        );
        for y in [0.1, 1.0, 10.0] {
            for x in [0.1, 1.0, 10.0, 100.0] {
                assert!(delta_prime(y, x).unwrap() > 0.0);
            }
        }
        let far = delta_prime(1.0, 1e9).unwrap();
        assert!(far > 0.0 && far < 1e-8);
        assert!(delta_prime(1.0, 0.0).is_err());
    }

    #[test]
    fn delta_second_examples() {
        assert_relative_eq!(delta_second(1.0, 1.0).unwrap(), -1.0 / 6.0, max_relative = 1e-15);
        assert_relative_eq!(delta_second(2.0, 1.0).unwrap(), -1.0 / 6.0, max_relative = 1e-15);
        for y in [0.1, 1.0, 10.0] {
            for x in [0.1, 1.0, 10.0, 100.0] {
                assert!(delta_second(y, x).unwrap() < 0.0);
            }
        }
    }

    #[test]
    fn delta_limit_examples() {
        assert_relative_eq!(delta_limit(1.0).unwrap(), LN_2, max_relative = 1e-15);
        assert_relative_eq!(delta_limit(0.5).unwrap(), 0.5 * 3f64.ln(), max_relative = 1e-15);
        let big = delta_limit(1e8).unwrap();
        assert!(big < 1.0 && 1.0 - big < 1e-8);
        assert!(delta_limit(0.0).is_err());
    }

    #[test]
    fn photon_number_validation() {
        assert!(PhotonNumber::new(-0.1).is_err());
        assert!(PhotonNumber::new(f64::NAN).is_err());
        assert_eq!(PhotonNumber::new(2.5).unwrap().value(), 2.5);
        let parsed: std::result::Result<PhotonNumber, _> = serde_json::from_str("-1.0");
        assert!(parsed.is_err());
    }
}
