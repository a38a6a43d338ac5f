//! Capacity bounds for the thermal noise channel under a mean photon number
//! constraint `N`, in bits per channel use.
//!
//! * lower bound: the coherent-state rate
//!   `γ = [g(λN + (1-λ)N_E) - g((1-λ)N_E)] / ln 2`;
//! * upper bound: splitting `E_{λ,N_E}` into an amplifier after a pure loss
//!   channel of transmissivity `λ/G` and using the pure loss capacity,
//!   `g(λN / ((1-λ)N_E + 1)) / ln 2`.
//!
//! Their difference is `Δ_Y(X)/ln 2` with `X = λN`, `Y = (1-λ)N_E`, which is
//! below `Y ln(1 + 1/Y)/ln 2 < 1/ln 2`. The true capacity lies somewhere in
//! the interval; [`BoundReport`] never reports a point estimate.

use crate::error::{domain, Error, Result};
use crate::gaussian::{decompose, ChannelParams};
use crate::gfunc::{delta_limit, delta_unchecked, g_unchecked};
use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;

/// Largest supported environment photon number.
pub const MAX_ENV_PHOTONS: f64 = 1e6;
/// Largest supported signal photon number.
pub const MAX_SIGNAL_PHOTONS: f64 = 1e9;
/// Absolute slack, in bits, for the report's certification checks.
pub const CERTIFICATION_TOLERANCE: f64 = 1e-10;

/// `1/ln 2`: the universal gap in bits.
pub const UNIVERSAL_GAP_BITS: f64 = 1.0 / LN_2;

fn validate(params: &ChannelParams, n: f64) -> Result<()> {
    if params.n_env() > MAX_ENV_PHOTONS {
        return Err(Error::InvalidChannel(format!(
            "environment photon number {} exceeds supported maximum {MAX_ENV_PHOTONS:e}",
            params.n_env()
        )));
    }
    validate_signal(n)
}

fn validate_signal(n: f64) -> Result<()> {
    if !n.is_finite() {
        return Err(domain("N", n, "must be finite"));
    }
    if n < 0.0 {
        return Err(domain("N", n, "must be nonnegative"));
    }
    if n > MAX_SIGNAL_PHOTONS {
        return Err(domain("N", n, "exceeds supported maximum 1e9"));
    }
    Ok(())
}

/// Coherent-state (Holevo) rate `γ(λ, N_E, N)` in bits.
pub fn holevo_lower(params: &ChannelParams, n: f64) -> Result<f64> {
    validate(params, n)?;
    if params.n_env() == 0.0 {
        return pure_loss_capacity(params.lambda(), n);
    }
    let y = params.injected_noise();
    let x = params.lambda() * n;
    Ok((g_unchecked(x + y) - g_unchecked(y)) / LN_2)
}

/// Additive-extension upper bound `g(λN / ((1-λ)N_E + 1)) / ln 2` in bits.
pub fn additive_extension_upper(params: &ChannelParams, n: f64) -> Result<f64> {
    validate(params, n)?;
    if params.n_env() == 0.0 {
        return pure_loss_capacity(params.lambda(), n);
    }
    let d = decompose(params);
    Ok(g_unchecked(d.pure_loss_lambda * n) / LN_2)
}

/// Capacity of the pure loss channel, `g(λN)/ln 2` bits.
pub fn pure_loss_capacity(lambda: f64, n: f64) -> Result<f64> {
    if !lambda.is_finite() || lambda <= 0.0 || lambda > 1.0 {
        return Err(domain("lambda", lambda, "must lie in (0, 1]"));
    }
    validate_signal(n)?;
    Ok(g_unchecked(lambda * n) / LN_2)
}

/// Upper minus lower bound, in bits.
pub fn gap(params: &ChannelParams, n: f64) -> Result<f64> {
    Ok(additive_extension_upper(params, n)? - holevo_lower(params, n)?)
}

/// The same gap evaluated directly as `Δ_Y(λN)/ln 2`, `Y = (1-λ)N_E`.
pub fn gap_via_delta(params: &ChannelParams, n: f64) -> Result<f64> {
    validate(params, n)?;
    let y = params.injected_noise();
    if y == 0.0 {
        return Ok(0.0);
    }
    Ok(delta_unchecked(y, params.lambda() * n) / LN_2)
}

/// `(1-λ)N_E ln(1 + 1/((1-λ)N_E)) / ln 2`, the `N`-independent gap bound.
/// Zero when there is no environment noise.
pub fn refined_gap_bound(params: &ChannelParams) -> Result<f64> {
    validate(params, 0.0)?;
    let y = params.injected_noise();
    if y == 0.0 {
        return Ok(0.0);
    }
    Ok(delta_limit(y)? / LN_2)
}

/// Both bounds and the gap certificates for one `(λ, N_E, N)` triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub lambda: f64,
    pub n_env: f64,
    pub n_signal: f64,
    pub lower_bits: f64,
    pub upper_bits: f64,
    pub gap_bits: f64,
    pub refined_gap_bound_bits: f64,
    pub universal_gap_bound_bits: f64,
    pub certified: bool,
}

impl BoundReport {
    /// Re-evaluates the ordering `0 ≤ gap ≤ refined ≤ 1/ln 2`, `lower ≤ upper`.
    pub fn invariants_hold(&self) -> bool {
        let tol = CERTIFICATION_TOLERANCE;
        let finite = [
            self.lower_bits,
            self.upper_bits,
            self.gap_bits,
            self.refined_gap_bound_bits,
        ]
        .iter()
        .all(|v| v.is_finite());
        finite
            && self.lower_bits >= -tol
            && self.lower_bits <= self.upper_bits + tol
            && (self.gap_bits - (self.upper_bits - self.lower_bits)).abs() <= tol
            && self.gap_bits >= -tol
            && self.gap_bits <= self.refined_gap_bound_bits + tol
            && self.refined_gap_bound_bits <= self.universal_gap_bound_bits + tol
    }
}

pub fn report(params: &ChannelParams, n: f64) -> Result<BoundReport> {
    let lower_bits = holevo_lower(params, n)?;
    let upper_bits = additive_extension_upper(params, n)?;
    let mut r = BoundReport {
        lambda: params.lambda(),
        n_env: params.n_env(),
        n_signal: n,
        lower_bits,
        upper_bits,
        gap_bits: upper_bits - lower_bits,
        refined_gap_bound_bits: refined_gap_bound(params)?,
        universal_gap_bound_bits: UNIVERSAL_GAP_BITS,
        certified: false,
    };
    r.certified = r.invariants_hold();
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ch(lambda: f64, n_env: f64) -> ChannelParams {
        ChannelParams::new(lambda, n_env).unwrap()
    }

    // 60-digit mpmath evaluations.
    const G2_BITS: f64 = 2.754887502163468544361217;
    const LOWER_HALF_ONE_TEN: f64 = 2.648540514330229861302177;
    const UPPER_HALF_ONE_TEN: f64 = 3.377182628265702020698051;
    const GAP_HALF_ONE_TEN: f64 = 0.728642113935472159395874;
    const REFINED_HALF_ONE: f64 = 0.7924812503605780907268695;

    #[test]
    fn holevo_lower_examples() {
        assert_relative_eq!(holevo_lower(&ch(0.5, 0.0), 4.0).unwrap(), G2_BITS, max_relative = 1e-13);
        assert_eq!(holevo_lower(&ch(0.3, 2.0), 0.0).unwrap(), 0.0);
        assert_relative_eq!(
            holevo_lower(&ch(0.5, 1.0), 10.0).unwrap(),
            LOWER_HALF_ONE_TEN,
            max_relative = 1e-13
        );
    }

    #[test]
    fn upper_bound_examples() {
        let pl = ch(0.5, 0.0);
        assert_eq!(additive_extension_upper(&pl, 4.0).unwrap(), holevo_lower(&pl, 4.0).unwrap());
        assert_relative_eq!(
            additive_extension_upper(&ch(0.5, 1.0), 10.0).unwrap(),
            UPPER_HALF_ONE_TEN,
            max_relative = 1e-13
        );
        assert_eq!(additive_extension_upper(&ch(0.2, 9.0), 0.0).unwrap(), 0.0);
    }

    #[test]
    fn pure_loss_examples() {
        assert_relative_eq!(pure_loss_capacity(1.0, 1.0).unwrap(), 2.0, max_relative = 1e-15);
        assert_eq!(pure_loss_capacity(0.4, 0.0).unwrap(), 0.0);
        assert_relative_eq!(pure_loss_capacity(0.25, 4.0).unwrap(), 2.0, max_relative = 1e-15);
        assert!(pure_loss_capacity(0.0, 1.0).is_err());
        assert!(pure_loss_capacity(1.5, 1.0).is_err());
        assert!(pure_loss_capacity(0.5, -1.0).is_err());
    }

    #[test]
    fn gap_examples() {
        assert_eq!(gap(&ch(0.4, 0.0), 7.0).unwrap(), 0.0);
        let c = ch(0.5, 1.0);
        assert_relative_eq!(gap(&c, 10.0).unwrap(), GAP_HALF_ONE_TEN, max_relative = 1e-12);
        assert!((gap(&c, 10.0).unwrap() - gap_via_delta(&c, 10.0).unwrap()).abs() <= 1e-10);
        assert!(gap(&ch(0.01, 1e6), 1e9).unwrap() < 1.4426950);
    }

    #[test]
    fn refined_gap_bound_examples() {
        assert_relative_eq!(refined_gap_bound(&ch(0.5, 2.0)).unwrap(), 1.0, max_relative = 1e-15);
        assert_relative_eq!(refined_gap_bound(&ch(0.5, 1.0)).unwrap(), REFINED_HALF_ONE, max_relative = 1e-13);
        assert_eq!(refined_gap_bound(&ch(0.5, 0.0)).unwrap(), 0.0);
        let hot = refined_gap_bound(&ch(0.5, 1e6)).unwrap();
        assert!(hot < UNIVERSAL_GAP_BITS && UNIVERSAL_GAP_BITS - hot < 1e-5);
    }

    #[test]
    fn report_examples() {
        let r = report(&ch(0.5, 1.0), 10.0).unwrap();
        assert!(r.certified);
        assert_relative_eq!(r.lower_bits, LOWER_HALF_ONE_TEN, max_relative = 1e-13);
        assert_relative_eq!(r.upper_bits, UPPER_HALF_ONE_TEN, max_relative = 1e-13);
        assert!(r.gap_bits < r.refined_gap_bound_bits);
        assert!(r.refined_gap_bound_bits < r.universal_gap_bound_bits);

        let r = report(&ch(0.7, 0.0), 5.0).unwrap();
        assert!(r.certified);
        assert_eq!(r.lower_bits, r.upper_bits);
        assert_eq!(r.gap_bits, 0.0);
        assert_relative_eq!(r.lower_bits, 3.438920279288791257036758, max_relative = 1e-13);

        let r = report(&ch(0.9, 10.0), 100.0).unwrap();
        assert!(r.certified);
        assert_relative_eq!(r.lower_bits, 5.958387699163823877732479, max_relative = 1e-12);
        assert_relative_eq!(r.upper_bits, 6.95046064378723014052994, max_relative = 1e-12);
        assert_relative_eq!(r.gap_bits, 0.9920729446234062627974609, max_relative = 1e-11);
        assert_relative_eq!(r.refined_gap_bound_bits, 1.0, max_relative = 1e-13);
    }

    #[test]
    fn tampered_report_is_not_certified() {
        let mut r = report(&ch(0.5, 1.0), 10.0).unwrap();
        r.gap_bits = r.refined_gap_bound_bits + 1e-6;
        assert!(!r.invariants_hold());
    }

    #[test]
    fn validation_range() {
        assert!(holevo_lower(&ch(0.5, 2e6), 1.0).is_err());
        assert!(holevo_lower(&ch(0.5, 1.0), 2e9).is_err());
        assert!(holevo_lower(&ch(0.5, 1.0), -1.0).is_err());
        assert!(report(&ch(0.5, 1.0), f64::NAN).is_err());
    }
}
