//! Self-verification suites behind `thermal-capacity verify`.
//!
//! Every check reports its largest discrepancy against a tolerance and the
//! invariant it guards, so a failure names what broke. The `g`-family
//! kernels are injectable: a build with a broken `g` can be simulated by
//! passing altered [`Kernels`], which is how the fault-injection test works.

use crate::bounds::{self, CERTIFICATION_TOLERANCE, UNIVERSAL_GAP_BITS};
use crate::error::Result;
use crate::fock::holevo::gaussian_chi_report;
use crate::fock::moments::{verify_decomposition_fock, MOMENT_TOLERANCE};
use crate::fock::quadrature::GaussianGrid;
use crate::fock::state::{coherent_state, displaced_diagonal_state, thermal_state, TruncationBudget};
use crate::fock::{entropy::von_neumann_entropy, ChannelConfig};
use crate::gaussian::{
    apply_thermal, decompose, mean_photons, random_channel, random_physical_covariance, ChannelParams,
};
use crate::gfunc;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    /// Closed-form suites: `g` family, Gaussian maps, bound ordering.
    Quick,
    /// Quick plus the Fock-space oracle.
    Full,
}

impl FromStr for Level {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "quick" => Ok(Level::Quick),
            "full" => Ok(Level::Full),
            other => Err(format!("unknown level '{other}' (expected quick or full)")),
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::Quick => "quick",
            Level::Full => "full",
        })
    }
}

/// The `g`-family functions under test, all in nats.
#[derive(Clone, Copy)]
pub struct Kernels {
    pub g: fn(f64) -> f64,
    pub g_prime: fn(f64) -> f64,
    pub g_second: fn(f64) -> f64,
    pub delta: fn(f64, f64) -> f64,
    pub delta_prime: fn(f64, f64) -> f64,
    pub delta_second: fn(f64, f64) -> f64,
    pub delta_limit: fn(f64) -> f64,
}

impl Default for Kernels {
    fn default() -> Self {
        Kernels {
            g: |x| gfunc::g(x).unwrap_or(f64::NAN),
            g_prime: |x| gfunc::g_prime(x).unwrap_or(f64::NAN),
            g_second: |x| gfunc::g_second(x).unwrap_or(f64::NAN),
            delta: |y, x| gfunc::delta(y, x).unwrap_or(f64::NAN),
            delta_prime: |y, x| gfunc::delta_prime(y, x).unwrap_or(f64::NAN),
            delta_second: |y, x| gfunc::delta_second(y, x).unwrap_or(f64::NAN),
            delta_limit: |y| gfunc::delta_limit(y).unwrap_or(f64::NAN),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub suite: String,
    pub invariant: String,
    pub max_discrepancy: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn new(suite: &str, invariant: &str, max_discrepancy: f64, tolerance: f64) -> Self {
        Check {
            suite: suite.into(),
            invariant: invariant.into(),
            max_discrepancy,
            tolerance,
            // NaN discrepancies fail
            passed: max_discrepancy <= tolerance,
        }
    }

    /// For sign and ordering properties: `violation` is the largest amount
    /// by which the property fails, `strict_failures` counts ties.
    fn property(suite: &str, invariant: &str, violation: f64, strict_failures: usize) -> Self {
        let mut c = Check::new(suite, invariant, violation, 0.0);
        c.passed &= strict_failures == 0;
        c
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub level: Level,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Runs the suites for `level` with the library's own kernels.
pub fn run(level: Level, seed: u64) -> Result<VerificationReport> {
    run_with(level, seed, &Kernels::default())
}

pub fn run_with(level: Level, seed: u64, kernels: &Kernels) -> Result<VerificationReport> {
    let mut checks = gfunc_suite(kernels);
    checks.extend(gaussian_suite(seed)?);
    checks.extend(bounds_suite(seed, kernels)?);
    if level == Level::Full {
        checks.extend(fock_suite(seed, kernels)?);
    }
    Ok(VerificationReport { level, seed, checks })
}

/// 60-digit evaluations of `(x+1)ln(x+1) - x ln x`.
const G_REFERENCE: &[(f64, f64)] = &[
    (1e-9, 2.172326583744641115599526e-8),
    (1e-3, 7.908255112398753752030183e-3),
    (0.37, 0.7991640547180767215296322),
    (1.0, 1.386294361119890618834464),
    (10.0, 3.350997070841619144501465),
    (1e6, 14.81551105796410743752462),
    (1e12, 28.6310211159290482082159),
];

/// `n` log-spaced points from `lo` to `hi`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Finite-difference step `1e-5·max(1, x)`.
pub fn fd_step(x: f64) -> f64 {
    1e-5 * x.max(1.0)
}

/// Centered difference of `f` at `x`, compared with `analytic` against
/// `1e-6·max(1, |analytic|)`; returns the normalized discrepancy.
pub fn fd_discrepancy(f: impl Fn(f64) -> f64, analytic: f64, x: f64) -> f64 {
    let h = fd_step(x);
    let numeric = (f(x + h) - f(x - h)) / (2.0 * h);
    (numeric - analytic).abs() / analytic.abs().max(1.0)
}

const FD_TOLERANCE: f64 = 1e-6;

fn gfunc_suite(k: &Kernels) -> Vec<Check> {
    let suite = "gfunc";
    let mut out = Vec::new();

    let reference = G_REFERENCE
        .iter()
        .map(|&(x, v)| ((k.g)(x) - v).abs() / v)
        .fold(0.0, nan_max);
    out.push(Check::new(suite, "g matches high-precision reference values", reference, 1e-13));

    let grid = log_grid(1e-9, 1e9, 400);
    let mut violation: f64 = 0.0;
    let mut ties = 0;
    for w in grid.windows(2) {
        let (a, b) = ((k.g)(w[0]), (k.g)(w[1]));
        violation = nan_max(violation, (-a).max(0.0));
        violation = nan_max(violation, (a - b).max(0.0));
        let mid = (k.g)(0.5 * (w[0] + w[1]));
        violation = nan_max(violation, (0.5 * (a + b) - mid).max(0.0));
        ties += usize::from(a <= 0.0 || b <= a);
    }
    out.push(Check::property(suite, "g is positive, increasing and concave", violation, ties));

    let xs = log_grid(0.01, 100.0, 200);
    let ys = [0.1, 1.0, 10.0];
    let worst = |f: &dyn Fn(f64) -> f64| xs.iter().map(|&x| f(x)).fold(0.0, nan_max);
    out.push(Check::new(
        suite,
        "g' matches centered differences of g",
        worst(&|x| fd_discrepancy(k.g, (k.g_prime)(x), x)),
        FD_TOLERANCE,
    ));
    out.push(Check::new(
        suite,
        "g'' matches centered differences of g'",
        worst(&|x| fd_discrepancy(k.g_prime, (k.g_second)(x), x)),
        FD_TOLERANCE,
    ));
    let mut d1: f64 = 0.0;
    let mut d2: f64 = 0.0;
    for &y in &ys {
        d1 = nan_max(d1, worst(&|x| fd_discrepancy(|t| (k.delta)(y, t), (k.delta_prime)(y, x), x)));
        d2 = nan_max(d2, worst(&|x| fd_discrepancy(|t| (k.delta_prime)(y, t), (k.delta_second)(y, x), x)));
    }
    out.push(Check::new(suite, "Δ' matches centered differences of Δ", d1, FD_TOLERANCE));
    out.push(Check::new(suite, "Δ'' matches centered differences of Δ'", d2, FD_TOLERANCE));

    let xs = log_grid(1e-3, 1e6, 200);
    let ys = log_grid(1e-3, 1e3, 13);
    let mut bound_violation: f64 = 0.0;
    let mut bound_ties = 0;
    let mut mono_violation: f64 = 0.0;
    let mut mono_ties = 0;
    for &y in &ys {
        let limit = (k.delta_limit)(y);
        bound_violation = nan_max(bound_violation, (limit - 1.0).max(0.0));
        bound_ties += usize::from(!(limit < 1.0));
        let mut prev: Option<(f64, f64)> = None;
        for &x in &xs {
            let (d, dp, dpp) = ((k.delta)(y, x), (k.delta_prime)(y, x), (k.delta_second)(y, x));
            bound_violation = nan_max(bound_violation, (-d).max(0.0).max(d - limit));
            bound_ties += usize::from(!(d >= 0.0 && d < limit));
            mono_violation = nan_max(mono_violation, (-dp).max(0.0).max(dpp));
            mono_ties += usize::from(!(dp > 0.0 && dpp < 0.0));
            if let Some((pd, pdp)) = prev {
                mono_violation = nan_max(mono_violation, (pd - d).max(0.0).max(dp - pdp));
                mono_ties += usize::from(!(d > pd && dp < pdp));
            }
            prev = Some((d, dp));
        }
    }
    out.push(Check::property(suite, "0 ≤ Δ_Y(X) < Y ln(1+1/Y) < 1", bound_violation, bound_ties));
    out.push(Check::property(
        suite,
        "Δ increasing and Δ' decreasing in X (Δ' > 0, Δ'' < 0)",
        mono_violation,
        mono_ties,
    ));
    out
}

fn gaussian_suite(seed: u64) -> Result<Vec<Check>> {
    let suite = "gaussian";
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut decomposition: f64 = 0.0;
    let mut photons: f64 = 0.0;
    for _ in 0..1000 {
        let gamma = random_physical_covariance(&mut rng);
        let ch = random_channel(&mut rng, 50.0);
        let direct = apply_thermal(&ch, &gamma)?;
        let composed = decompose(&ch).apply(&gamma)?;
        decomposition = nan_max(decomposition, direct.max_abs_diff(&composed));
        let n_in = mean_photons(&gamma)?.value();
        let expected = ch.lambda() * n_in + ch.injected_noise();
        photons = nan_max(photons, (mean_photons(&direct)?.value() - expected).abs());
    }
    Ok(vec![
        Check::new(suite, "thermal channel equals amplifier after pure loss", decomposition, 1e-12),
        Check::new(suite, "output photons equal λN + (1-λ)N_E", photons, 1e-12),
    ])
}

/// Seeded triples `λ ∈ (0,1)`, `N_E ∈ (0,50]`, `N ∈ (0,100]`.
pub fn random_triples(seed: u64, count: usize) -> Vec<(f64, f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let lambda = loop {
                let l: f64 = rng.gen();
                if l > 0.0 {
                    break l;
                }
            };
            let n_env = 50.0 * (1.0 - rng.gen::<f64>());
            let n = 100.0 * (1.0 - rng.gen::<f64>());
            (lambda, n_env, n)
        })
        .collect()
}

fn bounds_suite(seed: u64, k: &Kernels) -> Result<Vec<Check>> {
    let suite = "bounds";
    let tol = CERTIFICATION_TOLERANCE;
    let mut order: f64 = 0.0;
    let mut agreement: f64 = 0.0;
    let mut gap_delta: f64 = 0.0;
    let mut uncertified = 0;
    for (lambda, n_env, n) in random_triples(seed, 10_000) {
        let ch = ChannelParams::new(lambda, n_env)?;
        let y = ch.injected_noise();
        let lower = ((k.g)(lambda * n + y) - (k.g)(y)) / LN_2;
        let upper = (k.g)(decompose(&ch).pure_loss_lambda * n) / LN_2;
        let gap = upper - lower;
        let refined = (k.delta_limit)(y) / LN_2;
        order = nan_max(order, (-gap).max(gap - refined).max(refined - UNIVERSAL_GAP_BITS).max(0.0));
        gap_delta = nan_max(gap_delta, (gap - (k.delta)(y, lambda * n) / LN_2).abs());
        let rep = bounds::report(&ch, n)?;
        uncertified += usize::from(!rep.certified);
        agreement = nan_max(
            agreement,
            (rep.lower_bits - lower).abs().max((rep.upper_bits - upper).abs()),
        );
    }
    let mut certified = Check::new(suite, "every report is certified", uncertified as f64, 0.0);
    certified.passed = uncertified == 0;
    Ok(vec![
        Check::new(suite, "0 ≤ upper - lower ≤ refined bound ≤ 1/ln 2", order, tol),
        Check::new(suite, "gap equals Δ_Y(λN)/ln 2", gap_delta, tol),
        Check::new(suite, "library bounds agree with the kernels", agreement, tol),
        certified,
    ])
}

fn fock_suite(seed: u64, k: &Kernels) -> Result<Vec<Check>> {
    let suite = "fock";
    let mut out = Vec::new();

    let mut entropy: f64 = 0.0;
    for n in [0.5, 1.0, 2.0] {
        let dim = TruncationBudget::thermal(n, 1e-12)?.dim;
        let s = von_neumann_entropy(&thermal_state(n, dim)?)?;
        entropy = nan_max(entropy, (s - (k.g)(n)).abs());
    }
    out.push(Check::new(suite, "thermal-state entropy equals g(N)", entropy, 1e-8));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut moments: f64 = 0.0;
    for _ in 0..6 {
        let ch = ChannelParams::new(1.0 - rng.gen_range(0.0..0.95), rng.gen_range(0.0..2.0))?;
        let alpha = Complex64::from_polar(rng.gen_range(0.0..1.5), rng.gen_range(0.0..6.3));
        let dim = 40;
        let states = vec![
            coherent_state(alpha, dim)?,
            thermal_state(rng.gen_range(0.1..1.0), dim)?,
            displaced_diagonal_state(alpha * 0.5, &[0.6, 0.3, 0.1], dim)?,
        ];
        let check = verify_decomposition_fock(&ch, &states)?;
        moments = nan_max(moments, check.max_discrepancy);
    }
    out.push(Check::new(
        suite,
        "simulated channel moments match the decomposition",
        moments,
        MOMENT_TOLERANCE,
    ));

    let ch = ChannelParams::new(0.6, 0.5)?;
    let n = 2.0;
    let rep = gaussian_chi_report(&ch, n, &GaussianGrid::default(), None, ChannelConfig::default())?;
    let lower = ((k.g)(0.6 * n + ch.injected_noise()) - (k.g)(ch.injected_noise())) / LN_2;
    out.push(Check::new(
        suite,
        "Gaussian coherent ensemble χ equals the coherent rate",
        (rep.chi_bits - lower).abs(),
        1e-3,
    ));
    out.push(Check::new(
        suite,
        "coherent output entropy is independent of α",
        rep.output_entropy_spread((k.g)(ch.injected_noise())),
        1e-6,
    ));
    Ok(out)
}

/// `max` that propagates NaN.
fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_passes() {
        let rep = run(Level::Quick, 7).unwrap();
        for c in &rep.checks {
            assert!(c.passed, "{c:?}");
        }
        let dec = rep
            .checks
            .iter()
            .find(|c| c.invariant.starts_with("thermal channel equals"))
            .unwrap();
        assert!(dec.max_discrepancy <= 1e-12);
    }

    #[test]
    fn sign_flipped_g_is_caught() {
        let kernels = Kernels {
            g: |x| -gfunc::g(x).unwrap_or(f64::NAN),
            ..Kernels::default()
        };
        let rep = run_with(Level::Quick, 7, &kernels).unwrap();
        assert!(!rep.passed());
        let names: Vec<&str> = rep.failures().map(|c| c.invariant.as_str()).collect();
        assert!(names.contains(&"g matches high-precision reference values"), "{names:?}");
        assert!(names.contains(&"0 ≤ upper - lower ≤ refined bound ≤ 1/ln 2"), "{names:?}");
    }

    #[test]
    fn level_parsing() {
        assert_eq!("quick".parse::<Level>().unwrap(), Level::Quick);
        assert_eq!("full".parse::<Level>().unwrap(), Level::Full);
        assert!("fast".parse::<Level>().is_err());
    }

    #[test]
    fn grids() {
        let g = log_grid(1e-3, 1e6, 200);
        assert_eq!(g.len(), 200);
        assert!((g[0] - 1e-3).abs() < 1e-18 && (g[199] / 1e6 - 1.0).abs() < 1e-12);
        assert_eq!(random_triples(3, 5), random_triples(3, 5));
    }
}
