//! Single-mode zero-mean Gaussian states as 2×2 covariance matrices, and the
//! three Gaussian channels the bounds are built from: the thermal noise
//! channel, the phase-insensitive amplifier and the pure loss channel.
//!
//! Convention: quadratures `Q = a + a†`, `P = -i(a - a†)`, so the vacuum has
//! covariance `I` and a thermal state with mean photon number `N` has
//! `(2N + 1) I`.

use crate::error::{Error, Result};
use crate::gfunc::PhotonNumber;
use nalgebra::Matrix2;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Slack on `det Γ ≥ 1` that absorbs roundoff in composed maps.
pub const PHYSICALITY_TOLERANCE: f64 = 1e-9;

const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Real symmetric covariance matrix of the quadratures `(Q, P)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovarianceMatrix(Matrix2<f64>);

impl CovarianceMatrix {
    /// Wraps `m` after checking symmetry and the uncertainty relation
    /// `Γ + iΩ ≥ 0` (for one mode: `det Γ ≥ 1`, `tr Γ > 0`).
    pub fn new(m: Matrix2<f64>) -> Result<Self> {
        let cm = CovarianceMatrix(m);
        cm.check_physical()?;
        Ok(cm)
    }

    pub fn from_rows(rows: [[f64; 2]; 2]) -> Result<Self> {
        Self::new(Matrix2::new(rows[0][0], rows[0][1], rows[1][0], rows[1][1]))
    }

    pub fn diagonal(q: f64, p: f64) -> Result<Self> {
        Self::new(Matrix2::new(q, 0.0, 0.0, p))
    }

    pub fn identity() -> Self {
        CovarianceMatrix(Matrix2::identity())
    }

    pub fn matrix(&self) -> &Matrix2<f64> {
        &self.0
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn det(&self) -> f64 {
        self.0.determinant()
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    /// Symplectic eigenvalue `ν = sqrt(det Γ)`.
    pub fn symplectic_eigenvalue(&self) -> f64 {
        self.det().sqrt()
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &CovarianceMatrix) -> f64 {
        (self.0 - other.0).abs().max()
    }

    pub fn check_physical(&self) -> Result<()> {
        let m = &self.0;
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::Unphysical("non-finite entry".into()));
        }
        let asym = (m[(0, 1)] - m[(1, 0)]).abs();
        if asym > SYMMETRY_TOLERANCE * (1.0 + m.abs().max()) {
            return Err(Error::Unphysical(format!("not symmetric (|Γ01 - Γ10| = {asym:e})")));
        }
        if m.trace() <= 0.0 {
            return Err(Error::Unphysical(format!("trace {} is not positive", m.trace())));
        }
        let det = m.determinant();
        if det < 1.0 - PHYSICALITY_TOLERANCE {
            return Err(Error::Unphysical(format!("det Γ = {det} < 1 violates uncertainty")));
        }
        Ok(())
    }

    // Channel outputs are physical by construction; skip the check.
    fn from_channel(m: Matrix2<f64>) -> Self {
        CovarianceMatrix(m)
    }
}

/// Thermal noise channel `E_{λ,N_E}`: beamsplitter of transmissivity `λ`
/// with a thermal environment of mean photon number `N_E`.
///
/// `λ = 0` is rejected: the output no longer depends on the input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    lambda: f64,
    n_env: f64,
}

impl ChannelParams {
    pub fn new(lambda: f64, n_env: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda <= 0.0 || lambda > 1.0 {
            return Err(Error::InvalidChannel(format!(
                "transmissivity {lambda} outside (0, 1]"
            )));
        }
        if !n_env.is_finite() || n_env < 0.0 {
            return Err(Error::InvalidChannel(format!(
                "environment photon number {n_env} must be finite and nonnegative"
            )));
        }
        Ok(ChannelParams { lambda, n_env })
    }

    pub fn pure_loss(lambda: f64) -> Result<Self> {
        Self::new(lambda, 0.0)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn n_env(&self) -> f64 {
        self.n_env
    }

    /// Photons the environment injects into the output, `(1-λ) N_E`.
    pub fn injected_noise(&self) -> f64 {
        (1.0 - self.lambda) * self.n_env
    }
}

/// Phase-insensitive amplifier `A_G` with gain `G ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplifierParams {
    gain: f64,
}

impl AmplifierParams {
    pub fn new(gain: f64) -> Result<Self> {
        if !gain.is_finite() || gain < 1.0 {
            return Err(Error::InvalidChannel(format!("amplifier gain {gain} must be finite and ≥ 1")));
        }
        Ok(AmplifierParams { gain })
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }
}

/// `E_{λ,N_E} = A_G ∘ E_{λ̃,0}` with `G = (1-λ)N_E + 1` and `λ̃ = λ/G`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub gain: f64,
    pub pure_loss_lambda: f64,
}

impl Decomposition {
    pub fn amplifier(&self) -> AmplifierParams {
        AmplifierParams { gain: self.gain }
    }

    pub fn pure_loss(&self) -> ChannelParams {
        ChannelParams {
            lambda: self.pure_loss_lambda,
            n_env: 0.0,
        }
    }

    /// Applies the pure loss stage followed by the amplifier.
    pub fn apply(&self, gamma: &CovarianceMatrix) -> Result<CovarianceMatrix> {
        let lossy = apply_thermal(&self.pure_loss(), gamma)?;
        apply_amplifier(&self.amplifier(), &lossy)
    }
}

/// `Γ ↦ λΓ + (1-λ)(2N_E + 1) I`.
pub fn apply_thermal(params: &ChannelParams, gamma: &CovarianceMatrix) -> Result<CovarianceMatrix> {
    gamma.check_physical()?;
    let lambda = params.lambda;
    let noise = (1.0 - lambda) * (2.0 * params.n_env + 1.0);
    Ok(CovarianceMatrix::from_channel(
        gamma.0 * lambda + Matrix2::identity() * noise,
    ))
}

/// `Γ ↦ GΓ + (G - 1) I`.
pub fn apply_amplifier(params: &AmplifierParams, gamma: &CovarianceMatrix) -> Result<CovarianceMatrix> {
    gamma.check_physical()?;
    let g = params.gain;
    Ok(CovarianceMatrix::from_channel(
        gamma.0 * g + Matrix2::identity() * (g - 1.0),
    ))
}

pub fn decompose(params: &ChannelParams) -> Decomposition {
    let gain = params.injected_noise() + 1.0;
    Decomposition {
        gain,
        pure_loss_lambda: params.lambda / gain,
    }
}

/// `(2N + 1) I`.
pub fn thermal_covariance(n: f64) -> Result<CovarianceMatrix> {
    let n = PhotonNumber::new(n)?;
    Ok(CovarianceMatrix(Matrix2::identity() * (2.0 * n.value() + 1.0)))
}

/// Mean photon number of a zero-mean state, `(tr Γ - 2)/4`.
pub fn mean_photons(gamma: &CovarianceMatrix) -> Result<PhotonNumber> {
    gamma.check_physical()?;
    // tr Γ ≥ 2 sqrt(det Γ) ≥ 2 up to the physicality slack
    PhotonNumber::new(((gamma.trace() - 2.0) / 4.0).max(0.0))
}

/// Random physical covariance `(2N+1) R(θ) diag(e^{2r}, e^{-2r}) R(θ)ᵀ`
/// with `N ∈ [0, 5]`, `r ∈ [-1, 1]`, `θ ∈ [0, π)`.
pub fn random_physical_covariance<R: Rng + ?Sized>(rng: &mut R) -> CovarianceMatrix {
    let n: f64 = rng.gen_range(0.0..=5.0);
    let r: f64 = rng.gen_range(-1.0..=1.0);
    let theta: f64 = rng.gen_range(0.0..std::f64::consts::PI);
    let (s, c) = theta.sin_cos();
    let rot = Matrix2::new(c, -s, s, c);
    let squeeze = Matrix2::new((2.0 * r).exp(), 0.0, 0.0, (-2.0 * r).exp());
    let m = rot * squeeze * rot.transpose() * (2.0 * n + 1.0);
    // symmetrize away the rounding of the product
    CovarianceMatrix((m + m.transpose()) * 0.5)
}

/// Random valid channel with `λ ∈ (0, 1]` and `N_E ∈ [0, max_env]`.
pub fn random_channel<R: Rng + ?Sized>(rng: &mut R, max_env: f64) -> ChannelParams {
    let lambda = 1.0 - rng.gen_range(0.0..1.0);
    let n_env = rng.gen_range(0.0..=max_env);
    ChannelParams { lambda, n_env }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diag(q: f64, p: f64) -> CovarianceMatrix {
        CovarianceMatrix::diagonal(q, p).unwrap()
    }

    #[test]
    fn thermal_channel_examples() {
        let g = random_physical_covariance(&mut ChaCha8Rng::seed_from_u64(3));
        let id = ChannelParams::new(1.0, 7.0).unwrap();
        assert_eq!(apply_thermal(&id, &g).unwrap(), g);

        let ch = ChannelParams::new(0.5, 1.0).unwrap();
        let out = apply_thermal(&ch, &CovarianceMatrix::identity()).unwrap();
        assert!(out.max_abs_diff(&diag(2.0, 2.0)) < 1e-15);
        assert_relative_eq!(mean_photons(&out).unwrap().value(), 0.5);

        let ch = ChannelParams::new(0.7, 2.0).unwrap();
        let out = apply_thermal(&ch, &diag(3.0, 1.0 / 3.0)).unwrap();
        let noise = 0.3 * 5.0;
        assert!(out.max_abs_diff(&diag(0.7 * 3.0 + noise, 0.7 / 3.0 + noise)) < 1e-15);
    }

    #[test]
    fn amplifier_examples() {
        let g = random_physical_covariance(&mut ChaCha8Rng::seed_from_u64(4));
        let unit = AmplifierParams::new(1.0).unwrap();
        assert_eq!(apply_amplifier(&unit, &g).unwrap(), g);
        let two = AmplifierParams::new(2.0).unwrap();
        let out = apply_amplifier(&two, &CovarianceMatrix::identity()).unwrap();
        assert!(out.max_abs_diff(&diag(3.0, 3.0)) < 1e-15);
        let amp = AmplifierParams::new(1.5).unwrap();
        let out = apply_amplifier(&amp, &diag(2.0, 0.5)).unwrap();
        assert!(out.max_abs_diff(&diag(3.5, 1.25)) < 1e-15);
        assert!(AmplifierParams::new(0.99).is_err());
        assert!(AmplifierParams::new(f64::INFINITY).is_err());
    }

    #[test]
    fn decomposition_examples() {
        let d = decompose(&ChannelParams::new(0.5, 1.0).unwrap());
        assert_relative_eq!(d.gain, 1.5);
        assert_relative_eq!(d.pure_loss_lambda, 1.0 / 3.0);

        let d = decompose(&ChannelParams::new(0.37, 0.0).unwrap());
        assert_eq!(d.gain, 1.0);
        assert_eq!(d.pure_loss_lambda, 0.37);

        let d = decompose(&ChannelParams::new(0.8, 5.0).unwrap());
        assert_relative_eq!(d.gain, 2.0, max_relative = 1e-15);
        assert_relative_eq!(d.pure_loss_lambda, 0.4, max_relative = 1e-15);
    }

    #[test]
    fn thermal_covariance_and_mean_photons() {
        assert_eq!(thermal_covariance(0.0).unwrap(), CovarianceMatrix::identity());
        assert!(thermal_covariance(1.0).unwrap().max_abs_diff(&diag(3.0, 3.0)) == 0.0);
        assert!(thermal_covariance(0.5).unwrap().max_abs_diff(&diag(2.0, 2.0)) == 0.0);
        assert!(thermal_covariance(-0.1).is_err());

        assert_eq!(mean_photons(&CovarianceMatrix::identity()).unwrap().value(), 0.0);
        assert_relative_eq!(mean_photons(&diag(3.0, 3.0)).unwrap().value(), 1.0);
        assert_relative_eq!(
            mean_photons(&diag(3.0, 1.0 / 3.0)).unwrap().value(),
            1.0 / 3.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn rejects_invalid_inputs() {
        assert!(ChannelParams::new(0.0, 1.0).is_err());
        assert!(ChannelParams::new(1.5, 0.0).is_err());
        assert!(ChannelParams::new(0.5, -1.0).is_err());
        assert!(ChannelParams::new(f64::NAN, 0.0).is_err());
        assert!(CovarianceMatrix::diagonal(0.5, 0.5).is_err());
        assert!(CovarianceMatrix::from_rows([[2.0, 0.1], [0.0, 2.0]]).is_err());
        assert!(CovarianceMatrix::diagonal(-2.0, -2.0).is_err());
        let squeezed_ok = CovarianceMatrix::diagonal(4.0, 0.25).unwrap();
        assert_relative_eq!(squeezed_ok.symplectic_eigenvalue(), 1.0);
    }

    #[test]
    fn random_covariances_are_physical_and_channels_preserve_it() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let g = random_physical_covariance(&mut rng);
            g.check_physical().unwrap();
            let ch = random_channel(&mut rng, 10.0);
            let out = apply_thermal(&ch, &g).unwrap();
            assert!(out.det() >= 1.0 - PHYSICALITY_TOLERANCE);
            let composed = decompose(&ch).apply(&g).unwrap();
            assert!(composed.det() >= 1.0 - PHYSICALITY_TOLERANCE);
            assert!(out.max_abs_diff(&composed) <= 1e-12);
        }
    }

    #[test]
    fn zero_temperature_channel_is_its_own_pure_loss_stage() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..100 {
            let g = random_physical_covariance(&mut rng);
            let ch = ChannelParams::pure_loss(rng.gen_range(0.01..=1.0)).unwrap();
            let d = decompose(&ch);
            assert_eq!(d.pure_loss_lambda, ch.lambda());
            assert_eq!(apply_thermal(&ch, &g).unwrap(), apply_thermal(&d.pure_loss(), &g).unwrap());
        }
    }

    #[test]
    fn photon_bookkeeping_through_thermal_channel() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..200 {
            let ch = random_channel(&mut rng, 20.0);
            let n = rng.gen_range(0.0..50.0);
            let out = apply_thermal(&ch, &thermal_covariance(n).unwrap()).unwrap();
            let expected = ch.lambda() * n + ch.injected_noise();
            assert!((mean_photons(&out).unwrap().value() - expected).abs() <= 1e-12);
        }
    }
}
