//! First and second quadrature moments of truncated states, and the
//! moment-level check of the amplifier ∘ pure-loss decomposition.
//!
//! The amplifier is never simulated in Fock space. The decomposition is a
//! statement about Gaussian maps, so it is checked exactly where it lives:
//! the simulated thermal channel's output moments are compared with the
//! input moments pushed through the pure loss and amplifier maps.

use super::channel::{ChannelConfig, ThermalChannelSim};
use super::state::FockDensityMatrix;
use crate::error::Result;
use crate::gaussian::{decompose, ChannelParams, CovarianceMatrix};
use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Normalized moments: displacement `(⟨Q⟩, ⟨P⟩)` and symmetrized covariance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub displacement: [f64; 2],
    /// Not validated as physical: truncation can push it marginally out.
    pub covariance: Matrix2<f64>,
    pub mean_photons: f64,
}

impl Moments {
    pub fn covariance_matrix(&self) -> Result<CovarianceMatrix> {
        CovarianceMatrix::new(self.covariance)
    }

    fn max_abs_diff(&self, other: &Moments) -> f64 {
        let d = (self.displacement[0] - other.displacement[0])
            .abs()
            .max((self.displacement[1] - other.displacement[1]).abs());
        d.max((self.covariance - other.covariance).abs().max())
    }
}

/// Moments with `Q = a + a†`, `P = -i(a - a†)`, normalized by the trace.
pub fn moments(rho: &FockDensityMatrix) -> Moments {
    let m = rho.matrix();
    let d = rho.dim();
    let tr = rho.trace();
    let mut a = Complex64::new(0.0, 0.0);
    let mut a2 = Complex64::new(0.0, 0.0);
    let mut n = 0.0;
    for k in 0..d {
        n += k as f64 * m[(k, k)].re;
        if k + 1 < d {
            // Tr(ρ a) = Σ √(k+1) ρ_{k+1,k}
            a += m[(k + 1, k)] * ((k + 1) as f64).sqrt();
        }
        if k + 2 < d {
            a2 += m[(k + 2, k)] * (((k + 1) * (k + 2)) as f64).sqrt();
        }
    }
    a /= tr;
    a2 /= tr;
    n /= tr;
    let dq = 2.0 * a.re;
    let dp = 2.0 * a.im;
    let qq = 2.0 * a2.re + 2.0 * n + 1.0 - dq * dq;
    let pp = -2.0 * a2.re + 2.0 * n + 1.0 - dp * dp;
    let qp = 2.0 * a2.im - dq * dp;
    Moments {
        displacement: [dq, dp],
        covariance: Matrix2::new(qq, qp, qp, pp),
        mean_photons: n,
    }
}

/// Output moments predicted by the Gaussian route: pure loss `λ̃` then
/// amplifier `G`, i.e. `d ↦ √(Gλ̃) d`, `Γ ↦ G(λ̃Γ + (1-λ̃)I) + (G-1)I`.
pub fn predicted_output_moments(params: &ChannelParams, input: &Moments) -> Moments {
    let dec = decompose(params);
    let scale = (dec.gain * dec.pure_loss_lambda).sqrt();
    let id = Matrix2::identity();
    let lossy = input.covariance * dec.pure_loss_lambda + id * (1.0 - dec.pure_loss_lambda);
    let cov = lossy * dec.gain + id * (dec.gain - 1.0);
    let displacement = [input.displacement[0] * scale, input.displacement[1] * scale];
    let mean_photons = (cov.trace() + displacement[0].powi(2) + displacement[1].powi(2) - 2.0) / 4.0;
    Moments {
        displacement,
        covariance: cov,
        mean_photons,
    }
}

/// Per-state and overall moment discrepancy between simulation and the
/// Gaussian decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionCheck {
    pub per_state: Vec<f64>,
    pub max_discrepancy: f64,
    pub tolerance: f64,
    pub passed: bool,
}

pub const MOMENT_TOLERANCE: f64 = 1e-8;

pub fn verify_decomposition_fock(
    params: &ChannelParams,
    test_states: &[FockDensityMatrix],
) -> Result<DecompositionCheck> {
    verify_decomposition_fock_with(params, test_states, ChannelConfig::default())
}

pub fn verify_decomposition_fock_with(
    params: &ChannelParams,
    test_states: &[FockDensityMatrix],
    config: ChannelConfig,
) -> Result<DecompositionCheck> {
    let mut per_state = Vec::with_capacity(test_states.len());
    for rho in test_states {
        let sim = ThermalChannelSim::new(*params, rho.dim(), config)?;
        let out = sim.apply(rho)?;
        let simulated = moments(&out);
        let predicted = predicted_output_moments(params, &moments(rho));
        per_state.push(simulated.max_abs_diff(&predicted));
    }
    let max_discrepancy = per_state.iter().copied().fold(0.0, f64::max);
    Ok(DecompositionCheck {
        passed: max_discrepancy <= MOMENT_TOLERANCE,
        per_state,
        max_discrepancy,
        tolerance: MOMENT_TOLERANCE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::state::{coherent_state, thermal_state};

    #[test]
    fn vacuum_and_thermal_moments() {
        let m = moments(&FockDensityMatrix::vacuum(5).unwrap());
        assert_eq!(m.displacement, [0.0, 0.0]);
        assert!((m.covariance - Matrix2::identity()).abs().max() < 1e-15);
        let m = moments(&thermal_state(1.0, 60).unwrap());
        assert!((m.covariance - Matrix2::identity() * 3.0).abs().max() < 1e-12);
    }

    #[test]
    fn coherent_moments() {
        let alpha = Complex64::from_polar(1.3, 0.4);
        let m = moments(&coherent_state(alpha, 40).unwrap());
        assert!((m.displacement[0] - 2.0 * alpha.re).abs() < 1e-10);
        assert!((m.displacement[1] - 2.0 * alpha.im).abs() < 1e-10);
        assert!((m.covariance - Matrix2::identity()).abs().max() < 1e-9);
    }

    #[test]
    fn decomposition_examples() {
        let ch = ChannelParams::new(0.5, 1.0).unwrap();
        let vac = FockDensityMatrix::vacuum(8).unwrap();
        let out = crate::fock::channel::apply_channel(&ch, &vac).unwrap();
        assert!((moments(&out).mean_photons - 0.5).abs() < 1e-9);

        let coh = coherent_state(Complex64::new(1.0, 0.0), 30).unwrap();
        let check = verify_decomposition_fock(&ch, &[vac, coh.clone()]).unwrap();
        assert!(check.passed, "{check:?}");
        let out = moments(&crate::fock::channel::apply_channel(&ch, &coh).unwrap());
        assert!((out.covariance - Matrix2::identity() * 2.0).abs().max() < 1e-8);
        assert!((out.displacement[0] - 2.0 * 0.5f64.sqrt()).abs() < 1e-8);

        let ch = ChannelParams::new(0.8, 5.0).unwrap();
        let th = thermal_state(2.0, 26).unwrap();
        let check = verify_decomposition_fock(&ch, &[th.clone()]).unwrap();
        assert!(check.passed, "{check:?}");
        let predicted = predicted_output_moments(&ch, &moments(&th));
        assert!((predicted.mean_photons - 2.6).abs() < 1e-3);
        let simulated = moments(&crate::fock::channel::apply_channel(&ch, &th).unwrap());
        assert!((simulated.mean_photons - predicted.mean_photons).abs() < 1e-8);
    }
}
