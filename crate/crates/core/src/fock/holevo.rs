//! Numerical Holevo quantity of finite ensembles sent through the simulated
//! thermal channel, and the Gaussian coherent-state ensemble whose χ is the
//! closed-form lower bound.

use super::channel::{ChannelConfig, ThermalChannelSim};
use super::entropy::von_neumann_entropy_estimate;
use super::quadrature::{DiscreteGaussianEnsemble, GaussianGrid};
use super::state::{coherent_state, FockDensityMatrix, TruncationBudget};
use crate::error::{Error, Result};
use crate::gaussian::ChannelParams;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;

/// Tail bound used to pick the default Fock dimension of the signal states.
pub const DEFAULT_SIGNAL_TAIL: f64 = 1e-10;

/// Holevo quantity with its ingredients, entropies in nats.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiBreakdown {
    pub chi_bits: f64,
    pub average_output_entropy: f64,
    pub member_output_entropies: Vec<f64>,
    /// Upper bound on entropy dropped by the eigenvalue cutoff.
    pub entropy_cutoff_error: f64,
}

/// Members processed per parallel batch; bounds peak memory.
const CHUNK: usize = 16;

/// `χ = S(Σ w_k E(ρ_k)) - Σ w_k S(E(ρ_k))` for states already on the
/// simulator's input dimension.
pub fn ensemble_chi(sim: &ThermalChannelSim, members: &[(&FockDensityMatrix, f64)]) -> Result<ChiBreakdown> {
    chi_streaming(sim, members.len(), |k| Ok((members[k].0.clone(), members[k].1)))
}

/// Streams members through the channel in batches. Outputs and entropies
/// of a batch are computed in parallel; the running average and the
/// weighted sums are accumulated in member order, so the result does not
/// depend on scheduling.
pub(crate) fn chi_streaming<F>(sim: &ThermalChannelSim, count: usize, member: F) -> Result<ChiBreakdown>
where
    F: Fn(usize) -> Result<(FockDensityMatrix, f64)> + Sync,
{
    if count == 0 {
        return Err(Error::InvalidEnsemble("empty ensemble".into()));
    }
    let d_out = sim.dim_out();
    let mut average = DMatrix::<Complex64>::zeros(d_out, d_out);
    let mut average_deficit = 0.0;
    let mut conditional = 0.0;
    let mut cutoff = 0.0;
    let mut member_entropies = Vec::with_capacity(count);
    let indices: Vec<usize> = (0..count).collect();
    for batch in indices.chunks(CHUNK) {
        let results: Vec<(FockDensityMatrix, f64, f64, f64)> = batch
            .par_iter()
            .map(|&k| {
                let (rho, w) = member(k)?;
                let out = sim.apply(&rho)?;
                let s = von_neumann_entropy_estimate(&out)?;
                Ok((out, w, s.nats, s.cutoff_error))
            })
            .collect::<Result<_>>()?;
        for (out, w, s, err) in results {
            average_deficit += w * out.trace_deficit();
            average += out.into_matrix().map(|z| z * w);
            conditional += w * s;
            cutoff += w * err;
            member_entropies.push(s);
        }
    }
    let average = FockDensityMatrix::from_parts_unchecked(average, average_deficit.min(1.0));
    let avg = von_neumann_entropy_estimate(&average)?;
    Ok(ChiBreakdown {
        chi_bits: ((avg.nats - conditional) / LN_2).max(0.0),
        average_output_entropy: avg.nats,
        member_output_entropies: member_entropies,
        entropy_cutoff_error: cutoff + avg.cutoff_error,
    })
}

/// Report of the Gaussian-ensemble Holevo computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianChiReport {
    pub chi_bits: f64,
    pub dim: usize,
    pub env_dim: usize,
    pub members: usize,
    pub ensemble_mean_photons: f64,
    /// Output entropy (nats) of every ensemble member, ring-major.
    pub member_output_entropies: Vec<f64>,
    pub average_output_entropy: f64,
    /// Largest Poisson tail bound over the signal states.
    pub signal_tail_bound: f64,
    pub env_tail_bound: f64,
    pub discarded_gaussian_mass: f64,
    pub entropy_cutoff_error: f64,
}

impl GaussianChiReport {
    /// Largest `|S(E(|α⟩⟨α|)) - reference|` over the members.
    pub fn output_entropy_spread(&self, reference: f64) -> f64 {
        self.member_output_entropies
            .iter()
            .map(|s| (s - reference).abs())
            .fold(0.0, f64::max)
    }
}

/// Smallest dimension that keeps every coherent state of `ensemble` within
/// the `|α|² ≤ D/4` rule and its Poisson tail below `tail`.
pub fn default_dimension(ensemble: &DiscreteGaussianEnsemble, tail: f64) -> Result<usize> {
    let r = ensemble.max_radius();
    Ok(TruncationBudget::coherent(r * r, tail)?.dim)
}

/// χ in bits of the discretized Gaussian coherent-state ensemble with mean
/// photon number `n` through `E_{λ,N_E}`.
pub fn holevo_chi_gaussian_ensemble(
    params: &ChannelParams,
    n: f64,
    grid: &GaussianGrid,
    dim: usize,
) -> Result<f64> {
    Ok(gaussian_chi_report(params, n, grid, Some(dim), ChannelConfig::default())?.chi_bits)
}

/// Full computation behind [`holevo_chi_gaussian_ensemble`]. `dim = None`
/// picks [`default_dimension`].
pub fn gaussian_chi_report(
    params: &ChannelParams,
    n: f64,
    grid: &GaussianGrid,
    dim: Option<usize>,
    config: ChannelConfig,
) -> Result<GaussianChiReport> {
    let ensemble = grid.discretize(n)?;
    let dim = match dim {
        Some(d) => d,
        None => default_dimension(&ensemble, DEFAULT_SIGNAL_TAIL)?,
    };
    let r = ensemble.max_radius();
    let signal_tail_bound = TruncationBudget::poisson_tail(r * r, dim);
    let sim = ThermalChannelSim::new(*params, dim, config)?;

    let points = ensemble.points();
    let chi = chi_streaming(&sim, points.len(), |k| {
        let (alpha, w) = points[k];
        Ok((coherent_state(alpha, dim)?, w))
    })?;
    Ok(GaussianChiReport {
        chi_bits: chi.chi_bits,
        dim,
        env_dim: sim.env_budget().dim,
        members: points.len(),
        ensemble_mean_photons: ensemble.mean_photons(),
        member_output_entropies: chi.member_output_entropies,
        average_output_entropy: chi.average_output_entropy,
        signal_tail_bound,
        env_tail_bound: sim.env_budget().tail_bound,
        discarded_gaussian_mass: ensemble.discarded_mass,
        entropy_cutoff_error: chi.entropy_cutoff_error,
    })
}

