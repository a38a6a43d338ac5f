use super::state::{FockDensityMatrix, EIGENVALUE_FLOOR};
use crate::error::{Error, Result};

/// Eigenvalues at or below this are left out of `-Σ μ ln μ`.
pub const ENTROPY_EIGENVALUE_CUTOFF: f64 = 1e-15;

/// Entropy in nats plus an upper bound on what the eigenvalue cutoff dropped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyEstimate {
    pub nats: f64,
    pub cutoff_error: f64,
}

/// `-Σ μ ln μ` over a spectrum, rejecting eigenvalues below `-1e-10`.
pub fn spectrum_entropy(eigenvalues: &[f64]) -> Result<EntropyEstimate> {
    let mut nats = 0.0;
    let mut dropped = 0usize;
    for &mu in eigenvalues {
        if mu < EIGENVALUE_FLOOR {
            return Err(Error::UnphysicalState(format!("negative eigenvalue {mu:e}")));
        }
        if mu > ENTROPY_EIGENVALUE_CUTOFF {
            nats -= mu * mu.ln();
        } else {
            dropped += 1;
        }
    }
    // -μ ln μ is increasing on (0, 1/e), so each dropped term is below its value at the cutoff
    let per_term = -ENTROPY_EIGENVALUE_CUTOFF * ENTROPY_EIGENVALUE_CUTOFF.ln();
    Ok(EntropyEstimate {
        nats,
        cutoff_error: dropped as f64 * per_term,
    })
}

pub fn von_neumann_entropy_estimate(rho: &FockDensityMatrix) -> Result<EntropyEstimate> {
    spectrum_entropy(&rho.eigenvalues())
}

/// Von Neumann entropy `-Tr ρ ln ρ` in nats.
pub fn von_neumann_entropy(rho: &FockDensityMatrix) -> Result<f64> {
    Ok(von_neumann_entropy_estimate(rho)?.nats)
}
