//! The thermal noise channel on truncated Fock space.
//!
//! The beamsplitter conserves total photon number, so on the two-mode span
//! of `|a⟩_S |b⟩_E` with `a + b = n` it acts as an `(n+1)×(n+1)` rotation.
//! With `U = exp(θ(a†b - ab†))`, `cos θ = √λ`, the output annihilator is
//! `√λ a + √(1-λ) b`. Each block is exponentiated through an
//! eigendecomposition rather than by the creation-operator recursion
//! `U|a+1, b⟩ = (√λ a† - √(1-λ) b†) U|a, b⟩ / √(a+1)`, which loses all
//! accuracy once `n` reaches a few dozen.
//!
//! All output levels reachable from the truncated input and environment are
//! kept, so the only weight lost is what the two truncations already dropped.

use super::state::{FockDensityMatrix, TruncationBudget};
use crate::error::{Error, Result};
use crate::gaussian::ChannelParams;
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

/// Default cap on `D × D_E`.
pub const DEFAULT_JOINT_DIM_CAP: usize = 4096;
/// Default bound on the environment's discarded weight and photon number.
pub const DEFAULT_ENV_TAIL: f64 = 1e-10;

/// Input entries with `ρ_aa` below this (relative to the trace) are skipped;
/// the off-diagonal entries they touch are bounded by its square root.
const NEGLIGIBLE_POPULATION: f64 = 1e-40;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelConfig {
    pub env_tail: f64,
    pub joint_dim_cap: usize,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        ChannelConfig {
            env_tail: DEFAULT_ENV_TAIL,
            joint_dim_cap: DEFAULT_JOINT_DIM_CAP,
        }
    }
}

/// Number-conserving beamsplitter blocks for inputs `a < dim_in`, `b < dim_env`.
#[derive(Debug, Clone)]
pub struct BeamsplitterBlocks {
    dim_in: usize,
    dim_env: usize,
    /// Block `n` holds columns `a ∈ [lo(n), hi(n)]`, each of length `n + 1`.
    data: Vec<Vec<f64>>,
}

impl BeamsplitterBlocks {
    pub fn new(lambda: f64, dim_in: usize, dim_env: usize) -> Self {
        let theta = lambda.clamp(0.0, 1.0).sqrt().acos();
        let n_max = dim_in + dim_env - 2;
        let mut blocks = BeamsplitterBlocks {
            dim_in,
            dim_env,
            data: Vec::with_capacity(n_max + 1),
        };
        for n in 0..=n_max {
            let (lo, hi) = blocks.column_range(n);
            let rot = rotation_block(n, theta);
            let mut block = Vec::with_capacity((hi - lo + 1) * (n + 1));
            for a in lo..=hi {
                block.extend(rot.column(a).iter());
            }
            blocks.data.push(block);
        }
        blocks
    }

    fn column_range(&self, n: usize) -> (usize, usize) {
        let lo = n.saturating_sub(self.dim_env - 1);
        let hi = n.min(self.dim_in - 1);
        (lo, hi)
    }

    /// Amplitudes `⟨a', n-a'| U |a, n-a⟩` for `a' = 0..=n`.
    pub fn column(&self, n: usize, a: usize) -> &[f64] {
        let (lo, hi) = self.column_range(n);
        assert!(a >= lo && a <= hi, "column ({n}, {a}) outside stored range");
        &self.data[n][(a - lo) * (n + 1)..(a - lo + 1) * (n + 1)]
    }

    pub fn max_total(&self) -> usize {
        self.data.len() - 1
    }

    /// Largest deviation of any block from orthonormal columns.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for n in 0..=self.max_total() {
            let (lo, hi) = self.column_range(n);
            for a in lo..=hi {
                for b in a..=hi {
                    let dot: f64 = self
                        .column(n, a)
                        .iter()
                        .zip(self.column(n, b))
                        .map(|(x, y)| x * y)
                        .sum();
                    let expected = if a == b { 1.0 } else { 0.0 };
                    worst = worst.max((dot - expected).abs());
                }
            }
        }
        worst
    }
}

/// `exp(θA)` on the `n`-photon block, `A = a†b - ab†` in the basis
/// `|k, n-k⟩`. `A = -i D⁻¹TD` with `D = diag(iᵏ)` and `T` the real symmetric
/// tridiagonal with the same off-diagonals, so
/// `exp(θA)[p,q] = Re(i^(q-p) Σ_m V_pm V_qm e^(iθμ_m))`. `T` has the integer
/// spectrum `{-n, -n+2, …, n}`, which is used in place of the computed one.
fn rotation_block(n: usize, theta: f64) -> DMatrix<f64> {
    let dim = n + 1;
    if n == 0 {
        return DMatrix::from_element(1, 1, 1.0);
    }
    let mut t = DMatrix::<f64>::zeros(dim, dim);
    for k in 0..n {
        let v = (((k + 1) * (n - k)) as f64).sqrt();
        t[(k + 1, k)] = v;
        t[(k, k + 1)] = v;
    }
    let eig = SymmetricEigen::new(t);
    let phases: Vec<Complex64> = eig
        .eigenvalues
        .iter()
        .map(|&mu| Complex64::from_polar(1.0, theta * mu.round()))
        .collect();
    let v = &eig.eigenvectors;
    let mut out = DMatrix::<f64>::zeros(dim, dim);
    let i_pow = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, -1.0),
    ];
    for q in 0..dim {
        let scaled: Vec<Complex64> = (0..dim).map(|m| phases[m] * v[(q, m)]).collect();
        for p in 0..dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for (m, s) in scaled.iter().enumerate() {
                acc += s * v[(p, m)];
            }
            out[(p, q)] = (i_pow[(q + 4 * dim - p) % 4] * acc).re;
        }
    }
    out
}

/// Precomputed simulation of `E_{λ,N_E}` for inputs of a fixed dimension.
#[derive(Debug, Clone)]
pub struct ThermalChannelSim {
    params: ChannelParams,
    dim_in: usize,
    env: TruncationBudget,
    env_populations: Vec<f64>,
    blocks: BeamsplitterBlocks,
}

impl ThermalChannelSim {
    pub fn new(params: ChannelParams, dim_in: usize, config: ChannelConfig) -> Result<Self> {
        if dim_in == 0 {
            return Err(Error::Truncation("input dimension must be at least 1".into()));
        }
        let env = TruncationBudget::thermal(params.n_env(), config.env_tail)?;
        let joint = dim_in * env.dim;
        if joint > config.joint_dim_cap {
            return Err(Error::DimensionOverflow {
                joint,
                cap: config.joint_dim_cap,
            });
        }
        let n_env = params.n_env();
        let env_populations = if n_env == 0.0 {
            vec![1.0]
        } else {
            let q = n_env / (n_env + 1.0);
            (0..env.dim)
                .map(|b| q.powi(b as i32) / (n_env + 1.0))
                .collect()
        };
        let blocks = BeamsplitterBlocks::new(params.lambda(), dim_in, env.dim);
        Ok(ThermalChannelSim {
            params,
            dim_in,
            env,
            env_populations,
            blocks,
        })
    }

    pub fn params(&self) -> &ChannelParams {
        &self.params
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_in + self.env.dim - 1
    }

    pub fn env_budget(&self) -> TruncationBudget {
        self.env
    }

    pub fn blocks(&self) -> &BeamsplitterBlocks {
        &self.blocks
    }

    /// `Tr_E[U (ρ ⊗ ρ_E) U†]` on all reachable output levels.
    pub fn apply(&self, rho: &FockDensityMatrix) -> Result<FockDensityMatrix> {
        if rho.dim() != self.dim_in {
            return Err(Error::Truncation(format!(
                "input dimension {} does not match simulator dimension {}",
                rho.dim(),
                self.dim_in
            )));
        }
        let m = rho.matrix();
        let d = self.dim_in;
        let d_out = self.dim_out();
        let tr = rho.trace();
        let active: Vec<usize> = (0..d)
            .filter(|&a| m[(a, a)].re > NEGLIGIBLE_POPULATION * tr.max(1e-300))
            .collect();

        let mut out = vec![Complex64::new(0.0, 0.0); d_out * d_out];
        for (b, &pb) in self.env_populations.iter().enumerate() {
            if pb == 0.0 {
                continue;
            }
            for &a2 in &active {
                let col2 = self.blocks.column(a2 + b, a2);
                for &a1 in &active {
                    let entry = m[(a1, a2)] * pb;
                    if entry.re == 0.0 && entry.im == 0.0 {
                        continue;
                    }
                    let col1 = self.blocks.column(a1 + b, a1);
                    // output (a1 + s, a2 + s), s = b - k for env output level k
                    let s_min = a1.min(a2);
                    let row0 = a1 - s_min;
                    let colo0 = a2 - s_min;
                    let len = s_min + b + 1;
                    for step in 0..len {
                        let o1 = row0 + step;
                        let o2 = colo0 + step;
                        let amp = col1[o1] * col2[o2];
                        out[o2 * d_out + o1] += entry * amp;
                    }
                }
            }
        }
        let out = DMatrix::from_vec(d_out, d_out, out);
        let deficit = (rho.trace_deficit() + self.env.tail_bound).min(1.0);
        let result = FockDensityMatrix::from_parts_unchecked(out, deficit);
        let tr_out = result.trace();
        if (1.0 - tr_out).abs() > deficit + 1e-12 {
            return Err(Error::Truncation(format!(
                "output trace {tr_out} violates deficit bound {deficit:e}"
            )));
        }
        Ok(result)
    }
}

/// One-shot channel application with the default environment budget.
pub fn apply_channel(params: &ChannelParams, rho: &FockDensityMatrix) -> Result<FockDensityMatrix> {
    ThermalChannelSim::new(*params, rho.dim(), ChannelConfig::default())?.apply(rho)
}
