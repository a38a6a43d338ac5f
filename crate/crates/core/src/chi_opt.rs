//! Ascent search for single-letter ensembles with large Holevo quantity.
//!
//! Members are displaced number-state mixtures `D(α) (Σ p_j |j⟩⟨j|) D(α)†`,
//! which covers coherent states (`p = δ_0`) and displaced thermal-like
//! states. Each sweep runs a constrained Blahut–Arimoto weight update and
//! then a coordinate pass over the member parameters. Both steps accept
//! only χ-increasing changes, so the history is monotone. The search gives
//! numerical evidence only; it does not claim a global optimum.

use crate::bounds::{additive_extension_upper, holevo_lower};
use crate::error::{domain, Error, Result};
use crate::fock::channel::{ChannelConfig, ThermalChannelSim};
use crate::fock::entropy::von_neumann_entropy;
use crate::fock::holevo::ensemble_chi;
use crate::fock::state::{displaced_diagonal_state, FockDensityMatrix};
use crate::gaussian::ChannelParams;
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{LN_2, PI};

pub const MAX_MEMBERS: usize = 16;
pub const MAX_DIM: usize = 32;
/// Smallest coordinate step; the schedule halves down to here.
pub const STEP_FLOOR: f64 = 1e-4;
/// Slack on the photon-number constraint.
pub const CONSTRAINT_SLACK: f64 = 1e-9;

/// Weighted input states of a common dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    members: Vec<(FockDensityMatrix, f64)>,
    mean_photons: f64,
}

impl Ensemble {
    pub fn new(members: Vec<(FockDensityMatrix, f64)>) -> Result<Self> {
        let Some((first, _)) = members.first() else {
            return Err(Error::InvalidEnsemble("no members".into()));
        };
        let dim = first.dim();
        if members.iter().any(|(s, _)| s.dim() != dim) {
            return Err(Error::InvalidEnsemble("members have different dimensions".into()));
        }
        if members.iter().any(|(_, w)| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidEnsemble("weights must be finite and nonnegative".into()));
        }
        let total: f64 = members.iter().map(|m| m.1).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidEnsemble(format!("weights sum to {total}, not 1")));
        }
        let mean_photons = members.iter().map(|(s, w)| w * s.mean_photons()).sum();
        Ok(Ensemble { members, mean_photons })
    }

    pub fn members(&self) -> &[(FockDensityMatrix, f64)] {
        &self.members
    }

    pub fn weights(&self) -> Vec<f64> {
        self.members.iter().map(|m| m.1).collect()
    }

    pub fn mean_photons(&self) -> f64 {
        self.mean_photons
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.members[0].0.dim()
    }
}

/// Holevo quantity of `ens` through `E_{λ,N_E}`, in bits.
pub fn chi(params: &ChannelParams, ens: &Ensemble) -> Result<f64> {
    let sim = ThermalChannelSim::new(*params, ens.dim(), ChannelConfig::default())?;
    let members: Vec<(&FockDensityMatrix, f64)> = ens.members.iter().map(|(s, w)| (s, *w)).collect();
    Ok(ensemble_chi(&sim, &members)?.chi_bits)
}

/// Parameters of one member: displacement and the number-state populations
/// it displaces (normalized on use).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberParams {
    pub alpha: [f64; 2],
    pub mixing: Vec<f64>,
}

impl MemberParams {
    pub fn coherent(alpha: Complex64) -> Self {
        MemberParams {
            alpha: [alpha.re, alpha.im],
            mixing: vec![1.0],
        }
    }

    pub fn alpha(&self) -> Complex64 {
        Complex64::new(self.alpha[0], self.alpha[1])
    }

    pub fn state(&self, dim: usize) -> Result<FockDensityMatrix> {
        displaced_diagonal_state(self.alpha(), &self.mixing, dim)
    }

}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Ensemble size `K`, at most [`MAX_MEMBERS`].
    pub members: usize,
    /// Fock truncation `D`, at most [`MAX_DIM`].
    pub dim: usize,
    pub max_iters: usize,
    /// A sweep that gains less than this (bits) counts as non-improving.
    pub tol: f64,
    /// Initial coordinate step.
    pub initial_step: f64,
    /// Number-state levels available to mixing moves (1 = coherent only).
    pub mixing_levels: usize,
    pub warm_start: WarmStart,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            members: 16,
            dim: 24,
            max_iters: 500,
            tol: 1e-6,
            initial_step: 0.1,
            mixing_levels: 3,
            warm_start: WarmStart::Auto,
            seed: 7,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.members == 0 || self.members > MAX_MEMBERS {
            return Err(domain("K", self.members as f64, "ensemble size must be in 1..=16"));
        }
        if self.dim < 2 || self.dim > MAX_DIM {
            return Err(domain("D", self.dim as f64, "Fock truncation must be in 2..=32"));
        }
        if !(self.tol > 0.0) || !(self.initial_step > 0.0) || self.mixing_levels == 0 {
            return Err(Error::InvalidEnsemble(
                "tolerance, initial step and mixing levels must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub best_chi_bits: f64,
    pub ensemble: Ensemble,
    pub member_params: Vec<MemberParams>,
    pub iterations: usize,
    pub converged: bool,
    /// `(sweep, χ)` after the warm start and after every sweep.
    pub history: Vec<(usize, f64)>,
    pub lower_bits: f64,
    pub upper_bits: f64,
}

impl OptimizationResult {
    /// `best - lower`; negative means the search stayed below the coherent rate.
    pub fn above_lower_bits(&self) -> f64 {
        self.best_chi_bits - self.lower_bits
    }

    /// `upper - best`; negative would contradict the upper bound.
    pub fn below_upper_bits(&self) -> f64 {
        self.upper_bits - self.best_chi_bits
    }

    pub fn summary(&self) -> OptimizationSummary {
        OptimizationSummary {
            best_chi_bits: self.best_chi_bits,
            lower_bits: self.lower_bits,
            upper_bits: self.upper_bits,
            above_lower_bits: self.above_lower_bits(),
            below_upper_bits: self.below_upper_bits(),
            iterations: self.iterations,
            converged: self.converged,
            mean_photons: self.ensemble.mean_photons(),
            weights: self.ensemble.weights(),
            members: self.member_params.clone(),
            history: self.history.clone(),
        }
    }
}

/// Serializable view of an [`OptimizationResult`] without the density matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationSummary {
    pub best_chi_bits: f64,
    pub lower_bits: f64,
    pub upper_bits: f64,
    pub above_lower_bits: f64,
    pub below_upper_bits: f64,
    pub iterations: usize,
    pub converged: bool,
    pub mean_photons: f64,
    pub weights: Vec<f64>,
    pub members: Vec<MemberParams>,
    pub history: Vec<(usize, f64)>,
}

/// Gauss quadrature for the probability measure `x^a e^{-x} / Γ(a+1)` on
/// `[0, ∞)`, by Golub–Welsch. Nodes ascending.
pub fn gauss_laguerre(n: usize, a: f64) -> (Vec<f64>, Vec<f64>) {
    let mut j = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        j[(i, i)] = 2.0 * i as f64 + 1.0 + a;
        if i + 1 < n {
            let off = ((i + 1) as f64 * (i as f64 + 1.0 + a)).sqrt();
            j[(i, i + 1)] = off;
            j[(i + 1, i)] = off;
        }
    }
    let eig = SymmetricEigen::new(j);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Radial layout of the warm start.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WarmStart {
    /// Gauss–Laguerre rings in `|α|²`.
    Rings,
    /// A vacuum member plus Gauss–Radau–Laguerre rings.
    CenteredRings,
    /// Whichever of the two has the larger χ; resolved by [`optimize`],
    /// treated as `CenteredRings` by [`gaussian_warm_start`].
    Auto,
}

/// `K`-point coherent ensemble discretizing the Gaussian with mean photon
/// number `n`. Both layouts put rings at quadrature nodes in `|α|²`, which
/// reproduce the mean exactly, with equally spaced, ring-staggered phases.
pub fn gaussian_warm_start(n: f64, k: usize, layout: WarmStart) -> Vec<(MemberParams, f64)> {
    let vacuum = MemberParams::coherent(Complex64::new(0.0, 0.0));
    if n == 0.0 || k == 1 {
        return vec![(vacuum, 1.0)];
    }
    let mut out = Vec::with_capacity(k);
    let (ring_points, nodes, weights) = match layout {
        WarmStart::Rings => {
            let rings = ((k as f64 / 4.0).sqrt().floor() as usize).clamp(1, k);
            let (x, w) = gauss_laguerre(rings, 0.0);
            (k, x, w)
        }
        WarmStart::CenteredRings | WarmStart::Auto => {
            let rings = (((k - 1) as f64 / 4.0).sqrt().floor() as usize).clamp(1, k - 1);
            let (x, w1) = gauss_laguerre(rings, 1.0);
            let w: Vec<f64> = x.iter().zip(&w1).map(|(x, w)| w / x).collect();
            out.push((vacuum, 1.0 - w.iter().sum::<f64>()));
            (k - 1, x, w)
        }
    };
    let rings = nodes.len();
    for (i, (x, w)) in nodes.iter().zip(&weights).enumerate() {
        let count = ring_points / rings + usize::from(i < ring_points % rings);
        let radius = (x * n).sqrt();
        for j in 0..count {
            let phase = 2.0 * PI * (j as f64 + 0.5 * i as f64) / count as f64;
            out.push((MemberParams::coherent(Complex64::from_polar(radius, phase)), w / count as f64));
        }
    }
    out
}

/// Exponential tilt `w_k ∝ w_k e^{-s n_k}` with mean exactly `target`, or
/// `None` when `target` lies outside the range of the supported `n_k`.
fn tilt(weights: &[f64], photons: &[f64], target: f64) -> Option<Vec<f64>> {
    let support = weights.iter().zip(photons).filter(|(w, _)| **w > 0.0).map(|(_, n)| *n);
    let (lo, hi) = support.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), n| (a.min(n), b.max(n)));
    if !(lo < target && target < hi) {
        return None;
    }
    let tilted = |s: f64| -> Vec<f64> {
        let logs: Vec<f64> = weights
            .iter()
            .zip(photons)
            .map(|(w, n)| if *w > 0.0 { w.ln() - s * n } else { f64::NEG_INFINITY })
            .collect();
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let raw: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
        let total: f64 = raw.iter().sum();
        raw.iter().map(|r| r / total).collect()
    };
    let mean = |w: &[f64]| -> f64 { w.iter().zip(photons).map(|(a, b)| a * b).sum() };
    // the tilted mean decreases in s
    let (mut a, mut b) = (-1.0, 1.0);
    while mean(&tilted(a)) < target && a > -1e6 {
        a *= 2.0;
    }
    while mean(&tilted(b)) > target && b < 1e6 {
        b *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mean(&tilted(mid)) > target {
            a = mid;
        } else {
            b = mid;
        }
    }
    Some(tilted(b))
}

/// Cached per-member evaluation.
#[derive(Clone)]
struct Member {
    params: MemberParams,
    state: FockDensityMatrix,
    photons: f64,
    output: DMatrix<Complex64>,
    entropy: f64,
}

struct Search<'a> {
    sim: &'a ThermalChannelSim,
    dim: usize,
    budget: f64,
    members: Vec<Member>,
    weights: Vec<f64>,
    chi: f64,
}

fn evaluate_member(sim: &ThermalChannelSim, dim: usize, params: MemberParams) -> Result<Member> {
    let state = params.state(dim)?;
    let out = sim.apply(&state)?;
    let entropy = von_neumann_entropy(&out)?;
    Ok(Member {
        photons: state.mean_photons(),
        params,
        state,
        output: out.into_matrix(),
        entropy,
    })
}

fn average_output(members: &[&Member], weights: &[f64]) -> DMatrix<Complex64> {
    let d = members[0].output.nrows();
    let mut avg = DMatrix::<Complex64>::zeros(d, d);
    for (m, w) in members.iter().zip(weights) {
        avg += m.output.map(|z| z * *w);
    }
    avg
}

fn chi_of(members: &[&Member], weights: &[f64]) -> Result<f64> {
    let avg = FockDensityMatrix::from_parts_unchecked(average_output(members, weights), 0.0);
    let conditional: f64 = members.iter().zip(weights).map(|(m, w)| w * m.entropy).sum();
    Ok(((von_neumann_entropy(&avg)? - conditional) / LN_2).max(0.0))
}

fn mean_photons(members: &[&Member], weights: &[f64]) -> f64 {
    members.iter().zip(weights).map(|(m, w)| w * m.photons).sum()
}

impl<'a> Search<'a> {
    fn refs(&self) -> Vec<&Member> {
        self.members.iter().collect()
    }

    fn feasible(&self, photons: f64) -> bool {
        photons <= self.budget + CONSTRAINT_SLACK
    }

    /// Blahut–Arimoto step `w_k ∝ w_k exp(D(σ_k‖σ̄) - s n_k)`, with `s ≥ 0`
    /// bisected so the constraint holds. Damped toward the current weights
    /// until χ does not decrease.
    fn weight_step(&mut self) -> Result<()> {
        let refs = self.refs();
        let avg = average_output(&refs, &self.weights);
        let eig = SymmetricEigen::new(avg);
        let log_avg = {
            let v = &eig.eigenvectors;
            let logs = DMatrix::from_diagonal(&eig.eigenvalues.map(|mu| Complex64::new(mu.max(1e-300).ln(), 0.0)));
            v * logs * v.adjoint()
        };
        let divergences: Vec<f64> = self
            .members
            .iter()
            .map(|m| {
                let cross: f64 = m.output.component_mul(&log_avg.transpose()).sum().re;
                -m.entropy - cross
            })
            .collect();
        let photons: Vec<f64> = self.members.iter().map(|m| m.photons).collect();
        let reweight = |s: f64| -> Vec<f64> {
            let logs: Vec<f64> = self
                .weights
                .iter()
                .zip(&divergences)
                .zip(&photons)
                .map(|((w, d), n)| if *w > 0.0 { w.ln() + d - s * n } else { f64::NEG_INFINITY })
                .collect();
            let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let raw: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
            let total: f64 = raw.iter().sum();
            raw.iter().map(|r| r / total).collect()
        };
        let usage = |w: &[f64]| -> f64 { w.iter().zip(&photons).map(|(a, b)| a * b).sum() };

        let mut proposal = reweight(0.0);
        if usage(&proposal) > self.budget {
            let mut hi = 1.0;
            while usage(&reweight(hi)) > self.budget && hi < 1e12 {
                hi *= 2.0;
            }
            if usage(&reweight(hi)) > self.budget {
                return Ok(());
            }
            let mut lo = 0.0;
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if usage(&reweight(mid)) > self.budget {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            proposal = reweight(hi);
        }
        let mut eta = 1.0;
        for _ in 0..12 {
            let trial: Vec<f64> = self
                .weights
                .iter()
                .zip(&proposal)
                .map(|(w, p)| w + eta * (p - w))
                .collect();
            if self.feasible(usage(&trial)) {
                let value = chi_of(&refs, &trial)?;
                if value >= self.chi {
                    self.weights = trial;
                    self.chi = value;
                    return Ok(());
                }
            }
            eta *= 0.5;
        }
        Ok(())
    }

    fn candidates(&self, k: usize, step: f64, levels: usize) -> Vec<MemberParams> {
        let p = &self.members[k].params;
        let mut out = Vec::new();
        for axis in 0..2 {
            for sign in [-1.0, 1.0] {
                let mut c = p.clone();
                c.alpha[axis] += sign * step;
                out.push(c);
            }
        }
        let r = p.alpha().norm();
        if r > step {
            for sign in [-1.0, 1.0] {
                let mut c = p.clone();
                let scale = (r + sign * step) / r;
                c.alpha = [p.alpha[0] * scale, p.alpha[1] * scale];
                out.push(c);
            }
        }
        let total: f64 = p.mixing.iter().sum();
        for j in 1..levels {
            let mut base: Vec<f64> = p.mixing.iter().map(|x| x / total).collect();
            base.resize(levels, 0.0);
            for sign in [-1.0, 1.0] {
                let shift = (sign * step).clamp(-base[j], base[0]);
                if shift == 0.0 {
                    continue;
                }
                let mut mixing = base.clone();
                mixing[0] -= shift;
                mixing[j] += shift;
                while mixing.len() > 1 && *mixing.last().unwrap() == 0.0 {
                    mixing.pop();
                }
                out.push(MemberParams {
                    alpha: p.alpha,
                    mixing,
                });
            }
        }
        out
    }

    /// Best χ-increasing feasible move for member `k`, if any.
    fn member_step(&mut self, k: usize, step: f64, levels: usize) -> Result<bool> {
        let candidates = self.candidates(k, step, levels);
        let sim = self.sim;
        let dim = self.dim;
        let budget = self.budget;
        let evaluated: Vec<Option<(f64, Member, Vec<f64>)>> = candidates
            .par_iter()
            .map(|cand| {
                let member = evaluate_member(sim, dim, cand.clone()).ok()?;
                let mut refs = self.refs();
                refs[k] = &member;
                let photons: Vec<f64> = refs.iter().map(|m| m.photons).collect();
                let mut options = Vec::with_capacity(2);
                if self.feasible(mean_photons(&refs, &self.weights)) {
                    options.push(self.weights.clone());
                }
                if let Some(tilted) = tilt(&self.weights, &photons, budget) {
                    options.push(tilted);
                }
                let mut best: Option<(f64, Vec<f64>)> = None;
                for w in options {
                    if !self.feasible(mean_photons(&refs, &w)) {
                        continue;
                    }
                    let value = chi_of(&refs, &w).ok()?;
                    if best.as_ref().is_none_or(|b| value > b.0) {
                        best = Some((value, w));
                    }
                }
                best.map(|(v, w)| (v, member, w))
            })
            .collect();
        let mut best: Option<(f64, Member, Vec<f64>)> = None;
        for (value, member, weights) in evaluated.into_iter().flatten() {
            if value > self.chi + 1e-15 && best.as_ref().is_none_or(|b| value > b.0) {
                best = Some((value, member, weights));
            }
        }
        match best {
            Some((value, member, weights)) => {
                self.members[k] = member;
                self.weights = weights;
                self.chi = value;
                Ok(true)
            }
            None => Ok(false),
        }
    }
}

/// Maximizes χ over `K`-member ensembles with mean photon number at most `n`.
pub fn optimize(params: &ChannelParams, n: f64, config: &OptimizerConfig) -> Result<OptimizationResult> {
    if !n.is_finite() || n < 0.0 {
        return Err(domain("N", n, "photon-number constraint must be finite and nonnegative"));
    }
    config.validate()?;
    let lower_bits = holevo_lower(params, n)?;
    let upper_bits = additive_extension_upper(params, n)?;
    let sim = ThermalChannelSim::new(*params, config.dim, ChannelConfig::default())?;

    let layouts = match config.warm_start {
        WarmStart::Auto => vec![WarmStart::Rings, WarmStart::CenteredRings],
        layout => vec![layout],
    };
    let mut best_start: Option<(f64, Vec<Member>, Vec<f64>)> = None;
    for layout in layouts {
        let start = gaussian_warm_start(n, config.members, layout);
        let members: Vec<Member> = start
            .iter()
            .map(|(p, _)| evaluate_member(&sim, config.dim, p.clone()))
            .collect::<Result<_>>()?;
        let weights: Vec<f64> = start.iter().map(|s| s.1).collect();
        let refs: Vec<&Member> = members.iter().collect();
        let value = chi_of(&refs, &weights)?;
        if best_start.as_ref().is_none_or(|b| value > b.0) {
            best_start = Some((value, members, weights));
        }
    }
    let (chi0, members, weights) = best_start.expect("at least one layout");
    let mut search = Search {
        sim: &sim,
        dim: config.dim,
        budget: n,
        members,
        weights,
        chi: chi0,
    };

    let mut history = vec![(0, chi0)];
    let mut converged = n == 0.0;
    let mut iterations = 0;
    let mut step = config.initial_step;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..config.members).collect();
    while !converged && iterations < config.max_iters {
        iterations += 1;
        let before = search.chi;
        search.weight_step()?;
        order.shuffle(&mut rng);
        for &k in &order {
            search.member_step(k, step, config.mixing_levels)?;
        }
        history.push((iterations, search.chi));
        if search.chi - before < config.tol {
            if step <= STEP_FLOOR {
                converged = true;
            }
            step = (step * 0.5).max(STEP_FLOOR);
        }
    }

    let member_params: Vec<MemberParams> = search.members.iter().map(|m| m.params.clone()).collect();
    let ensemble = Ensemble::new(
        search
            .members
            .into_iter()
            .zip(search.weights)
            .map(|(m, w)| (m.state, w))
            .collect(),
    )?;
    Ok(OptimizationResult {
        best_chi_bits: search.chi,
        ensemble,
        member_params,
        iterations,
        converged,
        history,
        lower_bits,
        upper_bits,
    })
}
