use crate::error::{domain, Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Hermiticity slack, relative to the largest entry.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;
/// Most negative eigenvalue accepted as roundoff.
pub const EIGENVALUE_FLOOR: f64 = -1e-10;

/// Dimension and guaranteed discarded weight of a truncated Fock expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationBudget {
    pub dim: usize,
    /// Upper bound on the probability weight above level `dim - 1`.
    pub tail_bound: f64,
}

impl TruncationBudget {
    /// Geometric tail of a thermal state: `P(n ≥ D) = (N/(N+1))^D`.
    pub fn thermal_tail(n: f64, dim: usize) -> f64 {
        if n == 0.0 {
            return 0.0;
        }
        (n / (n + 1.0)).powi(dim as i32)
    }

    /// Photon-number weight above the cut, `Σ_{n≥D} n p_n = q^D (D + N)`.
    pub fn thermal_photon_tail(n: f64, dim: usize) -> f64 {
        Self::thermal_tail(n, dim) * (dim as f64 + n)
    }

    /// Smallest `D` whose thermal probability and photon-number tails are
    /// both at most `tol`.
    pub fn thermal(n: f64, tol: f64) -> Result<Self> {
        check_photons(n)?;
        if !(tol > 0.0 && tol < 1.0) {
            return Err(domain("tol", tol, "must lie in (0, 1)"));
        }
        if n == 0.0 {
            return Ok(TruncationBudget {
                dim: 1,
                tail_bound: 0.0,
            });
        }
        let q = n / (n + 1.0);
        // start from the probability-tail estimate and walk up
        let mut dim = ((tol.ln() / q.ln()).ceil() as usize).max(1);
        while Self::thermal_photon_tail(n, dim) > tol {
            dim += 1;
        }
        Ok(TruncationBudget {
            dim,
            tail_bound: Self::thermal_tail(n, dim),
        })
    }

    /// Chernoff bound on the Poisson tail, `P(n ≥ D) ≤ e^{-μ} (eμ/D)^D` for
    /// `D > μ`; `1` otherwise.
    pub fn poisson_tail(mean: f64, dim: usize) -> f64 {
        let d = dim as f64;
        if mean == 0.0 {
            return 0.0;
        }
        if d <= mean {
            return 1.0;
        }
        (-mean + d * (1.0 + (mean / d).ln())).exp().min(1.0)
    }

    /// Smallest `D` with Poisson tail at most `tol` and `D ≥ 4μ`.
    pub fn coherent(mean: f64, tol: f64) -> Result<Self> {
        check_photons(mean)?;
        let mut dim = ((4.0 * mean).ceil() as usize).max(1);
        while Self::poisson_tail(mean, dim) > tol {
            dim += 1;
        }
        Ok(TruncationBudget {
            dim,
            tail_bound: Self::poisson_tail(mean, dim),
        })
    }
}

fn check_photons(n: f64) -> Result<()> {
    if !n.is_finite() || n < 0.0 {
        return Err(domain("N", n, "must be finite and nonnegative"));
    }
    Ok(())
}

/// Truncated density matrix on Fock levels `0..dim`.
///
/// `trace_deficit` bounds the probability weight the truncation removed
/// relative to the ideal infinite-dimensional state. States built from
/// unnormalized expansions (thermal) have `1 - tr ρ = trace_deficit`; renormalized
/// ones (coherent) carry trace one and the deficit as a bookkeeping bound.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDensityMatrix {
    rho: DMatrix<Complex64>,
    trace_deficit: f64,
}

impl FockDensityMatrix {
    /// Wraps `rho` after checking it is square, Hermitian and has trace within
    /// `trace_deficit` of one. Positivity is checked by [`Self::validate`].
    pub fn new(rho: DMatrix<Complex64>, trace_deficit: f64) -> Result<Self> {
        if !rho.is_square() || rho.nrows() == 0 {
            return Err(Error::UnphysicalState(format!(
                "density matrix must be square and nonempty, got {}x{}",
                rho.nrows(),
                rho.ncols()
            )));
        }
        if !(0.0..=1.0).contains(&trace_deficit) {
            return Err(Error::UnphysicalState(format!("trace deficit {trace_deficit} outside [0, 1]")));
        }
        let state = FockDensityMatrix { rho, trace_deficit };
        let herm = state.hermiticity_error();
        if herm > HERMITIAN_TOLERANCE {
            return Err(Error::UnphysicalState(format!("not Hermitian (error {herm:e})")));
        }
        let tr = state.trace();
        if (1.0 - tr).abs() > trace_deficit + 1e-12 {
            return Err(Error::UnphysicalState(format!(
                "trace {tr} not within deficit {trace_deficit:e} of 1"
            )));
        }
        Ok(state)
    }

    pub(crate) fn from_parts_unchecked(rho: DMatrix<Complex64>, trace_deficit: f64) -> Self {
        FockDensityMatrix { rho, trace_deficit }
    }

    /// `|ψ⟩⟨ψ|` for a normalized vector.
    pub fn pure(psi: &DVector<Complex64>, trace_deficit: f64) -> Result<Self> {
        Self::new(psi * psi.adjoint(), trace_deficit)
    }

    pub fn vacuum(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(domain("D", 0.0, "dimension must be at least 1"));
        }
        let mut rho = DMatrix::zeros(dim, dim);
        rho[(0, 0)] = Complex64::new(1.0, 0.0);
        Ok(FockDensityMatrix {
            rho,
            trace_deficit: 0.0,
        })
    }

    /// Diagonal state with the given level populations.
    pub fn diagonal(populations: &[f64], trace_deficit: f64) -> Result<Self> {
        if populations.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::UnphysicalState("negative or non-finite population".into()));
        }
        let dim = populations.len();
        let rho = DMatrix::from_fn(dim, dim, |i, j| {
            if i == j {
                Complex64::new(populations[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self::new(rho, trace_deficit)
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.rho
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.rho
    }

    pub fn trace_deficit(&self) -> f64 {
        self.trace_deficit
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.rho[(i, i)].re).sum()
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.rho[(i, i)].re).collect()
    }

    /// `Tr(ρ a†a)`, without dividing by the trace.
    pub fn mean_photons(&self) -> f64 {
        (0..self.dim()).map(|i| i as f64 * self.rho[(i, i)].re).sum()
    }

    /// Largest `|ρ_ij - conj(ρ_ji)|` relative to `max(1, max |ρ_ij|)`.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 1.0;
        for j in 0..d {
            for i in 0..d {
                scale = scale.max(self.rho[(i, j)].norm());
                if i < j {
                    worst = worst.max((self.rho[(i, j)] - self.rho[(j, i)].conj()).norm());
                }
            }
        }
        worst / scale
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.rho.clone().symmetric_eigenvalues().iter().copied().collect()
    }

    /// Full physicality check, including positivity.
    pub fn validate(&self) -> Result<()> {
        let min = self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min < EIGENVALUE_FLOOR {
            return Err(Error::UnphysicalState(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    /// Copy truncated or zero-padded to `dim` levels. Weight removed from the
    /// diagonal is added to the deficit.
    pub fn resized(&self, dim: usize) -> FockDensityMatrix {
        let keep = dim.min(self.dim());
        let mut rho = DMatrix::zeros(dim, dim);
        rho.view_mut((0, 0), (keep, keep))
            .copy_from(&self.rho.view((0, 0), (keep, keep)));
        let lost: f64 = (keep..self.dim()).map(|i| self.rho[(i, i)].re).sum();
        FockDensityMatrix {
            rho,
            trace_deficit: (self.trace_deficit + lost.max(0.0)).min(1.0),
        }
    }

    /// `Σ w_k ρ_k` over states of equal dimension.
    pub fn mixture(states: &[(&FockDensityMatrix, f64)]) -> Result<FockDensityMatrix> {
        let Some((first, _)) = states.first() else {
            return Err(Error::InvalidEnsemble("empty mixture".into()));
        };
        let dim = first.dim();
        let mut rho = DMatrix::zeros(dim, dim);
        let mut deficit = 0.0;
        for (state, w) in states {
            if state.dim() != dim {
                return Err(Error::InvalidEnsemble(format!(
                    "dimension mismatch {} vs {dim}",
                    state.dim()
                )));
            }
            rho += state.rho.map(|z| z * *w);
            deficit += w * state.trace_deficit;
        }
        Ok(FockDensityMatrix {
            rho,
            trace_deficit: deficit.min(1.0),
        })
    }
}

/// Thermal state `p_n = N^n / (N+1)^{n+1}` on levels `0..dim`, not
/// renormalized: the deficit is exactly `(N/(N+1))^dim`.
pub fn thermal_state(n: f64, dim: usize) -> Result<FockDensityMatrix> {
    check_photons(n)?;
    if dim == 0 {
        return Err(domain("D", 0.0, "dimension must be at least 1"));
    }
    if n == 0.0 {
        return FockDensityMatrix::vacuum(dim);
    }
    let q = n / (n + 1.0);
    let mut p = 1.0 / (n + 1.0);
    let pops: Vec<f64> = (0..dim)
        .map(|_| {
            let cur = p;
            p *= q;
            cur
        })
        .collect();
    Ok(FockDensityMatrix::from_parts_unchecked(
        DMatrix::from_diagonal(&DVector::from_iterator(
            dim,
            pops.into_iter().map(|x| Complex64::new(x, 0.0)),
        )),
        TruncationBudget::thermal_tail(n, dim),
    ))
}

/// Renormalized truncated coherent amplitudes `c_n ∝ e^{-|α|²/2} αⁿ/√n!`.
pub fn coherent_amplitudes(alpha: Complex64, dim: usize) -> Result<(DVector<Complex64>, f64)> {
    if dim == 0 {
        return Err(domain("D", 0.0, "dimension must be at least 1"));
    }
    if !alpha.re.is_finite() || !alpha.im.is_finite() {
        return Err(domain("alpha", alpha.norm(), "must be finite"));
    }
    let mean = alpha.norm_sqr();
    if mean > dim as f64 / 4.0 {
        return Err(Error::Truncation(format!(
            "|α|² = {mean} exceeds D/4 = {} for D = {dim}",
            dim as f64 / 4.0
        )));
    }
    let mut c = DVector::<Complex64>::zeros(dim);
    let mut cur = Complex64::new((-mean / 2.0).exp(), 0.0);
    for n in 0..dim {
        c[n] = cur;
        cur = cur * alpha / ((n + 1) as f64).sqrt();
    }
    let norm = c.norm();
    c /= Complex64::new(norm, 0.0);
    Ok((c, TruncationBudget::poisson_tail(mean, dim)))
}

/// Projector onto the truncated, renormalized coherent state `|α⟩`.
pub fn coherent_state(alpha: Complex64, dim: usize) -> Result<FockDensityMatrix> {
    let (c, tail) = coherent_amplitudes(alpha, dim)?;
    Ok(FockDensityMatrix::from_parts_unchecked(c.clone() * c.adjoint(), tail))
}

/// Columns `D(α)|n⟩`, `n < count`, on levels `0..dim`.
///
/// Uses `D(α)|n⟩ = (a† - ᾱ) D(α)|n-1⟩ / √n`. Because `a†` only raises the
/// level, every kept component is exact given the exact coherent amplitudes.
pub fn displaced_number_states(alpha: Complex64, count: usize, dim: usize) -> DMatrix<Complex64> {
    let mean = alpha.norm_sqr();
    let mut cols = DMatrix::<Complex64>::zeros(dim, count.max(1));
    let mut cur = Complex64::new((-mean / 2.0).exp(), 0.0);
    for k in 0..dim {
        cols[(k, 0)] = cur;
        cur = cur * alpha / ((k + 1) as f64).sqrt();
    }
    for n in 1..count {
        let inv = 1.0 / (n as f64).sqrt();
        for k in 0..dim {
            let mut v = -alpha.conj() * cols[(k, n - 1)];
            if k > 0 {
                v += cols[(k - 1, n - 1)] * (k as f64).sqrt();
            }
            cols[(k, n)] = v * inv;
        }
    }
    cols
}

/// `D(α) (Σ_n p_n |n⟩⟨n|) D(α)†`, truncated to `dim` levels and renormalized.
///
/// `mixing` holds the number-state populations before displacement; a single
/// `[1.0]` gives the coherent state.
pub fn displaced_diagonal_state(alpha: Complex64, mixing: &[f64], dim: usize) -> Result<FockDensityMatrix> {
    if mixing.is_empty() || mixing.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(Error::UnphysicalState("mixing populations must be nonnegative".into()));
    }
    let total: f64 = mixing.iter().sum();
    if total <= 0.0 {
        return Err(Error::UnphysicalState("mixing populations sum to zero".into()));
    }
    let mean = alpha.norm_sqr() + mixing.iter().enumerate().map(|(n, p)| n as f64 * p).sum::<f64>() / total;
    if mean > dim as f64 / 4.0 {
        return Err(Error::Truncation(format!(
            "mean photon number {mean} exceeds D/4 for D = {dim}"
        )));
    }
    let cols = displaced_number_states(alpha, mixing.len(), dim);
    let mut rho = DMatrix::<Complex64>::zeros(dim, dim);
    for (n, p) in mixing.iter().enumerate() {
        if *p == 0.0 {
            continue;
        }
        let col = cols.column(n);
        rho += (col * col.adjoint()).map(|z| z * (p / total));
    }
    let tr: f64 = (0..dim).map(|i| rho[(i, i)].re).sum();
    rho /= Complex64::new(tr, 0.0);
    Ok(FockDensityMatrix::from_parts_unchecked(rho, (1.0 - tr).clamp(0.0, 1.0)))
}
