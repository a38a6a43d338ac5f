//! Gauss–Legendre nodes and the polar discretization of the isotropic
//! Gaussian distribution `p(α) = exp(-|α|²/N) / (πN)`.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Largest allowed gap between consecutive radial nodes (and the ends of
/// `[0, R]`), in units of `|α|`.
pub const MAX_RADIAL_SPACING: f64 = 0.5;
/// Smallest allowed cutoff radius in units of `√N`.
pub const MIN_RADIUS_SIGMAS: f64 = 4.0;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Radial × angular grid for the Gaussian coherent-state ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianGrid {
    pub radial_nodes: usize,
    pub angular_nodes: usize,
    /// Cutoff radius in units of `√N`.
    pub radius_sigmas: f64,
}

impl Default for GaussianGrid {
    fn default() -> Self {
        GaussianGrid {
            radial_nodes: 24,
            angular_nodes: 24,
            radius_sigmas: MIN_RADIUS_SIGMAS,
        }
    }
}

/// One ring of the discretized ensemble: all `angular_nodes` points share
/// radius and per-point weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ring {
    pub radius: f64,
    /// Weight of each point on the ring.
    pub point_weight: f64,
}

/// Discretized ensemble `{α_k, w_k}` with weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteGaussianEnsemble {
    pub rings: Vec<Ring>,
    pub angular_nodes: usize,
    pub cutoff_radius: f64,
    /// Gaussian mass beyond the cutoff, `exp(-R²/N)`.
    pub discarded_mass: f64,
}

impl DiscreteGaussianEnsemble {
    pub fn angles(&self) -> impl Iterator<Item = f64> + '_ {
        let m = self.angular_nodes as f64;
        (0..self.angular_nodes).map(move |j| 2.0 * PI * j as f64 / m)
    }

    /// All points `(α, w)`, ring-major.
    pub fn points(&self) -> Vec<(Complex64, f64)> {
        let mut out = Vec::with_capacity(self.rings.len() * self.angular_nodes);
        for ring in &self.rings {
            for theta in self.angles() {
                out.push((Complex64::from_polar(ring.radius, theta), ring.point_weight));
            }
        }
        out
    }

    pub fn max_radius(&self) -> f64 {
        self.rings.iter().map(|r| r.radius).fold(0.0, f64::max)
    }

    pub fn mean_photons(&self) -> f64 {
        self.rings
            .iter()
            .map(|r| r.radius * r.radius * r.point_weight * self.angular_nodes as f64)
            .sum()
    }
}

impl GaussianGrid {
    pub fn validate(&self) -> Result<()> {
        if self.radial_nodes == 0 || self.angular_nodes == 0 {
            return Err(Error::Grid("node counts must be positive".into()));
        }
        if !(self.radius_sigmas >= MIN_RADIUS_SIGMAS) || !self.radius_sigmas.is_finite() {
            return Err(Error::Grid(format!(
                "cutoff radius {}·√N is below the required {MIN_RADIUS_SIGMAS}·√N",
                self.radius_sigmas
            )));
        }
        Ok(())
    }

    /// Discretizes the Gaussian with mean photon number `n`. `n = 0` gives
    /// the single vacuum point.
    pub fn discretize(&self, n: f64) -> Result<DiscreteGaussianEnsemble> {
        self.validate()?;
        if !n.is_finite() || n < 0.0 {
            return Err(Error::Grid(format!("mean photon number {n} must be finite and nonnegative")));
        }
        if n == 0.0 {
            return Ok(DiscreteGaussianEnsemble {
                rings: vec![Ring {
                    radius: 0.0,
                    point_weight: 1.0,
                }],
                angular_nodes: 1,
                cutoff_radius: 0.0,
                discarded_mass: 0.0,
            });
        }
        let cutoff = self.radius_sigmas * n.sqrt();
        let (x, w) = gauss_legendre(self.radial_nodes);
        let radii: Vec<f64> = x.iter().map(|xi| 0.5 * cutoff * (xi + 1.0)).collect();

        let mut prev = 0.0;
        for &r in radii.iter().chain(std::iter::once(&cutoff)) {
            if r - prev > MAX_RADIAL_SPACING {
                return Err(Error::Grid(format!(
                    "radial spacing {:.4} exceeds {MAX_RADIAL_SPACING} (R = {cutoff:.4}, {} radial nodes)",
                    r - prev,
                    self.radial_nodes
                )));
            }
            prev = r;
        }

        // density of r is (2r/N) exp(-r²/N)
        let raw: Vec<f64> = radii
            .iter()
            .zip(&w)
            .map(|(&r, &wi)| wi * 0.5 * cutoff * (2.0 * r / n) * (-r * r / n).exp())
            .collect();
        let total: f64 = raw.iter().sum();
        let m = self.angular_nodes as f64;
        let rings = radii
            .iter()
            .zip(raw)
            .map(|(&radius, wr)| Ring {
                radius,
                point_weight: wr / total / m,
            })
            .collect();
        Ok(DiscreteGaussianEnsemble {
            rings,
            angular_nodes: self.angular_nodes,
            cutoff_radius: cutoff,
            discarded_mass: (-cutoff * cutoff / n).exp(),
        })
    }
}
