use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::harmonics::{normalized_legendre, tri_len};
use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;

pub const DEFAULT_BAND_LIMIT: usize = 32;
pub const DEFAULT_N_MU: usize = 64;
pub const DEFAULT_N_PHI: usize = 128;

/// Gauss–Legendre nodes in μ = cos θ times uniform nodes in φ.
///
/// Shared read-only between fields through an `Arc`.
pub struct SphereGrid {
    n_mu: usize,
    n_phi: usize,
    band_limit: usize,
    mu_nodes: Vec<f64>,
    mu_weights: Vec<f64>,
    /// P̄_l^m(μ_i) for every ring, row `i` of length `tri_len(L)`.
    legendre: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for SphereGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SphereGrid")
            .field("n_mu", &self.n_mu)
            .field("n_phi", &self.n_phi)
            .field("band_limit", &self.band_limit)
            .finish()
    }
}

impl SphereGrid {
    pub fn new(band_limit: usize, n_mu: usize, n_phi: usize) -> Result<Arc<Self>> {
        if n_mu < band_limit + 1 {
            return Err(Error::Config(format!(
                "n_mu = {n_mu} cannot represent degree {band_limit} (need n_mu >= L + 1)"
            )));
        }
        if n_phi < 2 * band_limit + 1 {
            return Err(Error::Config(format!(
                "n_phi = {n_phi} aliases degree {band_limit} (need n_phi >= 2L + 1)"
            )));
        }
        let (mu_nodes, mut mu_weights) = gauss_legendre(n_mu);
        // Absorb the last-ulp error of Σ w into the final weight so ∫1 dω
        // sums to exactly 1 (2 − partial is exact by Sterbenz).
        let partial: f64 = mu_weights[..n_mu - 1].iter().sum();
        mu_weights[n_mu - 1] = 2.0 - partial;
        let row = tri_len(band_limit);
        let mut legendre = vec![0.0; n_mu * row];
        for (i, &mu) in mu_nodes.iter().enumerate() {
            normalized_legendre(band_limit, mu, &mut legendre[i * row..(i + 1) * row]);
        }
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n_phi);
        let inverse = planner.plan_fft_inverse(n_phi);
        Ok(Arc::new(Self {
            n_mu,
            n_phi,
            band_limit,
            mu_nodes,
            mu_weights,
            legendre,
            forward,
            inverse,
        }))
    }

    /// L = 32 on a 64 × 128 grid.
    pub fn default_grid() -> Arc<Self> {
        Self::new(DEFAULT_BAND_LIMIT, DEFAULT_N_MU, DEFAULT_N_PHI).expect("default grid is valid")
    }

    /// Smallest grid that integrates products of two degree-`band_limit`
    /// fields exactly.
    pub fn for_band_limit(band_limit: usize) -> Result<Arc<Self>> {
        Self::new(band_limit, 2 * band_limit.max(1), 4 * band_limit.max(1))
    }

    pub fn n_mu(&self) -> usize {
        self.n_mu
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    pub fn len(&self) -> usize {
        self.n_mu * self.n_phi
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn band_limit(&self) -> usize {
        self.band_limit
    }

    pub fn mu_nodes(&self) -> &[f64] {
        &self.mu_nodes
    }

    pub fn mu_weights(&self) -> &[f64] {
        &self.mu_weights
    }

    pub fn phi(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.n_phi as f64
    }

    /// Cartesian coordinates of node `(i, j)`.
    pub fn point(&self, i: usize, j: usize) -> [f64; 3] {
        let mu = self.mu_nodes[i];
        let s = (1.0 - mu * mu).max(0.0).sqrt();
        let phi = self.phi(j);
        [s * phi.cos(), s * phi.sin(), mu]
    }

    pub fn points(&self) -> Vec<[f64; 3]> {
        let mut out = Vec::with_capacity(self.len());
        for i in 0..self.n_mu {
            for j in 0..self.n_phi {
                out.push(self.point(i, j));
            }
        }
        out
    }

    /// Quadrature weight of node `(i, ·)` under the probability measure dω.
    pub fn weight(&self, i: usize) -> f64 {
        self.mu_weights[i] / (2.0 * self.n_phi as f64)
    }

    pub(crate) fn legendre_row(&self, i: usize) -> &[f64] {
        let row = tri_len(self.band_limit);
        &self.legendre[i * row..(i + 1) * row]
    }

    pub(crate) fn fft_forward(&self, buf: &mut [Complex64]) {
        self.forward.process(buf);
    }

    pub(crate) fn fft_inverse(&self, buf: &mut [Complex64]) {
        self.inverse.process(buf);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rejects_aliasing_configurations() {
        assert!(matches!(SphereGrid::new(32, 20, 128), Err(Error::Config(_))));
        assert!(matches!(SphereGrid::new(32, 64, 64), Err(Error::Config(_))));
    }

    #[test]
    fn weights_and_points() {
        let g = SphereGrid::default_grid();
        assert_abs_diff_eq!(g.mu_weights().iter().sum::<f64>(), 2.0, epsilon = 1e-14);
        let total: f64 = (0..g.n_mu()).map(|i| g.weight(i) * g.n_phi() as f64).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-14);
        for x in g.points() {
            assert_abs_diff_eq!(x[0] * x[0] + x[1] * x[1] + x[2] * x[2], 1.0, epsilon = 1e-14);
        }
    }
}
