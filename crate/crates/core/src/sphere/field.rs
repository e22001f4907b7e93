use std::sync::Arc;

use super::grid::SphereGrid;
use super::harmonics::HarmonicSpectrum;
use crate::error::{ensure_finite, Error, Result};

/// Real function on S² sampled at the nodes of a [`SphereGrid`].
#[derive(Debug, Clone)]
pub struct SphereField {
    grid: Arc<SphereGrid>,
    values: Vec<f64>,
}

impl SphereField {
    pub fn new(grid: Arc<SphereGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "field has {} values, grid has {} nodes",
                values.len(),
                grid.len()
            )));
        }
        ensure_finite(&values, "sphere field")?;
        Ok(Self { grid, values })
    }

    pub fn constant(grid: &Arc<SphereGrid>, c: f64) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![c; grid.len()],
        }
    }

    /// Sample `f` at every node.
    pub fn from_fn(grid: &Arc<SphereGrid>, f: impl Fn([f64; 3]) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..grid.n_mu() {
            for j in 0..grid.n_phi() {
                values.push(f(grid.point(i, j)));
            }
        }
        Self {
            grid: grid.clone(),
            values,
        }
    }

    pub fn grid(&self) -> &Arc<SphereGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.grid.n_phi();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| f(*v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        debug_assert_eq!(self.values.len(), other.values.len());
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    /// Multiply pointwise by `g(x)` evaluated at the nodes.
    pub fn mul_fn(&self, g: impl Fn([f64; 3]) -> f64) -> Self {
        let n_phi = self.grid.n_phi();
        let mut values = self.values.clone();
        for i in 0..self.grid.n_mu() {
            for j in 0..n_phi {
                values[i * n_phi + j] *= g(self.grid.point(i, j));
            }
        }
        Self {
            grid: self.grid.clone(),
            values,
        }
    }

    pub fn shifted(&self, c: f64) -> Self {
        self.map(|v| v + c)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// ∫ f dω.
    pub fn integrate(&self) -> f64 {
        let n_phi = self.grid.n_phi();
        let weights = self.grid.mu_weights();
        let total: f64 = (0..self.grid.n_mu())
            .map(|i| {
                let row: f64 = self.values[i * n_phi..(i + 1) * n_phi].iter().sum();
                weights[i] * row
            })
            .sum();
        total / (2.0 * n_phi as f64)
    }

    /// Same as [`integrate`](Self::integrate) but rejects non-finite input,
    /// for values produced outside the checked constructors.
    pub fn try_integrate(&self) -> Result<f64> {
        ensure_finite(&self.values, "integrand")?;
        Ok(self.integrate())
    }

    /// ∫ e^f dω, returned as `(max f, ∫ e^{f − max f} dω)` so callers can
    /// form logarithms without overflow.
    pub fn exp_integral_shifted(&self) -> (f64, f64) {
        let shift = self.max();
        let n_phi = self.grid.n_phi();
        let total = (0..self.grid.n_mu())
            .map(|i| {
                let row: f64 = self.values[i * n_phi..(i + 1) * n_phi]
                    .iter()
                    .map(|v| (v - shift).exp())
                    .sum();
                self.grid.weight(i) * row
            })
            .sum();
        (shift, total)
    }

    /// ln ∫ e^f dω.
    pub fn log_exp_integral(&self) -> f64 {
        let (shift, total) = self.exp_integral_shifted();
        shift + total.ln()
    }

    pub fn spectrum(&self) -> HarmonicSpectrum {
        HarmonicSpectrum::analyze(self)
    }

    /// ∫ |∇f|² dω of the degree-≤L projection.
    pub fn dirichlet_energy(&self) -> f64 {
        self.spectrum().dirichlet_energy()
    }

    /// Spectral Laplace–Beltrami operator of the degree-≤L projection.
    pub fn laplacian(&self) -> Self {
        let spec = self.spectrum().scale_by_degree(|l| -((l * (l + 1)) as f64));
        spec.synthesize(&self.grid).expect("spectrum matches its own grid")
    }

    /// Degree-≤L projection, resampled on the grid.
    pub fn band_limited(&self) -> Self {
        self.spectrum()
            .synthesize(&self.grid)
            .expect("spectrum matches its own grid")
    }

    /// `x ↦ f(map(x))` for a band-limited `f`, evaluated through its spectrum.
    pub fn compose(&self, map: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        let spec = self.spectrum();
        let points: Vec<[f64; 3]> = self.grid.points().into_iter().map(map).collect();
        Self {
            grid: self.grid.clone(),
            values: spec.eval_many(&points),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::task_rng;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    fn grid() -> Arc<SphereGrid> {
        SphereGrid::default_grid()
    }

    pub(crate) fn random_spectrum(l_max: usize, seed: u64) -> HarmonicSpectrum {
        let mut rng = task_rng(seed, 0);
        let mut spec = HarmonicSpectrum::zeros(l_max);
        for l in 0..=l_max {
            for m in -(l as i64)..=l as i64 {
                spec.set(l, m, rng.random_range(-1.0..1.0) / (1.0 + l as f64));
            }
        }
        spec
    }

    #[test]
    fn integrate_moments() {
        let g = grid();
        assert_eq!(SphereField::constant(&g, 1.0).integrate(), 1.0);
        assert!(SphereField::from_fn(&g, |x| x[2]).integrate().abs() <= 1e-14);
        assert_abs_diff_eq!(
            SphereField::from_fn(&g, |x| x[2] * x[2]).integrate(),
            1.0 / 3.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            SphereField::from_fn(&g, |x| x[0] * x[0] * x[1] * x[1]).integrate(),
            1.0 / 15.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn non_finite_values_are_rejected() {
        let g = grid();
        let mut v = vec![0.0; g.len()];
        v[17] = f64::NAN;
        assert!(matches!(SphereField::new(g, v), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn constant_and_x3_spectra() {
        let g = grid();
        let one = SphereField::constant(&g, 1.0).spectrum();
        assert_abs_diff_eq!(one.get(0, 0), 1.0, epsilon = 1e-14);
        assert!(one.iter().skip(1).all(|(_, _, c)| c.abs() < 1e-14));

        let x3 = SphereField::from_fn(&g, |x| x[2]).spectrum();
        // direct quadrature oracle: c = ∫ x₃ · (√3 x₃) dω = √3 / 3
        let oracle = SphereField::from_fn(&g, |x| x[2] * 3f64.sqrt() * x[2]).integrate();
        assert_abs_diff_eq!(x3.get(1, 0), oracle, epsilon = 1e-14);
        assert_abs_diff_eq!(x3.get(1, 0), 1.0 / 3f64.sqrt(), epsilon = 1e-14);
        for (l, m, c) in x3.iter() {
            if (l, m) != (1, 0) {
                assert!(c.abs() < 1e-14, "({l},{m}) = {c}");
            }
        }
    }

    #[test]
    fn basis_is_orthonormal_under_quadrature() {
        let g = SphereGrid::new(8, 16, 32).unwrap();
        let l_max = 8;
        let mut fields = Vec::new();
        for l in 0..=l_max {
            for m in -(l as i64)..=l as i64 {
                let mut s = HarmonicSpectrum::zeros(l_max);
                s.set(l, m, 1.0);
                fields.push(s.synthesize(&g).unwrap());
            }
        }
        for (a, fa) in fields.iter().enumerate() {
            for (b, fb) in fields.iter().enumerate() {
                let ip = fa.zip_map(fb, |x, y| x * y).integrate();
                let expected = if a == b { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(ip, expected, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn round_trip_is_identity_on_band_limited_fields() {
        let g = grid();
        let spec = random_spectrum(32, 11);
        let f = spec.synthesize(&g).unwrap();
        let back = f.spectrum();
        let max_coeff_err = spec
            .coeffs()
            .iter()
            .zip(back.coeffs())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(max_coeff_err <= 1e-12, "{max_coeff_err}");
        let f2 = back.synthesize(&g).unwrap();
        let max_err = f.zip_map(&f2, |a, b| a - b).sup_norm();
        assert!(max_err <= 1e-12, "{max_err}");
    }

    #[test]
    fn point_evaluation_matches_grid_synthesis() {
        let g = grid();
        let spec = random_spectrum(32, 3);
        let f = spec.synthesize(&g).unwrap();
        for (k, x) in g.points().into_iter().enumerate().step_by(97) {
            assert_abs_diff_eq!(spec.eval(x), f.values()[k], epsilon = 1e-11);
        }
    }

    #[test]
    fn synthesize_rejects_oversized_spectrum() {
        let g = SphereGrid::new(8, 16, 32).unwrap();
        let spec = HarmonicSpectrum::zeros(12);
        assert!(matches!(spec.synthesize(&g), Err(Error::Config(_))));
    }

    #[test]
    fn dirichlet_energy_examples() {
        let g = grid();
        assert!(SphereField::constant(&g, 2.5).dirichlet_energy().abs() < 1e-24);
        assert_abs_diff_eq!(
            SphereField::from_fn(&g, |x| x[2]).dirichlet_energy(),
            2.0 / 3.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            SphereField::from_fn(&g, |x| x[0] * x[1]).dirichlet_energy(),
            2.0 / 5.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn laplacian_eigenvalues() {
        // Roundoff in the degree-32 coefficients is amplified by l(l+1), so
        // the 1e-12 pointwise checks run on a degree-8 grid; the default grid
        // is held to 1e-10.
        for (g, tol) in [(SphereGrid::new(8, 16, 32).unwrap(), 1e-12), (grid(), 1e-10)] {
            check_laplacian(&g, tol);
        }
    }

    fn check_laplacian(g: &Arc<SphereGrid>, tol: f64) {
        let g = g.clone();
        assert!(SphereField::constant(&g, 1.0).laplacian().sup_norm() < tol);
        let x3 = SphereField::from_fn(&g, |x| x[2]);
        let err = x3.laplacian().zip_map(&x3, |a, b| a + 2.0 * b).sup_norm();
        assert!(err <= tol, "{err}");
        let q = SphereField::from_fn(&g, |x| 3.0 * x[2] * x[2] - 1.0);
        let err = q.laplacian().zip_map(&q, |a, b| a + 6.0 * b).sup_norm();
        assert!(err <= tol, "{err}");
    }
}
