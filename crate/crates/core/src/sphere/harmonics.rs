//! Real spherical harmonics orthonormal under the probability measure dω.
//!
//! `Y_l^0 = P̄_l(μ)`, `Y_l^m = √2 P̄_l^m(μ) cos mφ` and
//! `Y_l^{-m} = √2 P̄_l^m(μ) sin mφ` for `m > 0`, where `P̄_l^m` is scaled so
//! that `½∫₋₁¹ (P̄_l^m)² dμ = 1`. With this choice `Y_0^0 = 1` and
//! `Y_1^0 = √3 x₃`.

use std::f64::consts::SQRT_2;
use std::sync::Arc;

use rustfft::num_complex::Complex64;

use super::field::SphereField;
use super::grid::SphereGrid;
use crate::error::{Error, Result};

pub(crate) fn tri_len(l_max: usize) -> usize {
    (l_max + 1) * (l_max + 2) / 2
}

/// Index of `(l, m)`, `0 ≤ m ≤ l`, in a packed lower triangle.
pub(crate) fn tri_index(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

/// Fill `out[tri_index(l, m)]` with `P̄_l^m(μ)` for `l ≤ l_max`.
pub(crate) fn normalized_legendre(l_max: usize, mu: f64, out: &mut [f64]) {
    let s = (1.0 - mu * mu).max(0.0).sqrt();
    let mut pmm = 1.0;
    for m in 0..=l_max {
        if m > 0 {
            let mf = m as f64;
            pmm *= ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * s;
        }
        out[tri_index(m, m)] = pmm;
        if m == l_max {
            break;
        }
        let mf = m as f64;
        let mut p_prev = pmm;
        let mut p = (2.0 * mf + 3.0).sqrt() * mu * pmm;
        out[tri_index(m + 1, m)] = p;
        for l in (m + 2)..=l_max {
            let lf = l as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0)).sqrt();
            let next = a * (mu * p - b * p_prev);
            p_prev = p;
            p = next;
            out[tri_index(l, m)] = p;
        }
    }
}

/// Coefficients `c[l, m]`, `|m| ≤ l ≤ L`, in the dω-orthonormal real basis.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicSpectrum {
    band_limit: usize,
    coeffs: Vec<f64>,
}

impl HarmonicSpectrum {
    pub fn zeros(band_limit: usize) -> Self {
        Self {
            band_limit,
            coeffs: vec![0.0; (band_limit + 1) * (band_limit + 1)],
        }
    }

    pub fn band_limit(&self) -> usize {
        self.band_limit
    }

    pub fn get(&self, l: usize, m: i64) -> f64 {
        self.coeffs[slot(l, m)]
    }

    pub fn set(&mut self, l: usize, m: i64, value: f64) {
        let k = slot(l, m);
        self.coeffs[k] = value;
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    /// Iterate `(l, m, c)` over all stored coefficients.
    pub fn iter(&self) -> impl Iterator<Item = (usize, i64, f64)> + '_ {
        (0..=self.band_limit).flat_map(move |l| (-(l as i64)..=l as i64).map(move |m| (l, m, self.coeffs[slot(l, m)])))
    }

    /// Σ l(l+1) c², the Dirichlet energy ∫|∇f|² dω of the synthesized field.
    pub fn dirichlet_energy(&self) -> f64 {
        self.iter().map(|(l, _, c)| (l * (l + 1)) as f64 * c * c).sum()
    }

    /// Σ c² = ∫ f² dω.
    pub fn l2_norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    /// Σ_m c[l, m]² for one degree.
    pub fn degree_norm_sq(&self, l: usize) -> f64 {
        (-(l as i64)..=l as i64).map(|m| self.get(l, m).powi(2)).sum()
    }

    /// Multiply every degree-`l` block by `f(l)`.
    pub fn scale_by_degree(&self, f: impl Fn(usize) -> f64) -> Self {
        let mut out = self.clone();
        for l in 0..=self.band_limit {
            let s = f(l);
            for m in -(l as i64)..=l as i64 {
                out.coeffs[slot(l, m)] *= s;
            }
        }
        out
    }

    /// H¹ norm, √Σ (1 + l(l+1)) c².
    pub fn h1_norm(&self) -> f64 {
        self.iter()
            .map(|(l, _, c)| (1 + l * (l + 1)) as f64 * c * c)
            .sum::<f64>()
            .sqrt()
    }

    /// Project `field` onto degrees `≤ L` of its grid.
    pub fn analyze(field: &SphereField) -> Self {
        let grid = field.grid();
        let l_max = grid.band_limit();
        let n_phi = grid.n_phi();
        let mut out = Self::zeros(l_max);
        let mut buf = vec![Complex64::new(0.0, 0.0); n_phi];
        for i in 0..grid.n_mu() {
            for (b, v) in buf.iter_mut().zip(field.row(i)) {
                *b = Complex64::new(*v, 0.0);
            }
            grid.fft_forward(&mut buf);
            let w = grid.mu_weights()[i];
            let row = grid.legendre_row(i);
            let scale0 = 0.5 * w / n_phi as f64;
            let scale = SQRT_2 * 0.5 * w / n_phi as f64;
            for m in 0..=l_max {
                let f = buf[m];
                for l in m..=l_max {
                    let p = row[tri_index(l, m)];
                    if m == 0 {
                        out.coeffs[slot(l, 0)] += scale0 * p * f.re;
                    } else {
                        out.coeffs[slot(l, m as i64)] += scale * p * f.re;
                        out.coeffs[slot(l, -(m as i64))] -= scale * p * f.im;
                    }
                }
            }
        }
        out
    }

    /// Evaluate on `grid`; fails if the spectrum exceeds the grid's band limit.
    pub fn synthesize(&self, grid: &Arc<SphereGrid>) -> Result<SphereField> {
        if self.band_limit > grid.band_limit() {
            return Err(Error::Config(format!(
                "spectrum degree {} exceeds grid band limit {}",
                self.band_limit,
                grid.band_limit()
            )));
        }
        let n_phi = grid.n_phi();
        let mut values = vec![0.0; grid.len()];
        let mut buf = vec![Complex64::new(0.0, 0.0); n_phi];
        for i in 0..grid.n_mu() {
            buf.iter_mut().for_each(|b| *b = Complex64::new(0.0, 0.0));
            let row = grid.legendre_row(i);
            for m in 0..=self.band_limit {
                let mut a = 0.0;
                let mut b = 0.0;
                for l in m..=self.band_limit {
                    let p = row[tri_index(l, m)];
                    a += self.coeffs[slot(l, m as i64)] * p;
                    if m > 0 {
                        b += self.coeffs[slot(l, -(m as i64))] * p;
                    }
                }
                buf[m] = if m == 0 {
                    Complex64::new(a, 0.0)
                } else {
                    Complex64::new(SQRT_2 * a, -SQRT_2 * b) * 0.5
                };
            }
            // Re Σ_m G_m e^{imφ}: split the m > 0 terms into ±m halves so the
            // inverse transform is real.
            for m in 1..=self.band_limit {
                buf[n_phi - m] = buf[m].conj();
            }
            grid.fft_inverse(&mut buf);
            for (v, b) in values[i * n_phi..(i + 1) * n_phi].iter_mut().zip(&buf) {
                *v = b.re;
            }
        }
        SphereField::new(grid.clone(), values)
    }

    /// Point evaluation at a unit vector.
    pub fn eval(&self, x: [f64; 3]) -> f64 {
        let l_max = self.band_limit;
        let mut plm = vec![0.0; tri_len(l_max)];
        self.eval_with_scratch(x, &mut plm)
    }

    pub(crate) fn eval_with_scratch(&self, x: [f64; 3], plm: &mut [f64]) -> f64 {
        let l_max = self.band_limit;
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        let mu = (x[2] / r).clamp(-1.0, 1.0);
        let phi = x[1].atan2(x[0]);
        normalized_legendre(l_max, mu, plm);
        let (s1, c1) = phi.sin_cos();
        let mut total = 0.0;
        let (mut cm, mut sm) = (1.0, 0.0);
        for m in 0..=l_max {
            let mut a = 0.0;
            let mut b = 0.0;
            for l in m..=l_max {
                let p = plm[tri_index(l, m)];
                a += self.coeffs[slot(l, m as i64)] * p;
                if m > 0 {
                    b += self.coeffs[slot(l, -(m as i64))] * p;
                }
            }
            total += if m == 0 { a } else { SQRT_2 * (a * cm + b * sm) };
            let next_c = cm * c1 - sm * s1;
            sm = sm * c1 + cm * s1;
            cm = next_c;
        }
        total
    }

    /// Evaluate at many points, reusing the Legendre scratch buffer.
    pub fn eval_many(&self, points: &[[f64; 3]]) -> Vec<f64> {
        let mut plm = vec![0.0; tri_len(self.band_limit)];
        points.iter().map(|x| self.eval_with_scratch(*x, &mut plm)).collect()
    }
}

#[inline]
fn slot(l: usize, m: i64) -> usize {
    debug_assert!(m.unsigned_abs() as usize <= l);
    ((l * l + l) as i64 + m) as usize
}
