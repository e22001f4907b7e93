use serde::Serialize;

use crate::error::{Error, Result};
use crate::mobius::Vec3;
use crate::sphere::{HarmonicSpectrum, SphereField};

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("alpha must be positive, got {alpha}")))
    }
}

/// J_α(u) = (α/4)∫|∇u|² dω + ∫u dω − ln ∫e^u dω.
///
/// The logarithm is formed after subtracting max u, so large fields do not
/// overflow.
pub fn j_alpha(u: &SphereField, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(j_alpha_with_energy(u, alpha, u.dirichlet_energy()))
}

pub(crate) fn j_alpha_with_energy(u: &SphereField, alpha: f64, energy: f64) -> f64 {
    0.25 * alpha * energy + u.integrate() - u.log_exp_integral()
}

/// First variation g = −(α/2)Δu + 1 − e^u / ∫e^u dω, so that
/// d/dt J_α(u + t h)|₀ = ∫ g h dω.
pub fn gradient_j(u: &SphereField, alpha: f64) -> Result<SphereField> {
    check_alpha(alpha)?;
    let log_mass = u.log_exp_integral();
    let lap = u.laplacian();
    Ok(lap.zip_map(u, |d, v| -0.5 * alpha * d + 1.0 - (v - log_mass).exp()))
}

/// (∫e^u x dω) / ∫e^u dω.
pub fn center_of_mass(u: &SphereField) -> Vec3 {
    let shift = u.max();
    let density = u.map(|v| (v - shift).exp());
    let mass = density.integrate();
    let mut com = [0.0; 3];
    for (k, c) in com.iter_mut().enumerate() {
        *c = density.mul_fn(|x| x[k]).integrate() / mass;
    }
    com
}

/// u − ln ∫e^u dω, the representative with ∫e^u dω = 1.
pub fn normalize_mass(u: &SphereField) -> SphereField {
    u.shifted(-u.log_exp_integral())
}

/// L²(dω) norm of Δu + 2ρ(e^u − 1) after normalizing ∫e^u dω = 1.
pub fn el_residual(u: &SphereField, rho: f64) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::InvalidInput(format!("rho must be positive, got {rho}")));
    }
    let u = normalize_mass(u);
    let lap = u.laplacian();
    let r = lap.zip_map(&u, |d, v| d + 2.0 * rho * (v.exp() - 1.0));
    Ok(r.map(|x| x * x).integrate().sqrt())
}

/// Exact second-order Taylor coefficient of J_α at u = 0 along `v`:
/// (α/4)∫|∇v|² − ½∫v² + ½(∫v)² = (α/4)Σ l(l+1)c² − ½Σ_{l≥1} c².
pub fn quadratic_form(v: &HarmonicSpectrum, alpha: f64) -> f64 {
    v.iter()
        .filter(|(l, _, _)| *l >= 1)
        .map(|(l, _, c)| (0.25 * alpha * (l * (l + 1)) as f64 - 0.5) * c * c)
        .sum()
}

/// H¹ and L² norms of a field through its spectrum.
#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct FieldNorms {
    pub h1: f64,
    pub l2: f64,
}

pub fn field_norms(u: &SphereField) -> FieldNorms {
    let s = u.spectrum();
    FieldNorms {
        h1: s.h1_norm(),
        l2: s.l2_norm_sq().sqrt(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mobius::{Mobius, Rotation};
    use crate::rng::task_rng;
    use crate::sphere::SphereGrid;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use std::sync::Arc;

    fn grid() -> Arc<SphereGrid> {
        SphereGrid::default_grid()
    }

    fn random_field(grid: &Arc<SphereGrid>, degree: usize, amp: f64, seed: u64) -> SphereField {
        let mut rng = task_rng(seed, 1);
        let mut s = HarmonicSpectrum::zeros(grid.band_limit());
        for l in 1..=degree {
            for m in -(l as i64)..=l as i64 {
                s.set(l, m, amp * rng.random_range(-1.0..1.0) / l as f64);
            }
        }
        s.synthesize(grid).unwrap()
    }

    #[test]
    fn j_at_zero_and_invalid_alpha() {
        let g = grid();
        let zero = SphereField::constant(&g, 0.0);
        for alpha in [0.3, 1.0, 2.0] {
            assert_eq!(j_alpha(&zero, alpha).unwrap(), 0.0);
        }
        assert!(matches!(j_alpha(&zero, 0.0), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn onofri_extremals_have_zero_j() {
        let g = grid();
        for s in [0.2, 0.5] {
            let t = Mobius::new([0.0, 0.0, s]);
            let u = SphereField::from_fn(&g, |x| t.log_jacobian(x));
            assert!(j_alpha(&u, 1.0).unwrap().abs() <= 1e-8);
        }
    }

    #[test]
    fn taylor_expansion_along_x3() {
        let g = grid();
        let eps = 0.05;
        let u = SphereField::from_fn(&g, |x| eps * x[2]);
        let alpha = 0.5;
        let oracle = (alpha - 1.0) / 6.0 * eps * eps;
        assert_abs_diff_eq!(oracle, -2.0833e-4, epsilon = 1e-8);
        assert_abs_diff_eq!(j_alpha(&u, alpha).unwrap(), oracle, epsilon = 5e-6);
    }

    #[test]
    fn shift_and_rotation_invariance() {
        let g = grid();
        let u = random_field(&g, 6, 0.8, 2);
        let j = j_alpha(&u, 0.7).unwrap();
        assert_abs_diff_eq!(j_alpha(&u.shifted(3.7), 0.7).unwrap(), j, epsilon = 1e-12);
        let mut rng = task_rng(9, 0);
        for _ in 0..3 {
            let r = Rotation::random(&mut rng);
            let ur = u.compose(|x| r.apply(x));
            assert_abs_diff_eq!(j_alpha(&ur, 0.7).unwrap(), j, epsilon = 1e-10);
        }
    }

    #[test]
    fn large_fields_do_not_overflow() {
        let g = grid();
        let u = SphereField::from_fn(&g, |x| 800.0 + x[2]);
        let j = j_alpha(&u, 1.0).unwrap();
        let small = j_alpha(&SphereField::from_fn(&g, |x| x[2]), 1.0).unwrap();
        assert_abs_diff_eq!(j, small, epsilon = 1e-12);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let g = grid();
        for seed in 0..3 {
            let u = random_field(&g, 8, 0.7, 10 + seed);
            let h = random_field(&g, 8, 1.0, 20 + seed);
            let alpha = 0.8;
            let step = 1e-5;
            let jp = j_alpha(&u.zip_map(&h, |a, b| a + step * b), alpha).unwrap();
            let jm = j_alpha(&u.zip_map(&h, |a, b| a - step * b), alpha).unwrap();
            let fd = (jp - jm) / (2.0 * step);
            let analytic = gradient_j(&u, alpha).unwrap().zip_map(&h, |a, b| a * b).integrate();
            assert!(((fd - analytic) / analytic).abs() <= 1e-6, "fd {fd} vs {analytic}");
        }
    }

    #[test]
    fn gradient_at_zero_and_linearization() {
        let g = grid();
        let zero = SphereField::constant(&g, 0.0);
        assert!(gradient_j(&zero, 0.6).unwrap().sup_norm() < 1e-15);
        let eps = 1e-4;
        let alpha = 0.6;
        let u = SphereField::from_fn(&g, |x| eps * x[2]);
        let grad = gradient_j(&u, alpha).unwrap();
        let lin = SphereField::from_fn(&g, |x| eps * (alpha - 1.0) * x[2]);
        assert!(grad.zip_map(&lin, |a, b| a - b).sup_norm() <= 10.0 * eps * eps);
    }

    #[test]
    fn center_of_mass_examples() {
        let g = grid();
        let c = center_of_mass(&SphereField::constant(&g, 0.0));
        assert!(c.iter().all(|v| v.abs() <= 1e-14));
        let eps = 0.01;
        let c = center_of_mass(&SphereField::from_fn(&g, |x| eps * x[2]));
        assert!(c[0].abs() < 1e-15 && c[1].abs() < 1e-15);
        assert_abs_diff_eq!(c[2], eps / 3.0, epsilon = 1e-6);
    }

    #[test]
    fn center_of_mass_is_rotation_equivariant() {
        let g = grid();
        let u = random_field(&g, 5, 1.0, 4);
        let com = center_of_mass(&u);
        let r = Rotation::random(&mut task_rng(12, 0));
        let rotated = center_of_mass(&u.compose(|x| r.apply(x)));
        let expected = r.transpose().apply(com);
        for k in 0..3 {
            assert_abs_diff_eq!(rotated[k], expected[k], epsilon = 1e-10);
        }
    }

    #[test]
    fn el_residual_examples() {
        let g = grid();
        assert!(el_residual(&SphereField::constant(&g, 0.0), 1.5).unwrap() < 1e-15);
        let eps = 0.01;
        let rho = 1.5;
        let oracle = 2.0 * eps * (rho - 1.0) / 3f64.sqrt();
        assert_abs_diff_eq!(oracle, 5.7735e-3, epsilon = 1e-7);
        let r = el_residual(&SphereField::from_fn(&g, |x| eps * x[2]), rho).unwrap();
        assert_abs_diff_eq!(r, oracle, epsilon = 1e-4);
        // conformal factors solve the ρ = 1 equation exactly
        let t = Mobius::new([0.1, -0.2, 0.3]);
        let u = SphereField::from_fn(&g, |x| t.log_jacobian(x));
        assert!(el_residual(&u, 1.0).unwrap() < 1e-10);
    }

    #[test]
    fn quadratic_form_examples() {
        let g = grid();
        let x1x2 = SphereField::from_fn(&g, |x| x[0] * x[1]).spectrum();
        let mass = x1x2.l2_norm_sq();
        assert_abs_diff_eq!(mass, 1.0 / 15.0, epsilon = 1e-15);
        for alpha in [0.2, 1.0 / 3.0, 0.7] {
            assert_abs_diff_eq!(
                quadratic_form(&x1x2, alpha),
                mass * (1.5 * alpha - 0.5),
                epsilon = 1e-14
            );
        }
        assert!(quadratic_form(&x1x2, 1.0 / 3.0).abs() < 1e-15);
        let x3 = SphereField::from_fn(&g, |x| x[2]).spectrum();
        for alpha in [0.5, 1.0, 1.5] {
            assert_abs_diff_eq!(quadratic_form(&x3, alpha), (alpha - 1.0) / 6.0, epsilon = 1e-14);
        }
        assert!(quadratic_form(&SphereField::constant(&g, 4.0).spectrum(), 0.7).abs() < 1e-12);
    }

    #[test]
    fn quadratic_form_is_the_taylor_coefficient() {
        let g = grid();
        let v = SphereField::from_fn(&g, |x| x[0] * x[2] + 0.5 * (x[1] * x[1] - x[0] * x[0]));
        let alpha = 0.55;
        let q = quadratic_form(&v.spectrum(), alpha);
        for t in [1e-2, 1e-3] {
            let j = j_alpha(&v.map(|x| t * x), alpha).unwrap();
            assert!(((j - t * t * q) / (t * t)).abs() < 2.0 * t, "t = {t}");
        }
    }

    #[test]
    fn quadratic_form_gap_above_degree_one() {
        let mut rng = task_rng(33, 0);
        for _ in 0..20 {
            let mut s = HarmonicSpectrum::zeros(10);
            for l in 2..=10 {
                for m in -(l as i64)..=l as i64 {
                    s.set(l, m, rng.random_range(-1.0..1.0));
                }
            }
            let tail: f64 = (2..=10).map(|l| s.degree_norm_sq(l)).sum();
            for alpha in [0.4, 0.66, 1.0] {
                assert!(quadratic_form(&s, alpha) >= (6.0 * alpha - 2.0) / 4.0 * tail - 1e-12);
            }
        }
    }
}
