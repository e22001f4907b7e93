use proptest::prelude::*;
use std::f64::consts::PI;
use std::sync::Arc;

use onofri_core::bridge::{
    angular_derivative, first_eigenvalue, nodal_domains, planar_mass, stereo_lift, stereo_map, to_planar, v_star_field,
    DiskGrid, Domain, EigenOptions, PlanarField,
};
use onofri_core::mobius::Rotation;
use onofri_core::onofri::{
    el_residual, gradient_j, j_alpha, minimize, normalize_mass, quadratic_form, recenter, MinimizeOptions,
};
use onofri_core::shooting::shoot_resolved;
use onofri_core::sphere::{HarmonicSpectrum, SphereField, SphereGrid};

/// Coefficients for degrees 0..=4.
const LOW: usize = 25;

fn grid() -> Arc<SphereGrid> {
    SphereGrid::default_grid()
}

fn field(coeffs: &[f64]) -> SphereField {
    let mut s = HarmonicSpectrum::zeros(grid().band_limit());
    s.coeffs_mut()[..coeffs.len()].copy_from_slice(coeffs);
    s.synthesize(&grid()).unwrap()
}

fn coeffs(amplitude: f64) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-amplitude..amplitude, LOW)
}

fn liouville(y: [f64; 2]) -> f64 {
    8f64.ln() - 2.0 * (1.0 + y[0] * y[0] + y[1] * y[1]).ln()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn j_is_shift_invariant(c in coeffs(0.5), shift in -10.0f64..10.0, alpha in 0.5f64..2.0) {
        let u = field(&c);
        let d = j_alpha(&u.shifted(shift), alpha).unwrap() - j_alpha(&u, alpha).unwrap();
        prop_assert!(d.abs() <= 1e-12, "{d}");
    }

    #[test]
    fn j_is_rotation_invariant(c in coeffs(0.5), axis in proptest::array::uniform3(-1.0f64..1.0),
                               angle in 0.0f64..6.28, alpha in 0.5f64..2.0) {
        prop_assume!(axis.iter().map(|a| a * a).sum::<f64>() > 1e-2);
        let r = Rotation::about_axis(axis, angle);
        let u = field(&c);
        let d = j_alpha(&u.compose(|x| r.apply(x)), alpha).unwrap() - j_alpha(&u, alpha).unwrap();
        prop_assert!(d.abs() <= 1e-10, "{d}");
    }

    #[test]
    fn gradient_matches_directional_difference(c in coeffs(0.5), h in coeffs(1.0), alpha in 0.5f64..2.0) {
        let (u, h) = (field(&c), field(&h));
        let eps = 1e-5;
        let at = |t: f64| j_alpha(&u.zip_map(&h, |a, b| a + t * b), alpha).unwrap();
        let fd = (at(eps) - at(-eps)) / (2.0 * eps);
        let analytic = gradient_j(&u, alpha).unwrap().zip_map(&h, |a, b| a * b).integrate();
        prop_assume!(analytic.abs() > 1e-3);
        prop_assert!(((fd - analytic) / analytic).abs() <= 1e-6, "{fd} vs {analytic}");
    }

    #[test]
    fn quadratic_form_gap_above_degree_one(c in coeffs(1.0), alpha in 0.1f64..2.0) {
        let mut s = HarmonicSpectrum::zeros(4);
        s.coeffs_mut().copy_from_slice(&c);
        for x in &mut s.coeffs_mut()[..4] {
            *x = 0.0;
        }
        let mass: f64 = s.coeffs_mut().iter().map(|x| x * x).sum();
        prop_assert!(quadratic_form(&s, alpha) >= (6.0 * alpha - 2.0) / 4.0 * mass - 1e-12);
    }

    #[test]
    fn stereo_round_trip(theta in 0.0f64..6.28, z in -1.0f64..0.9) {
        let r = (1.0 - z * z).sqrt();
        let x = [r * theta.cos(), r * theta.sin(), z];
        let back = stereo_lift(stereo_map(x).unwrap());
        for k in 0..3 {
            prop_assert!((back[k] - x[k]).abs() <= 1e-14);
        }
    }

    #[test]
    fn radial_fields_have_no_angular_derivative(rho in 1.0f64..3.0, y in proptest::array::uniform2(-5.0f64..5.0)) {
        let v = v_star_field(rho).unwrap();
        prop_assert!(angular_derivative(&v, 1e-3).eval(y).abs() <= 1e-10);
    }

    #[test]
    fn angular_derivative_commutes_with_rotation(angle in 0.0f64..6.28, y in proptest::array::uniform2(-3.0f64..3.0)) {
        let f = |y: [f64; 2]| y[0] * y[0] * y[1] - 0.3 * y[1] + (-(y[0] - 0.5).powi(2)).exp();
        let (s, c) = angle.sin_cos();
        let rot = move |y: [f64; 2]| [c * y[0] - s * y[1], s * y[0] + c * y[1]];
        let v = PlanarField::new(1.0, "f", f);
        let vr = PlanarField::new(1.0, "f∘R", move |y| f(rot(y)));
        let a = angular_derivative(&vr, 1e-3).eval(y);
        let b = angular_derivative(&v, 1e-3).eval(rot(y));
        prop_assert!((a - b).abs() <= 1e-8, "{a} vs {b}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn recentering_preserves_j_at_one(c in coeffs(0.3)) {
        let u = field(&c);
        let r = recenter(&u, 1e-10).unwrap();
        let d = j_alpha(&r.u, 1.0).unwrap() - j_alpha(&u, 1.0).unwrap();
        prop_assert!(d.abs() <= 1e-8, "{d}");
    }

    #[test]
    fn stationary_minima_solve_euler_lagrange(c in coeffs(0.5), alpha in 0.67f64..1.5) {
        let r = minimize(alpha, &field(&c), &MinimizeOptions::default()).unwrap();
        if r.grad_norm <= 1e-8 {
            prop_assert!(el_residual(&r.u, 1.0 / alpha).unwrap() <= 1e-6);
        }
    }

    #[test]
    fn planar_mass_is_eight_pi_rho(c in coeffs(0.3), rho in 1.0f64..2.0) {
        let v = to_planar(&normalize_mass(&field(&c)), rho).unwrap();
        let target = 8.0 * PI * rho;
        prop_assert!((planar_mass(&v, 24, 64) - target).abs() <= 1e-6 * target);
    }

    #[test]
    fn nodal_masses_partition_the_total(a in -1.0f64..1.0, b in -1.0f64..1.0, q in -1.0f64..1.0, rho in 1.0f64..2.0) {
        let f = move |y: [f64; 2]| a * y[0] + b * y[1] + q * (y[0] * y[0] - y[1] * y[1]) - 0.1;
        let v = v_star_field(rho).unwrap();
        let r = nodal_domains(f, DiskGrid { radius: 2.0, n: 80 }, None, Some(&v), Some(rho)).unwrap();
        prop_assert!(r.masses().iter().all(|m| *m >= 0.0));
        let sum = r.masses().iter().sum::<f64>() + r.nodal_set_mass;
        prop_assert!((sum - r.total).abs() <= 1e-10 * r.total);
    }

    #[test]
    fn first_eigenvalue_decreases_under_inclusion(r1 in 0.5f64..2.0, grow in 0.1f64..1.0) {
        let opts = EigenOptions::default();
        let small = first_eigenvalue(&liouville, &Domain::Disk { radius: r1 }, &opts).unwrap();
        let large = first_eigenvalue(&liouville, &Domain::Disk { radius: r1 + grow }, &opts).unwrap();
        prop_assert!(large.lambda1 <= small.lambda1 + 1e-6, "{} > {}", large.lambda1, small.lambda1);
    }

    #[test]
    fn accepted_shots_are_consistent_and_in_window(l in 0.25f64..2.5, s in -3.0f64..6.0) {
        let sol = shoot_resolved(l, s, 1e-12).unwrap();
        if sol.accepted() {
            prop_assert!((sol.beta_mass - sol.beta_slope).abs() <= 1e-6);
            prop_assert!(4.0 + 1e-6 < sol.beta_mass && sol.beta_mass < 4.0 * (1.0 + l) - 1e-6, "{sol:?}");
        }
    }
}
