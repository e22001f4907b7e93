use nalgebra::{Matrix3, Vector3};
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use super::stereo::{jacobian, stereo_lift};
use crate::error::{Error, Result};
use crate::mobius::{cross, dot, norm, scale, Rotation, Vec3};
use crate::quadrature::CompositeRule;
use crate::sphere::{HarmonicSpectrum, SphereField};

type Eval = Arc<dyn Fn([f64; 2]) -> f64 + Send + Sync>;

/// A function on R² paired with the exponent `l` of the weight
/// `(1+|y|²)^l` it is measured against.
#[derive(Clone)]
pub struct PlanarField {
    value: Eval,
    laplacian: Option<Eval>,
    l: f64,
    tag: String,
}

impl fmt::Debug for PlanarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PlanarField")
            .field("tag", &self.tag)
            .field("l", &self.l)
            .field("analytic_laplacian", &self.laplacian.is_some())
            .finish()
    }
}

impl PlanarField {
    pub fn new(l: f64, tag: impl Into<String>, f: impl Fn([f64; 2]) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            value: Arc::new(f),
            laplacian: None,
            l,
            tag: tag.into(),
        }
    }

    /// Attach a closed-form Laplacian, used instead of finite differences.
    pub fn with_laplacian(mut self, f: impl Fn([f64; 2]) -> f64 + Send + Sync + 'static) -> Self {
        self.laplacian = Some(Arc::new(f));
        self
    }

    pub fn eval(&self, y: [f64; 2]) -> f64 {
        (self.value)(y)
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    /// `(1+|y|²)^l e^{v(y)}`.
    pub fn density(&self, y: [f64; 2]) -> f64 {
        (self.l * (1.0 + y[0] * y[0] + y[1] * y[1]).ln() + self.eval(y)).exp()
    }

    /// Δv at `y`: closed form when attached, otherwise a fourth-order
    /// finite difference with step `h`.
    pub fn laplacian_at(&self, y: [f64; 2], h: f64) -> f64 {
        match &self.laplacian {
            Some(lap) => lap(y),
            None => fd_laplacian(&*self.value, y, h),
        }
    }

    /// Δv + (1+|y|²)^l e^v at `y`.
    pub fn residual(&self, y: [f64; 2], h: f64) -> f64 {
        self.laplacian_at(y, h) + self.density(y)
    }

    /// Fourth-order central-difference gradient.
    pub fn gradient(&self, y: [f64; 2], h: f64) -> [f64; 2] {
        let f = &self.value;
        let d = |e: [f64; 2]| {
            let at = |k: f64| f([y[0] + k * h * e[0], y[1] + k * h * e[1]]);
            (-at(2.0) + 8.0 * at(1.0) - 8.0 * at(-1.0) + at(-2.0)) / (12.0 * h)
        };
        [d([1.0, 0.0]), d([0.0, 1.0])]
    }

    /// Samples `(y₁, y₂, v)` on an `n × n` grid over `[−half_width, half_width]²`
    /// as CSV text.
    pub fn to_csv(&self, half_width: f64, n: usize) -> String {
        let mut out = String::from("y1,y2,value\n");
        let step = if n > 1 { 2.0 * half_width / (n - 1) as f64 } else { 0.0 };
        for i in 0..n {
            for j in 0..n {
                let y = [-half_width + i as f64 * step, -half_width + j as f64 * step];
                out.push_str(&format!("{},{},{}\n", y[0], y[1], self.eval(y)));
            }
        }
        out
    }
}

/// Fourth-order five-point-per-axis Laplacian.
pub fn fd_laplacian(f: &dyn Fn([f64; 2]) -> f64, y: [f64; 2], h: f64) -> f64 {
    let axis = |e: [f64; 2]| {
        let at = |k: f64| f([y[0] + k * h * e[0], y[1] + k * h * e[1]]);
        (-at(2.0) + 16.0 * at(1.0) - 30.0 * at(0.0) + 16.0 * at(-1.0) - at(-2.0)) / (12.0 * h * h)
    };
    axis([1.0, 0.0]) + axis([0.0, 1.0])
}

fn check_rho(rho: f64) -> Result<()> {
    if rho > 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("rho must be positive, got {rho}")))
    }
}

/// The radial solution −2ρ ln(1+|y|²) + ln(8ρ) that corresponds to u ≡ 0.
pub fn v_star(y: [f64; 2], rho: f64) -> f64 {
    -2.0 * rho * (1.0 + y[0] * y[0] + y[1] * y[1]).ln() + (8.0 * rho).ln()
}

/// [`v_star`] as a planar field with l = 2(ρ − 1) and its exact Laplacian
/// −8ρ/(1+|y|²)².
pub fn v_star_field(rho: f64) -> Result<PlanarField> {
    check_rho(rho)?;
    Ok(
        PlanarField::new(2.0 * (rho - 1.0), format!("v_star(rho={rho})"), move |y| v_star(y, rho)).with_laplacian(
            move |y| {
                let q = 1.0 + y[0] * y[0] + y[1] * y[1];
                -8.0 * rho / (q * q)
            },
        ),
    )
}

/// Liouville solution ln(8a²/(1+a²|y−c|²)²) of Δv + e^v = 0 (l = 0).
pub fn liouville_bubble(a: f64, center: [f64; 2]) -> PlanarField {
    let profile = move |y: [f64; 2]| {
        let r2 = (y[0] - center[0]).powi(2) + (y[1] - center[1]).powi(2);
        (8.0 * a * a).ln() - 2.0 * (1.0 + a * a * r2).ln()
    };
    PlanarField::new(0.0, format!("liouville(a={a}, center={center:?})"), profile).with_laplacian(move |y| {
        let r2 = (y[0] - center[0]).powi(2) + (y[1] - center[1]).powi(2);
        let q = 1.0 + a * a * r2;
        -8.0 * a * a / (q * q)
    })
}

/// Transfer a sphere field to the plane:
/// `v(y) = u(Π⁻¹y) − 2ρ ln(1+|y|²) + ln(8ρ)`, `l = 2(ρ − 1)`.
///
/// `u` is evaluated through its spectrum, and must satisfy ∫e^u dω = 1
/// (checked on its band-limited projection to 1e−8). The Laplacian is carried
/// over exactly: Δv = J(y)·(Δ_{S²}u − 2ρ) with J the area factor.
pub fn to_planar(u: &SphereField, rho: f64) -> Result<PlanarField> {
    check_rho(rho)?;
    let projected = u.band_limited();
    let mass = projected.log_exp_integral().exp();
    if (mass - 1.0).abs() > 1e-8 {
        return Err(Error::Gauge { mass });
    }
    let spec = Arc::new(projected.spectrum());
    let lap_spec = Arc::new(spec.scale_by_degree(|l| -((l * (l + 1)) as f64)));
    let constant = (8.0 * rho).ln();
    let value = {
        let spec = spec.clone();
        move |y: [f64; 2]| spec.eval(stereo_lift(y)) - 2.0 * rho * (1.0 + y[0] * y[0] + y[1] * y[1]).ln() + constant
    };
    Ok(
        PlanarField::new(2.0 * (rho - 1.0), format!("to_planar(rho={rho})"), value)
            .with_laplacian(move |y| jacobian(y) * (lap_spec.eval(stereo_lift(y)) - 2.0 * rho)),
    )
}

/// Rotate `u` so that the critical point of its spectral representation
/// nearest the grid maximum sits at the south pole, i.e. at y = 0 after
/// [`to_planar`].
pub fn critical_point_to_origin(u: &SphereField) -> SphereField {
    let grid = u.grid();
    let spec = u.spectrum();
    let start = grid
        .points()
        .into_iter()
        .zip(u.values())
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(x, _)| x)
        .unwrap_or([0.0, 0.0, -1.0]);
    let xi = refine_critical_point(&spec, start);
    let rot = Rotation::taking([0.0, 0.0, -1.0], xi);
    u.compose(|x| rot.apply(x))
}

/// Newton iteration for ∇u = 0 in the tangent plane at the current point,
/// with finite-difference derivatives of the spectral evaluation.
fn refine_critical_point(spec: &HarmonicSpectrum, start: Vec3) -> Vec3 {
    let mut x = start;
    let h = 1e-4;
    for _ in 0..20 {
        let helper = if x[0].abs() < 0.9 {
            [1.0, 0.0, 0.0]
        } else {
            [0.0, 1.0, 0.0]
        };
        let e1 = {
            let c = cross(x, helper);
            scale(c, 1.0 / norm(c))
        };
        let e2 = cross(x, e1);
        let at = |a: f64, b: f64| {
            let p = [
                x[0] + a * e1[0] + b * e2[0],
                x[1] + a * e1[1] + b * e2[1],
                x[2] + a * e1[2] + b * e2[2],
            ];
            spec.eval(scale(p, 1.0 / norm(p)))
        };
        let f0 = at(0.0, 0.0);
        let g = [
            (at(h, 0.0) - at(-h, 0.0)) / (2.0 * h),
            (at(0.0, h) - at(0.0, -h)) / (2.0 * h),
        ];
        let haa = (at(h, 0.0) - 2.0 * f0 + at(-h, 0.0)) / (h * h);
        let hbb = (at(0.0, h) - 2.0 * f0 + at(0.0, -h)) / (h * h);
        let hab = (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4.0 * h * h);
        let det = haa * hbb - hab * hab;
        if det.abs() < 1e-14 || (g[0].abs() + g[1].abs()) < 1e-13 {
            break;
        }
        let da = -(hbb * g[0] - hab * g[1]) / det;
        let db = -(haa * g[1] - hab * g[0]) / det;
        let p = [
            x[0] + da * e1[0] + db * e2[0],
            x[1] + da * e1[1] + db * e2[1],
            x[2] + da * e1[2] + db * e2[2],
        ];
        x = scale(p, 1.0 / norm(p));
        if (da.abs() + db.abs()) < 1e-12 {
            break;
        }
    }
    debug_assert!((dot(x, x) - 1.0).abs() < 1e-12);
    x
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct BetaOptions {
    /// Radius of the quadrature core.
    pub radius: f64,
    /// Gauss points per radial panel.
    pub points: usize,
    /// Trapezoid nodes in the angle.
    pub n_theta: usize,
}

impl Default for BetaOptions {
    fn default() -> Self {
        Self {
            radius: 100.0,
            points: 24,
            n_theta: 64,
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct BetaReport {
    /// (1/2π)∫(1+|y|²)^l e^v dy.
    pub beta: f64,
    pub core: f64,
    pub tail: f64,
    /// Fitted decay `m(r) ≈ e^c r^{−γ} e^{d/r²}` of the angular mean of the
    /// density.
    pub gamma: f64,
    pub c: f64,
    pub d: f64,
    /// γ + 2l, the decay rate of v itself.
    pub beta_slope: f64,
    /// Same computation with the core radius doubled.
    pub beta_double_radius: f64,
}

fn angular_mean(v: &PlanarField, r: f64, n_theta: usize) -> f64 {
    (0..n_theta)
        .map(|j| {
            let t = 2.0 * PI * j as f64 / n_theta as f64;
            v.density([r * t.cos(), r * t.sin()])
        })
        .sum::<f64>()
        / n_theta as f64
}

fn beta_at_radius(v: &PlanarField, radius: f64, opts: &BetaOptions) -> Result<(f64, f64, f64, [f64; 3])> {
    let mut breaks = vec![0.0];
    let mut b = 0.125;
    while b < radius {
        breaks.push(b);
        b *= 2.0;
    }
    breaks.push(radius);
    let rule = CompositeRule::from_breaks(&breaks, opts.points);
    let core = rule.integrate(|r| angular_mean(v, r, opts.n_theta) * r);
    let radii = [radius / 4.0, radius / 2.0, radius];
    let mut a = Matrix3::zeros();
    let mut rhs = Vector3::zeros();
    for (k, &r) in radii.iter().enumerate() {
        let m = angular_mean(v, r, opts.n_theta);
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "density is not positive and finite at r = {r}"
            )));
        }
        a[(k, 0)] = 1.0;
        a[(k, 1)] = -r.ln();
        a[(k, 2)] = 1.0 / (r * r);
        rhs[k] = m.ln();
    }
    let fit = a
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::InvalidInput("degenerate tail fit".into()))?;
    let (c, gamma, d) = (fit[0], fit[1], fit[2]);
    if gamma <= 2.0 {
        return Err(Error::DivergentMass {
            beta: gamma + 2.0 * v.l(),
            threshold: 2.0 * v.l() + 2.0,
        });
    }
    // ∫_R^∞ e^c r^{1−γ} Σ_k (d/r²)^k/k! dr
    let mut tail = 0.0;
    let mut term = 1.0;
    for k in 0..60 {
        if k > 0 {
            term *= d / (radius * radius) / k as f64;
        }
        let piece = term / (gamma - 2.0 + 2.0 * k as f64);
        tail += piece;
        if piece.abs() < 1e-18 * tail.abs() {
            break;
        }
    }
    tail *= (c + (2.0 - gamma) * radius.ln()).exp();
    Ok((core, tail, gamma, [c, gamma, d]))
}

/// β_l(v) = (1/2π)∫(1+|y|²)^l e^v dy, by polar quadrature on the disk of
/// radius `opts.radius` plus the integral of the fitted tail beyond it.
pub fn beta_l(v: &PlanarField, opts: &BetaOptions) -> Result<BetaReport> {
    if !(opts.radius >= 8.0 && opts.points >= 2 && opts.n_theta >= 4) {
        return Err(Error::Config(
            "beta quadrature needs radius >= 8, points >= 2, n_theta >= 4".into(),
        ));
    }
    let (core, tail, gamma, [c, _, d]) = beta_at_radius(v, opts.radius, opts)?;
    let (core2, tail2, _, _) = beta_at_radius(v, 2.0 * opts.radius, opts)?;
    Ok(BetaReport {
        beta: core + tail,
        core,
        tail,
        gamma,
        c,
        d,
        beta_slope: gamma + 2.0 * v.l(),
        beta_double_radius: core2 + tail2,
    })
}

/// ∫_{R²}(1+|y|²)^l e^v dy over the whole plane through r = t/(1 − t);
/// independent of the tail model in [`beta_l`].
pub fn planar_mass(v: &PlanarField, points: usize, n_theta: usize) -> f64 {
    let breaks: Vec<f64> = (0..=20).map(|k| k as f64 / 20.0).collect();
    let rule = CompositeRule::from_breaks(&breaks, points);
    2.0 * PI
        * rule.integrate(|t| {
            let r = t / (1.0 - t);
            angular_mean(v, r, n_theta) * r / ((1.0 - t) * (1.0 - t))
        })
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct PohozaevReport {
    pub l: f64,
    pub beta: f64,
    pub beta_lower: f64,
    pub beta_upper: f64,
    pub inside: bool,
}

/// The necessary window 4 < β < 4(1 + l).
pub fn pohozaev_window(l: f64, beta: f64) -> PohozaevReport {
    let (lower, upper) = (4.0, 4.0 * (1.0 + l));
    PohozaevReport {
        l,
        beta,
        beta_lower: lower,
        beta_upper: upper,
        inside: lower < beta && beta < upper,
    }
}

pub fn pohozaev_check(v: &PlanarField, opts: &BetaOptions) -> Result<PohozaevReport> {
    Ok(pohozaev_window(v.l(), beta_l(v, opts)?.beta))
}

/// φ(y) = y₂∂₁v − y₁∂₂v by fourth-order central differences of step `h`.
pub fn angular_derivative(v: &PlanarField, h: f64) -> PlanarField {
    let src = v.clone();
    PlanarField::new(v.l(), format!("angular_derivative({})", v.tag()), move |y| {
        let g = src.gradient(y, h);
        y[1] * g[0] - y[0] * g[1]
    })
}

/// Δφ + (1+|y|²)^l e^v φ, the linearization of the planar equation at `v`
/// applied to `phi`.
pub fn linearized_residual(v: &PlanarField, phi: &PlanarField, y: [f64; 2], h: f64) -> f64 {
    phi.laplacian_at(y, h) + v.density(y) * phi.eval(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mobius::Mobius;
    use crate::onofri::normalize_mass;
    use crate::sphere::SphereGrid;
    use approx::assert_abs_diff_eq;

    fn test_points() -> Vec<[f64; 2]> {
        let mut pts = Vec::new();
        for i in -6..=6 {
            for j in -6..=6 {
                pts.push([0.8 * i as f64, 0.55 * j as f64]);
            }
        }
        pts
    }

    #[test]
    fn v_star_solves_the_planar_equation() {
        for rho in [1.0, 1.25, 1.5, 1.75] {
            let v = v_star_field(rho).unwrap();
            for y in test_points() {
                assert!(v.residual(y, 0.0).abs() <= 1e-12);
                // the closed-form Laplacian agrees with finite differences
                let fd = fd_laplacian(&|p| v.eval(p), y, 1e-2);
                assert_abs_diff_eq!(fd, v.laplacian_at(y, 0.0), epsilon = 1e-6);
                assert_abs_diff_eq!(
                    v.eval(y) + 2.0 * rho * (1.0 + y[0] * y[0] + y[1] * y[1]).ln(),
                    (8.0 * rho).ln(),
                    epsilon = 1e-14
                );
            }
        }
        assert_abs_diff_eq!(v_star([0.0, 0.0], 1.5), 12f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(12f64.ln(), 2.4849, epsilon = 1e-4);
    }

    #[test]
    fn the_constant_32_pi_rho_fails_the_equation() {
        let rho: f64 = 1.5;
        let shift = (32.0 * PI * rho).ln() - (8.0 * rho).ln();
        let v = v_star_field(rho).unwrap();
        let r = v.laplacian_at([0.3, 0.1], 0.0) + (v.density([0.3, 0.1]) * shift.exp());
        assert!(r.abs() > 1.0);
    }

    #[test]
    fn beta_of_v_star_and_bubbles() {
        let opts = BetaOptions::default();
        for l in [0.0, 0.5, 1.0, 1.5] {
            let rho = 1.0 + l / 2.0;
            let b = beta_l(&v_star_field(rho).unwrap(), &opts).unwrap();
            assert_abs_diff_eq!(b.beta, 4.0 + 2.0 * l, epsilon = 1e-8);
            assert_abs_diff_eq!(b.beta_slope, 4.0 + 2.0 * l, epsilon = 1e-6);
            assert_abs_diff_eq!(b.beta_double_radius, b.beta, epsilon = 1e-9);
        }
        for a in [0.5, 1.0, 2.0] {
            let b = beta_l(&liouville_bubble(a, [0.0, 0.0]), &opts).unwrap();
            assert_abs_diff_eq!(b.beta, 4.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn divergent_tail_is_an_error() {
        let v = PlanarField::new(0.0, "slow", |y| -0.9 * (1.0 + y[0] * y[0] + y[1] * y[1]).ln());
        assert!(matches!(
            beta_l(&v, &BetaOptions::default()),
            Err(Error::DivergentMass { .. })
        ));
    }

    #[test]
    fn pohozaev_examples() {
        let opts = BetaOptions::default();
        let r = pohozaev_check(&v_star_field(1.5).unwrap(), &opts).unwrap();
        assert_eq!((r.beta_lower, r.beta_upper), (4.0, 8.0));
        assert_abs_diff_eq!(r.beta, 6.0, epsilon = 1e-8);
        assert!(r.inside);
        let r = pohozaev_check(&v_star_field(1.25).unwrap(), &opts).unwrap();
        assert_abs_diff_eq!(r.beta, 5.0, epsilon = 1e-8);
        assert_eq!(r.beta_upper, 6.0);
        assert!(r.inside);
        let synthetic = PlanarField::new(0.0, "beta 3.5", |y| {
            5.25f64.ln() - 1.75 * (1.0 + y[0] * y[0] + y[1] * y[1]).ln()
        });
        let r = pohozaev_check(&synthetic, &opts).unwrap();
        assert_abs_diff_eq!(r.beta, 3.5, epsilon = 1e-8);
        assert!(!r.inside);
    }

    #[test]
    fn mass_transfer_is_8_pi_rho() {
        let g = SphereGrid::default_grid();
        let fields = [
            SphereField::from_fn(&g, |x| 0.4 * x[2] - 0.3 * x[0] * x[1]),
            SphereField::from_fn(&g, |x| 0.8 * x[0] + 0.2 * (3.0 * x[2] * x[2] - 1.0)),
            SphereField::from_fn(&g, |x| Mobius::new([0.2, 0.1, 0.4]).log_jacobian(x)),
        ];
        for (u, rho) in fields.iter().zip([1.5, 1.2, 1.8]) {
            let v = to_planar(&normalize_mass(u), rho).unwrap();
            assert_abs_diff_eq!(planar_mass(&v, 24, 64), 8.0 * PI * rho, epsilon = 1e-7);
        }
    }

    #[test]
    fn to_planar_of_zero_is_v_star_and_gauge_is_checked() {
        let g = SphereGrid::default_grid();
        let v = to_planar(&SphereField::constant(&g, 0.0), 1.5).unwrap();
        assert_eq!(v.l(), 1.0);
        for y in test_points() {
            assert_abs_diff_eq!(v.eval(y), v_star(y, 1.5), epsilon = 1e-13);
        }
        let unnormalized = SphereField::constant(&g, 0.5);
        assert!(matches!(to_planar(&unnormalized, 1.5), Err(Error::Gauge { .. })));
    }

    #[test]
    fn planar_residual_is_the_transferred_sphere_residual() {
        // for any u: Δv + (1+|y|²)^l e^v = J(y)·(Δu + 2ρ(e^u − 1))(Π⁻¹y)
        let g = SphereGrid::default_grid();
        let rho = 1.4;
        let u = normalize_mass(&SphereField::from_fn(&g, |x| 0.3 * x[2] + 0.2 * x[0] * x[1]));
        let v = to_planar(&u, rho).unwrap();
        let spec = u.spectrum();
        let lap = spec.scale_by_degree(|l| -((l * (l + 1)) as f64));
        for y in test_points() {
            let x = stereo_lift(y);
            let sphere = lap.eval(x) + 2.0 * rho * (spec.eval(x).exp() - 1.0);
            assert_abs_diff_eq!(v.residual(y, 0.0), jacobian(y) * sphere, epsilon = 1e-9);
            let fd = fd_laplacian(&|p| v.eval(p), y, 1e-2) + v.density(y);
            assert_abs_diff_eq!(fd, v.residual(y, 0.0), epsilon = 1e-6);
        }
    }

    #[test]
    fn angular_derivative_examples() {
        let v = v_star_field(1.3).unwrap();
        let phi = angular_derivative(&v, 1e-3);
        for y in test_points() {
            assert!(phi.eval(y).abs() <= 1e-10);
        }
        let lin = PlanarField::new(0.0, "y1", |y| y[0]);
        let phi = angular_derivative(&lin, 1e-3);
        for y in test_points() {
            assert_abs_diff_eq!(phi.eval(y), y[1], epsilon = 1e-10);
        }
        // off-center bubble: φ ≠ 0 and solves the linearized equation
        let v = liouville_bubble(1.0, [0.5, -0.3]);
        let phi = angular_derivative(&v, 1e-3);
        assert!(phi.eval([1.0, 1.0]).abs() > 0.1);
        for y in test_points().into_iter().filter(|y| y[0].hypot(y[1]) <= 5.0) {
            assert!(linearized_residual(&v, &phi, y, 1e-2).abs() <= 1e-4, "{y:?}");
        }
    }

    #[test]
    fn angular_derivative_norm_is_rotation_invariant() {
        let v = liouville_bubble(1.3, [0.6, 0.2]);
        let (s, c) = 0.9f64.sin_cos();
        let rotated = {
            let v = v.clone();
            PlanarField::new(0.0, "rotated", move |y| {
                v.eval([c * y[0] + s * y[1], -s * y[0] + c * y[1]])
            })
        };
        let norm_sq = |f: &PlanarField| -> f64 {
            let phi = angular_derivative(f, 1e-4);
            let rule = CompositeRule::from_breaks(&[0.0, 1.0, 2.0, 4.0], 20);
            rule.integrate(|r| {
                (0..128)
                    .map(|j| {
                        let t = 2.0 * PI * j as f64 / 128.0;
                        phi.eval([r * t.cos(), r * t.sin()]).powi(2)
                    })
                    .sum::<f64>()
                    * r
            })
        };
        assert_abs_diff_eq!(norm_sq(&v), norm_sq(&rotated), epsilon = 1e-7 * norm_sq(&v));
    }

    #[test]
    fn critical_point_moves_to_origin() {
        let g = SphereGrid::default_grid();
        // conformal factor with its maximum at −a/|a|
        let t = Mobius::new([0.3, -0.2, 0.1]);
        let u = normalize_mass(&SphereField::from_fn(&g, |x| t.log_jacobian(x)));
        let moved = critical_point_to_origin(&u);
        let v = to_planar(&normalize_mass(&moved), 1.0).unwrap();
        let grad = v.gradient([0.0, 0.0], 1e-5);
        assert!(grad[0].abs() < 1e-7 && grad[1].abs() < 1e-7, "{grad:?}");
        // the rotated conformal factor is radial about the origin
        let phi = angular_derivative(&v, 1e-4);
        for y in test_points().into_iter().filter(|y| y[0].hypot(y[1]) <= 5.0) {
            assert!(phi.eval(y).abs() < 1e-6);
        }
    }

    #[test]
    fn csv_export() {
        let csv = v_star_field(1.0).unwrap().to_csv(1.0, 3);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "y1,y2,value");
        assert_eq!(lines.len(), 10);
        assert!(lines[5].starts_with("0,0,"));
    }
}
