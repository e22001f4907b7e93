//! Radial solutions of Δv + (1+|y|²)^l e^v = 0 by shooting from the origin.
//!
//! In the radial variable the equation reads v'' + v'/r + (1+r²)^l e^v = 0
//! with v(0) = s and v'(0) = 0. The mass m(r) = ∫₀^r ρ(1+ρ²)^l e^v dρ is
//! carried as a third component; it equals −r v'(r) and tends to β.

mod curve;

pub use curve::{
    beta_curve, curve_csv, solutions_at_beta, uniqueness_window, BetaRow, RootReport, UniquenessReport, CURVE_SAMPLES,
};

use ode_solvers::{Dopri5, OutputType, System, Vector3};
use serde::Serialize;

use crate::error::{Error, Result};

/// Radius of the series start.
pub const R0: f64 = 1e-4;
/// Radius used by curve sweeps when none is given.
pub const DEFAULT_R_MAX: f64 = 1e4;
/// Radii tried in turn by [`shoot_resolved`].
pub const R_MAX_LADDER: [f64; 5] = [1e4, 1e6, 1e8, 1e10, 1e12];
/// Local tolerance used by curve sweeps when none is given.
pub const DEFAULT_TOL: f64 = 1e-12;
/// Required agreement of the two β estimators.
pub const BETA_AGREEMENT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ShotVerdict {
    /// Integrable tail and both β estimators agree.
    Finite,
    /// m(r_max) ≤ 2l + 2: the tail is not integrable at r_max.
    DivergentMass,
    /// Integrable tail, but the estimators disagree beyond [`BETA_AGREEMENT`].
    Unresolved,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RadialSolution {
    pub l: f64,
    pub s: f64,
    pub r_max: f64,
    pub verdict: ShotVerdict,
    /// Mass integral at r_max plus analytic tail.
    pub beta_mass: f64,
    /// −r v'(r) extrapolated from r_max/4, r_max/2, r_max.
    pub beta_slope: f64,
    /// c in v ≈ −β ln r + c.
    pub c_asym: f64,
    pub steps: usize,
    #[serde(skip)]
    pub r_grid: Vec<f64>,
    #[serde(skip)]
    pub values: Vec<f64>,
    #[serde(skip)]
    pub slopes: Vec<f64>,
}

impl RadialSolution {
    pub fn beta(&self) -> f64 {
        self.beta_mass
    }

    pub fn accepted(&self) -> bool {
        self.verdict == ShotVerdict::Finite
    }

    /// v at radius r by cubic Hermite interpolation of the stored profile.
    pub fn value_at(&self, r: f64) -> f64 {
        let n = self.r_grid.len();
        let k = self.r_grid.partition_point(|&x| x < r).clamp(1, n - 1);
        let (r0, r1) = (self.r_grid[k - 1], self.r_grid[k]);
        let h = r1 - r0;
        let t = ((r - r0) / h).clamp(0.0, 1.0);
        let (v0, v1) = (self.values[k - 1], self.values[k]);
        let (d0, d1) = (self.slopes[k - 1] * h, self.slopes[k] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * v0 + (t3 - 2.0 * t2 + t) * d0 + (-2.0 * t3 + 3.0 * t2) * v1 + (t3 - t2) * d1
    }

    /// Profile as `r,v` CSV.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,v\n");
        for (r, v) in self.r_grid.iter().zip(&self.values) {
            out.push_str(&format!("{r:.17e},{v:.17e}\n"));
        }
        out
    }
}

/// (v, v', m) against r.
struct Inner {
    l: f64,
}

impl System<f64, Vector3<f64>> for Inner {
    fn system(&self, r: f64, y: &Vector3<f64>, dy: &mut Vector3<f64>) {
        let f = (y[0] + self.l * (1.0 + r * r).ln()).exp();
        dy[0] = y[1];
        dy[1] = -y[1] / r - f;
        dy[2] = r * f;
    }
}

/// (v, dv/dt, m) against t = ln r.
struct Outer {
    l: f64,
}

impl System<f64, Vector3<f64>> for Outer {
    fn system(&self, t: f64, y: &Vector3<f64>, dy: &mut Vector3<f64>) {
        let e = (y[0] + 2.0 * t + self.l * (2.0 * t).exp().ln_1p()).exp();
        dy[0] = y[1];
        dy[1] = -e;
        dy[2] = e;
    }
}

fn run<S: System<f64, Vector3<f64>>>(
    sys: S,
    a: f64,
    b: f64,
    y: Vector3<f64>,
    tol: f64,
) -> Result<(Vec<f64>, Vec<Vector3<f64>>)> {
    let mut solver = Dopri5::from_param(
        sys,
        a,
        b,
        0.0,
        y,
        tol,
        tol,
        0.9,
        0.04,
        0.2,
        10.0,
        (b - a).abs(),
        0.0,
        1_000_000,
        1000,
        OutputType::Sparse,
    );
    solver.integrate().map_err(|e| Error::Integration(format!("{e:?}")))?;
    Ok((solver.x_out().clone(), solver.y_out().clone()))
}

/// ∫_R^∞ r(1+r²)^l (r/R)^{−γ} dr via the binomial series of (1+r⁻²)^l.
fn tail_integral(l: f64, gamma: f64, r: f64) -> f64 {
    let mut sum = 0.0;
    let mut binom = 1.0;
    for k in 0..40 {
        let p = 2.0 + 2.0 * l - 2.0 * k as f64 - gamma;
        let term = binom * r.powf(p + gamma) / -p;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
        binom *= (l - k as f64) / (k as f64 + 1.0);
        if binom == 0.0 {
            break;
        }
    }
    sum
}

/// Tail mass beyond R for v(r) ≈ v_R − β ln(r/R) + (β − m_R)(1 − (r/R)^{−κ})/κ.
fn tail_mass(l: f64, beta: f64, m_r: f64, v_r: f64, r: f64) -> f64 {
    let kappa = beta - 2.0 - 2.0 * l;
    let lead = tail_integral(l, beta, r);
    let corr = (beta - m_r) / kappa * (lead - tail_integral(l, beta + kappa, r));
    v_r.exp() * (lead + corr)
}

/// Shoot from v(0) = s to r_max with local tolerance `tol`.
pub fn shoot(l: f64, s: f64, r_max: f64, tol: f64) -> Result<RadialSolution> {
    if !(l >= 0.0) || !s.is_finite() {
        return Err(Error::InvalidInput(format!(
            "shooting needs l ≥ 0 and finite s (l = {l}, s = {s})"
        )));
    }
    if !(r_max >= 50.0) || !(tol > 0.0) {
        return Err(Error::InvalidInput(format!(
            "shooting needs r_max ≥ 50 and tol > 0 (r_max = {r_max}, tol = {tol})"
        )));
    }
    let es = s.exp();
    let a = -es / 4.0;
    let b = -es * (l - es / 4.0) / 16.0;
    let y0 = Vector3::new(
        s + a * R0 * R0 + b * R0.powi(4),
        2.0 * a * R0 + 4.0 * b * R0.powi(3),
        es * (R0 * R0 / 2.0 + (l - es / 4.0) * R0.powi(4) / 4.0),
    );
    let mut r_grid = vec![0.0];
    let mut values = vec![s];
    let mut slopes = vec![0.0];
    let (rs, ys) = run(Inner { l }, R0, 1.0, y0, tol)?;
    let mut steps = rs.len();
    for (r, y) in rs.iter().zip(&ys) {
        r_grid.push(*r);
        values.push(y[0]);
        slopes.push(y[1]);
    }
    let last = ys[ys.len() - 1];
    let mut y = Vector3::new(last[0], last[1], last[2]);
    // Samples of (v, dv/dt, m) at R/4, R/2, R for the estimators.
    let t_end = r_max.ln();
    let marks = [t_end - 2.0 * 2f64.ln(), t_end - 2f64.ln(), t_end];
    let mut samples = Vec::with_capacity(3);
    let mut t = 0.0;
    for &mark in &marks {
        if mark > t {
            let (ts, ys) = run(Outer { l }, t, mark, y, tol)?;
            steps += ts.len();
            for (tt, yy) in ts.iter().zip(&ys).skip(1) {
                let r = tt.exp();
                r_grid.push(r);
                values.push(yy[0]);
                slopes.push(yy[1] / r);
            }
            y = ys[ys.len() - 1];
            t = mark;
        }
        samples.push(y);
    }
    let (v_r, m_r) = (y[0], y[2]);
    let slope_at = |k: usize| -samples[k][1];
    let mut sol = RadialSolution {
        l,
        s,
        r_max,
        verdict: ShotVerdict::DivergentMass,
        beta_mass: m_r,
        beta_slope: slope_at(2),
        c_asym: f64::NAN,
        steps,
        r_grid,
        values,
        slopes,
    };
    if !(m_r > 2.0 + 2.0 * l) {
        return Ok(sol);
    }
    let mut beta = m_r;
    for _ in 0..100 {
        let next = m_r + tail_mass(l, beta, m_r, v_r, r_max);
        let done = (next - beta).abs() <= 1e-15 * next;
        beta = next;
        if done {
            break;
        }
    }
    let (b0, b1, b2) = (slope_at(0), slope_at(1), slope_at(2));
    let denom = (b2 - b1) - (b1 - b0);
    let slope = if denom.abs() > 1e-300 {
        b2 - (b2 - b1).powi(2) / denom
    } else {
        b2
    };
    let kappa = beta - 2.0 - 2.0 * l;
    sol.beta_mass = beta;
    sol.beta_slope = slope;
    sol.c_asym = v_r + beta * t_end + (beta - m_r) / kappa;
    sol.verdict = if (beta - slope).abs() <= BETA_AGREEMENT {
        ShotVerdict::Finite
    } else {
        ShotVerdict::Unresolved
    };
    Ok(sol)
}

/// Shoot with r_max climbing [`R_MAX_LADDER`] until the estimators agree.
/// Slowly decaying tails (β close to 2l + 2) need the larger radii.
pub fn shoot_resolved(l: f64, s: f64, tol: f64) -> Result<RadialSolution> {
    let mut last = None;
    for r_max in R_MAX_LADDER {
        let sol = shoot(l, s, r_max, tol)?;
        if sol.accepted() {
            return Ok(sol);
        }
        last = Some(sol);
    }
    Ok(last.expect("ladder is nonempty"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn liouville_profile_is_reproduced() {
        let sol = shoot(0.0, 8f64.ln(), 1e3, 1e-12).unwrap();
        let err = sol
            .r_grid
            .iter()
            .zip(&sol.values)
            .map(|(r, v)| (v - (8.0 / (1.0 + r * r).powi(2)).ln()).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-8, "sup error {err:.3e}");
        assert!(sol.accepted());
        assert_abs_diff_eq!(sol.beta_mass, 4.0, epsilon = 1e-8);
        assert_abs_diff_eq!(sol.c_asym, 8f64.ln(), epsilon = 1e-6);
    }

    #[test]
    fn v_star_anchor_at_l_one() {
        let sol = shoot(1.0, 12f64.ln(), DEFAULT_R_MAX, 1e-12).unwrap();
        assert!(sol.accepted(), "{sol:?}");
        assert_abs_diff_eq!(sol.beta_mass, 6.0, epsilon = 1e-6);
        assert_abs_diff_eq!(sol.beta_slope, 6.0, epsilon = 1e-6);
        for r in [0.5, 2.0, 30.0] {
            assert_abs_diff_eq!(sol.value_at(r), 12f64.ln() - 3.0 * (1.0 + r * r).ln(), epsilon = 1e-6);
        }
    }

    #[test]
    fn liouville_scaling_family() {
        for s in [-2.0, 0.0, 2.0] {
            let sol = shoot(0.0, s, DEFAULT_R_MAX, 1e-12).unwrap();
            assert!(sol.accepted(), "{sol:?}");
            assert_abs_diff_eq!(sol.beta_mass, 4.0, epsilon = 1e-6);
            assert_abs_diff_eq!(sol.beta_slope, 4.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn v_star_anchors_for_several_l() {
        for l in [0.5, 1.0, 1.5, 2.0, 3.0] {
            let rho: f64 = 1.0 + l / 2.0;
            let sol = shoot(l, (8.0 * rho).ln(), DEFAULT_R_MAX, 1e-12).unwrap();
            assert!(sol.accepted(), "l = {l}: {sol:?}");
            assert_abs_diff_eq!(sol.beta_mass, 4.0 + 2.0 * l, epsilon = 1e-6);
        }
    }

    #[test]
    fn halving_tolerance_moves_anchor_beta_below_1e_8() {
        for (l, s) in [(0.0, 8f64.ln()), (1.0, 12f64.ln())] {
            let a = shoot(l, s, DEFAULT_R_MAX, 1e-12).unwrap().beta_mass;
            let b = shoot(l, s, DEFAULT_R_MAX, 5e-13).unwrap().beta_mass;
            assert!((a - b).abs() <= 1e-8, "l = {l}: {a} vs {b}");
        }
    }

    #[test]
    fn slow_tails_resolve_on_larger_radii() {
        assert!(!shoot(1.0, 7.0, 1e4, 1e-12).unwrap().accepted());
        let sol = shoot_resolved(1.0, 7.0, 1e-12).unwrap();
        assert!(sol.accepted());
        assert!(sol.r_max > 1e4);
    }

    #[test]
    fn invalid_inputs() {
        assert!(shoot(-0.5, 0.0, 100.0, 1e-10).is_err());
        assert!(shoot(0.0, 0.0, 10.0, 1e-10).is_err());
        assert!(shoot(0.0, f64::NAN, 100.0, 1e-10).is_err());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let sol = shoot(0.0, 0.0, 100.0, 1e-10).unwrap();
        let csv = sol.to_csv();
        assert!(csv.starts_with("r,v\n"));
        assert_eq!(csv.lines().count(), sol.r_grid.len() + 1);
    }
}
