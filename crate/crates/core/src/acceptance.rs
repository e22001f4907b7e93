//! The verification suite: thirteen numbered criteria, each reduced to a
//! pass/fail row with the measured quantities attached.

use serde::Serialize;
use serde_json::{json, Value};
use std::f64::consts::PI;

use crate::axisym::{axisym_probe, i_functional, minimize_axisym, random_axial, LegendreBasis, LegendreFunction};
use crate::bridge::{
    beta_l, bol_audit, domain_mass, first_eigenvalue, mass_ledger, nodal_domains, planar_mass, to_planar, v_star_field,
    BetaOptions, BolOptions, BolVerdict, DiskGrid, Domain, EigenOptions, Region,
};
use crate::exec::{map_indexed, Execution};
use crate::mobius::Mobius;
use crate::onofri::{
    el_residual, j_alpha, minimize, normalize_mass, random_start, second_variation, two_bubble_probe, MinimizeOptions,
    Mode, ProbeVerdict, START_AMPLITUDE, START_DEGREE,
};
use crate::rng::task_rng;
use crate::shooting::{beta_curve, shoot_resolved, solutions_at_beta, ShotVerdict, DEFAULT_TOL};
use crate::sphere::{SphereField, SphereGrid};

pub const SPECTRAL_QUADRATURE_TOL: f64 = 1e-12;
pub const SPECTRAL_EIGEN_TOL: f64 = 1e-10;
pub const ONOFRI_STARTS: usize = 20;
pub const ONOFRI_J_RANGE: (f64, f64) = (-1e-6, 1e-3);
pub const ONOFRI_H1_TOL: f64 = 1e-3;
pub const AUBIN_ALPHAS: [f64; 5] = [2.0 / 3.0, 0.70, 0.75, 0.80, 0.90];
pub const AUBIN_STARTS: usize = 10;
pub const MIN_J_FLOOR: f64 = -1e-6;
pub const EL_RESIDUAL_TOL: f64 = 1e-5;
pub const PROBE_ALPHA: f64 = 0.45;
pub const PROBE_FLOOR: f64 = -10.0;
pub const BRIDGE_LS: [f64; 3] = [0.5, 1.0, 1.5];
pub const BRIDGE_BETA_TOL: f64 = 1e-8;
pub const BRIDGE_RESIDUAL_TOL: f64 = 1e-10;
pub const BRIDGE_MASS_TOL: f64 = 1e-7;
pub const FLAT_BETA_TOL: f64 = 1e-6;
pub const ESTIMATOR_TOL: f64 = 1e-6;
pub const POHOZAEV_MARGIN: f64 = 1e-6;
pub const WINDOW_I_LS: [f64; 2] = [0.5, 1.0];
pub const WINDOW_I_TARGETS: [f64; 5] = [4.5, 5.0, 5.5, 6.0, 6.5];
pub const WINDOW_II_L: f64 = 2.0;
pub const WINDOW_II_TARGETS: [f64; 3] = [5.0, 6.0, 7.0];
pub const ANCHOR_LS: [f64; 4] = [0.5, 1.0, 1.5, 2.0];
pub const ANCHOR_TOL: f64 = 1e-6;
pub const S_BRACKET: [f64; 2] = [-4.0, 8.0];
pub const ROOT_TOL: f64 = 1e-10;
pub const BESSEL_J01_SQ: f64 = 5.783185962946784;
pub const BESSEL_TOL: f64 = 1e-3;
pub const LIOUVILLE_LAMBDA_TOL: f64 = 1e-3;
pub const LIOUVILLE_MASS_TOL: f64 = 1e-6;
pub const BOL_SHIFT: f64 = 0.05;
pub const NODAL_PARTITION_TOL: f64 = 1e-8;
pub const THRESHOLD_TOL: f64 = 1e-3;
pub const AXISYM_ALPHAS: [f64; 3] = [0.5, 0.55, 0.6];
pub const AXISYM_STARTS: usize = 20;
pub const LIFT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CriterionResult {
    pub id: u32,
    pub name: String,
    pub pass: bool,
    pub detail: String,
    pub measured: Value,
}

impl CriterionResult {
    fn new(id: u32, name: &str, pass: bool, detail: String, measured: Value) -> Self {
        Self {
            id,
            name: name.to_string(),
            pass,
            detail,
            measured,
        }
    }

    fn error(id: u32, name: &str, e: impl std::fmt::Display) -> Self {
        Self::new(id, name, false, format!("error: {e}"), Value::Null)
    }

    /// `criterion N: pass|FAIL  name  (detail)`.
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2}: {}  {}  ({})",
            self.id,
            if self.pass { "pass" } else { "FAIL" },
            self.name,
            self.detail
        )
    }
}

/// Disjoint task streams per criterion.
fn stream(criterion: u64, cell: usize) -> u64 {
    criterion * 1_000_000 + cell as u64
}

fn max_abs(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn liouville(y: [f64; 2]) -> f64 {
    8f64.ln() - 2.0 * (1.0 + y[0] * y[0] + y[1] * y[1]).ln()
}

pub fn spectral_core() -> CriterionResult {
    let name = "spectral core";
    let g = SphereGrid::default_grid();
    let q = SphereField::from_fn(&g, |x| x[2] * x[2]).integrate();
    let quad_err = (q - 1.0 / 3.0).abs();
    let deg1: [fn([f64; 3]) -> f64; 3] = [|x| x[0], |x| x[1], |x| x[2]];
    let deg2: [fn([f64; 3]) -> f64; 5] = [
        |x| 3.0 * x[2] * x[2] - 1.0,
        |x| x[0] * x[2],
        |x| x[1] * x[2],
        |x| x[0] * x[1],
        |x| x[0] * x[0] - x[1] * x[1],
    ];
    let eig = |f: fn([f64; 3]) -> f64, lambda: f64| {
        let u = SphereField::from_fn(&g, f);
        max_abs(
            u.laplacian()
                .values()
                .iter()
                .zip(u.values())
                .map(|(a, b)| a + lambda * b),
        )
    };
    let e1 = max_abs(deg1.iter().map(|f| eig(*f, 2.0)));
    let e2 = max_abs(deg2.iter().map(|f| eig(*f, 6.0)));
    let pass = quad_err <= SPECTRAL_QUADRATURE_TOL && e1 <= SPECTRAL_EIGEN_TOL && e2 <= SPECTRAL_EIGEN_TOL;
    CriterionResult::new(
        1,
        name,
        pass,
        format!("|∫x₃² − 1/3| = {quad_err:.2e}, max|Δf + 2f| = {e1:.2e}, max|Δf + 6f| = {e2:.2e}"),
        json!({"quadrature_error": quad_err, "degree1_error": e1, "degree2_error": e2}),
    )
}

pub fn onofri_inequality(seed: u64, exec: Execution) -> CriterionResult {
    let name = "Onofri inequality at alpha = 1";
    let g = SphereGrid::default_grid();
    let opts = MinimizeOptions::default();
    let cells: Vec<usize> = (0..ONOFRI_STARTS).collect();
    let out = map_indexed(exec, &cells, |_, &k| {
        let u0 = random_start(&g, START_DEGREE, START_AMPLITUDE, &mut task_rng(seed, stream(2, k)));
        minimize(1.0, &u0, &opts).map(|r| r.summary())
    });
    let mut rows = Vec::new();
    for r in out {
        match r {
            Ok(s) => rows.push(s),
            Err(e) => return CriterionResult::error(2, name, e),
        }
    }
    let js: Vec<f64> = rows.iter().map(|s| s.j_value).collect();
    let h1 = rows.iter().map(|s| s.h1_norm).fold(0.0, f64::max);
    let (lo, hi) = ONOFRI_J_RANGE;
    let pass = js.iter().all(|j| (lo..=hi).contains(j)) && h1 <= ONOFRI_H1_TOL;
    let jmin = js.iter().copied().fold(f64::INFINITY, f64::min);
    let jmax = js.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    CriterionResult::new(
        2,
        name,
        pass,
        format!(
            "{} starts, J ∈ [{jmin:.2e}, {jmax:.2e}], max ‖u‖_H¹ = {h1:.2e}",
            rows.len()
        ),
        json!({"j_values": js, "max_h1": h1, "verdicts": rows.iter().map(|s| s.verdict).collect::<Vec<_>>()}),
    )
}

pub fn aubin_range(seed: u64, exec: Execution) -> CriterionResult {
    let name = "minima in the Aubin range";
    let g = SphereGrid::default_grid();
    let opts = MinimizeOptions::default();
    let jobs: Vec<(f64, usize)> = AUBIN_ALPHAS
        .iter()
        .flat_map(|&a| (0..AUBIN_STARTS).map(move |t| (a, t)))
        .collect();
    let out = map_indexed(exec, &jobs, |k, &(alpha, _)| -> crate::Result<(f64, f64)> {
        let u0 = random_start(&g, START_DEGREE, START_AMPLITUDE, &mut task_rng(seed, stream(3, k)));
        let r = minimize(alpha, &u0, &opts)?;
        Ok((r.j_value, el_residual(&r.u, 1.0 / alpha)?))
    });
    let mut per_alpha = Vec::new();
    let mut pass = true;
    for (i, &alpha) in AUBIN_ALPHAS.iter().enumerate() {
        let mut min_j = f64::INFINITY;
        let mut max_res: f64 = 0.0;
        for r in &out[i * AUBIN_STARTS..(i + 1) * AUBIN_STARTS] {
            match r {
                Ok((j, res)) => {
                    min_j = min_j.min(*j);
                    max_res = max_res.max(*res);
                }
                Err(e) => return CriterionResult::error(3, name, e),
            }
        }
        pass &= min_j >= MIN_J_FLOOR && max_res <= EL_RESIDUAL_TOL;
        per_alpha.push(json!({"alpha": alpha, "min_j": min_j, "max_el_residual": max_res}));
    }
    let worst_j = per_alpha
        .iter()
        .map(|v| v["min_j"].as_f64().unwrap_or(f64::NAN))
        .fold(f64::INFINITY, f64::min);
    let worst_r = per_alpha
        .iter()
        .map(|v| v["max_el_residual"].as_f64().unwrap_or(f64::NAN))
        .fold(0.0, f64::max);
    CriterionResult::new(
        3,
        name,
        pass,
        format!(
            "{} α × {AUBIN_STARTS} starts, min J = {worst_j:.2e}, max EL residual = {worst_r:.2e}",
            AUBIN_ALPHAS.len()
        ),
        Value::Array(per_alpha),
    )
}

pub fn unbounded_below_half() -> CriterionResult {
    let name = "unbounded below alpha = 1/2";
    let two_d = match two_bubble_probe(PROBE_ALPHA, PROBE_FLOOR, 300.0) {
        Ok(r) => r,
        Err(e) => return CriterionResult::error(4, name, e),
    };
    let one_d = match axisym_probe(PROBE_ALPHA, PROBE_FLOOR, 300.0) {
        Ok(r) => r,
        Err(e) => return CriterionResult::error(4, name, e),
    };
    let pass = two_d.verdict == ProbeVerdict::UnboundedDescent
        && two_d.j_value < PROBE_FLOOR
        && one_d.verdict == ProbeVerdict::UnboundedDescent
        && one_d.i_value < PROBE_FLOOR;
    CriterionResult::new(
        4,
        name,
        pass,
        format!(
            "J = {:.3} at ln(1/δ) = {}, I = {:.3} at ln(1/δ) = {}",
            two_d.j_value,
            two_d.path.last().map_or(0.0, |p| p.log_concentration),
            one_d.i_value,
            one_d.path.last().map_or(0.0, |p| p.0)
        ),
        json!({"j_value": two_d.j_value, "j_slope": two_d.asymptotic_slope, "i_value": one_d.i_value, "i_slope": one_d.asymptotic_slope}),
    )
}

pub fn bridge_identities() -> CriterionResult {
    let name = "bridge identities";
    let opts = BetaOptions::default();
    let mut beta_err: f64 = 0.0;
    let mut residual: f64 = 0.0;
    for l in BRIDGE_LS {
        let rho = 1.0 + l / 2.0;
        let v = match v_star_field(rho) {
            Ok(v) => v,
            Err(e) => return CriterionResult::error(5, name, e),
        };
        match beta_l(&v, &opts) {
            Ok(b) => beta_err = beta_err.max((b.beta - (4.0 + 2.0 * l)).abs()),
            Err(e) => return CriterionResult::error(5, name, e),
        }
        for i in -10..=10 {
            for j in -10..=10 {
                let y = [0.5 * i as f64, 0.5 * j as f64];
                residual = residual.max(v.residual(y, 0.0).abs());
            }
        }
    }
    let g = SphereGrid::default_grid();
    let fields = [
        SphereField::from_fn(&g, |x| 0.4 * x[2] - 0.3 * x[0] * x[1]),
        SphereField::from_fn(&g, |x| 0.8 * x[0] + 0.2 * (3.0 * x[2] * x[2] - 1.0)),
        SphereField::from_fn(&g, |x| Mobius::new([0.2, 0.1, 0.4]).log_jacobian(x)),
    ];
    let mut mass_err: f64 = 0.0;
    for (u, rho) in fields.iter().zip([1.5, 1.2, 1.8]) {
        match to_planar(&normalize_mass(u), rho) {
            Ok(v) => mass_err = mass_err.max((planar_mass(&v, 24, 64) - 8.0 * PI * rho).abs()),
            Err(e) => return CriterionResult::error(5, name, e),
        }
    }
    let pass = beta_err <= BRIDGE_BETA_TOL && residual <= BRIDGE_RESIDUAL_TOL && mass_err <= BRIDGE_MASS_TOL;
    CriterionResult::new(
        5,
        name,
        pass,
        format!("max|β − (4+2l)| = {beta_err:.2e}, max residual = {residual:.2e}, max|mass − 8πρ| = {mass_err:.2e}"),
        json!({"beta_error": beta_err, "residual": residual, "mass_error": mass_err}),
    )
}

pub fn shooting_degeneracy(exec: Execution) -> (CriterionResult, Vec<(f64, f64)>) {
    let name = "shooting degeneracy at l = 0";
    let rows = match beta_curve(0.0, -4.0, 4.0, 17, exec) {
        Ok(r) => r,
        Err(e) => return (CriterionResult::error(6, name, e), Vec::new()),
    };
    let dev = max_abs(rows.iter().map(|r| r.beta - 4.0));
    let gap = max_abs(rows.iter().map(|r| r.beta - r.beta_slope));
    let pass = rows.iter().all(|r| r.verdict == ShotVerdict::Finite) && dev <= FLAT_BETA_TOL && gap <= ESTIMATOR_TOL;
    (
        CriterionResult::new(
            6,
            name,
            pass,
            format!(
                "{} shots on [−4, 4], max|β − 4| = {dev:.2e}, max estimator gap = {gap:.2e}",
                rows.len()
            ),
            json!({"max_beta_deviation": dev, "max_estimator_gap": gap}),
        ),
        Vec::new(),
    )
}

/// Finite-mass radial solutions with l > 0 computed by the suite.
fn radial_catalogue(exec: Execution) -> crate::Result<Vec<(f64, f64, f64)>> {
    let mut out = Vec::new();
    for l in [0.5, 1.0, 1.5, 2.0] {
        for r in beta_curve(l, S_BRACKET[0], S_BRACKET[1], crate::shooting::CURVE_SAMPLES, exec)? {
            if r.verdict == ShotVerdict::Finite {
                out.push((l, r.s, r.beta));
            }
        }
    }
    Ok(out)
}

pub fn pohozaev_window(exec: Execution) -> CriterionResult {
    let name = "Pohozaev window for radial solutions";
    let cat = match radial_catalogue(exec) {
        Ok(c) => c,
        Err(e) => return CriterionResult::error(7, name, e),
    };
    let bad: Vec<&(f64, f64, f64)> = cat
        .iter()
        .filter(|(l, _, b)| !(4.0 + POHOZAEV_MARGIN < *b && *b < 4.0 * (1.0 + l) - POHOZAEV_MARGIN))
        .collect();
    let margin = cat
        .iter()
        .map(|(l, _, b)| (b - 4.0).min(4.0 * (1.0 + l) - b))
        .fold(f64::INFINITY, f64::min);
    CriterionResult::new(
        7,
        name,
        bad.is_empty() && !cat.is_empty(),
        format!(
            "{} solutions for l ∈ {{0.5, 1, 1.5, 2}}, smallest distance to the window edge {margin:.3e}",
            cat.len()
        ),
        json!({"solutions": cat.len(), "outside": bad.len(), "min_margin": margin}),
    )
}

pub fn uniqueness_windows(exec: Execution) -> CriterionResult {
    let name = "uniqueness windows for radial solutions";
    let mut counts = Vec::new();
    let mut pass = true;
    let jobs: Vec<(f64, f64)> = WINDOW_I_LS
        .iter()
        .flat_map(|&l| WINDOW_I_TARGETS.iter().map(move |&t| (l, t)))
        .chain(WINDOW_II_TARGETS.iter().map(|&t| (WINDOW_II_L, t)))
        .collect();
    for (l, target) in jobs {
        match solutions_at_beta(l, target, S_BRACKET, ROOT_TOL, exec) {
            Ok(r) => {
                pass &= r.in_window && r.roots.len() <= 1;
                counts.push(json!({"l": l, "beta": target, "roots": r.s_values()}));
            }
            Err(e) => return CriterionResult::error(8, name, e),
        }
    }
    let mut anchor_err: f64 = 0.0;
    for l in ANCHOR_LS {
        let rho = 1.0 + l / 2.0;
        let s_star = (8.0 * rho).ln();
        match solutions_at_beta(l, 4.0 + 2.0 * l, S_BRACKET, ROOT_TOL, exec) {
            Ok(r) => {
                let e = r
                    .s_values()
                    .iter()
                    .map(|s| (s - s_star).abs())
                    .fold(f64::INFINITY, f64::min);
                anchor_err = anchor_err.max(e);
            }
            Err(e) => return CriterionResult::error(8, name, e),
        }
        match shoot_resolved(l, s_star, DEFAULT_TOL) {
            Ok(sol) => anchor_err = anchor_err.max((sol.beta_mass - (4.0 + 2.0 * l)).abs()),
            Err(e) => return CriterionResult::error(8, name, e),
        }
    }
    pass &= anchor_err <= ANCHOR_TOL;
    let max_roots = counts
        .iter()
        .map(|c| c["roots"].as_array().map_or(0, |a| a.len()))
        .max()
        .unwrap_or(0);
    CriterionResult::new(
        8,
        name,
        pass,
        format!(
            "{} targets, at most {max_roots} root(s) each, v* anchor error {anchor_err:.2e}",
            counts.len()
        ),
        json!({"targets": counts, "anchor_error": anchor_err}),
    )
}

pub fn eigenvalue_oracles(exec: Execution) -> CriterionResult {
    let name = "eigenvalue and Bol-type audits";
    let opts = EigenOptions::default();
    let dirichlet = first_eigenvalue(&|_| f64::NEG_INFINITY, &Domain::Disk { radius: 1.0 }, &opts);
    let liou = first_eigenvalue(&liouville, &Domain::Disk { radius: 1.0 }, &opts);
    let (dirichlet, liou) = match (dirichlet, liou) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return CriterionResult::error(9, name, e),
    };
    let mass = domain_mass(&liouville, &Domain::Disk { radius: 1.0 });
    let shifted = |y: [f64; 2]| liouville(y) + BOL_SHIFT;
    let family: Vec<Domain> = [0.5, 1.0, 1.5, 2.0, 3.0]
        .iter()
        .map(|&radius| Domain::Disk { radius })
        .collect();
    let omega = Region::Bounded {
        domain: Domain::Disk { radius: 4.0 },
    };
    let audits = match bol_audit(&shifted, omega, &family, &BolOptions::default(), exec) {
        Ok(a) => a,
        Err(e) => return CriterionResult::error(9, name, e),
    };
    let strict = audits.iter().all(|a| a.hypotheses_hold);
    let violated = audits.iter().filter(|a| a.verdict == BolVerdict::Violated).count();
    let confirmed = audits.iter().filter(|a| a.verdict == BolVerdict::Confirmed).count();
    let pass = (dirichlet.lambda1 - BESSEL_J01_SQ).abs() <= BESSEL_TOL
        && liou.lambda1.abs() <= LIOUVILLE_LAMBDA_TOL
        && (mass - 4.0 * PI).abs() <= LIOUVILLE_MASS_TOL
        && strict
        && violated == 0;
    CriterionResult::new(
        9,
        name,
        pass,
        format!(
            "λ₁(Dirichlet) = {:.6}, λ₁(Liouville) = {:.2e}, mass − 4π = {:.2e}, audits: {confirmed} confirmed, {violated} violated of {}",
            dirichlet.lambda1,
            liou.lambda1,
            mass - 4.0 * PI,
            audits.len()
        ),
        json!({
            "dirichlet_lambda1": dirichlet.lambda1,
            "liouville_lambda1": liou.lambda1,
            "liouville_mass": mass,
            "audits": audits,
        }),
    )
}

pub fn nodal_accounting() -> CriterionResult {
    let name = "nodal accounting";
    let v = match v_star_field(1.5) {
        Ok(v) => v,
        Err(e) => return CriterionResult::error(10, name, e),
    };
    let f = |y: [f64; 2]| (y[0] * y[0] - y[1] * y[1]) * (-(y[0] * y[0] + y[1] * y[1])).exp();
    let r = match nodal_domains(f, DiskGrid { radius: 2.0, n: 200 }, None, Some(&v), Some(1.5)) {
        Ok(r) => r,
        Err(e) => return CriterionResult::error(10, name, e),
    };
    let partition = (r.masses().iter().sum::<f64>() + r.nodal_set_mass - r.total).abs();
    let three = [1.1, 1.25, 1.5].iter().all(|&rho| mass_ledger(3, rho).contradiction);
    let four = [1.5, 1.75, 2.0].iter().all(|&rho| mass_ledger(4, rho).contradiction);
    let l3 = mass_ledger(3, 1.5);
    let l4 = mass_ledger(4, 2.0);
    let arithmetic = (l3.required - 12.0 * PI).abs() < 1e-12 && (l4.required - 16.0 * PI).abs() < 1e-12;
    let pass = r.m == 4 && partition <= NODAL_PARTITION_TOL && three && four && arithmetic;
    CriterionResult::new(
        10,
        name,
        pass,
        format!(
            "{} domains, partition defect {partition:.2e}, m = 3 needs > {:.4} vs 8πρ ≤ {:.4}, m = 4 needs > {:.4} vs 8πρ ≤ {:.4}",
            r.m, l3.required, l3.available, l4.required, l4.available
        ),
        json!({"domains": r.m, "partition_defect": partition, "ledger_m3": l3, "ledger_m4": l4}),
    )
}

pub fn second_variation_thresholds() -> CriterionResult {
    let name = "second-variation thresholds";
    let g = SphereGrid::default_grid();
    let d2 = second_variation(0.5, Mode::Degree2, &g);
    let d1 = second_variation(0.5, Mode::Degree1, &g);
    let (d2, d1) = match (d2, d1) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return CriterionResult::error(11, name, e),
    };
    let (t2, t1) = (d2.threshold_estimate, d1.threshold_estimate);
    let pass = (t2 - 1.0 / 3.0).abs() <= THRESHOLD_TOL && (t1 - 1.0).abs() <= THRESHOLD_TOL;
    CriterionResult::new(
        11,
        name,
        pass,
        format!("degree 2 crosses at α = {t2:.8}, degree 1 at α = {t1:.8}"),
        json!({"degree2_threshold": t2, "degree1_threshold": t1}),
    )
}

pub fn axisymmetric(seed: u64, exec: Execution) -> CriterionResult {
    let name = "axisymmetric inequality";
    let basis = LegendreBasis::default_basis();
    let opts = MinimizeOptions::default();
    let jobs: Vec<f64> = AXISYM_ALPHAS
        .iter()
        .flat_map(|&a| std::iter::repeat_n(a, AXISYM_STARTS))
        .collect();
    let out = map_indexed(exec, &jobs, |k, &alpha| {
        let g0 = random_axial(&basis, 8, 1.0, &mut task_rng(seed, stream(12, k)));
        minimize_axisym(alpha, &g0, &opts).map(|r| r.value)
    });
    let mut min_i = f64::INFINITY;
    for r in out {
        match r {
            Ok(v) => min_i = min_i.min(v),
            Err(e) => return CriterionResult::error(12, name, e),
        }
    }
    let grid = SphereGrid::default_grid();
    let mut lift_err: f64 = 0.0;
    for k in 0..4 {
        let g = random_axial(&basis, 10, 0.5, &mut task_rng(seed, stream(12, 10_000 + k)));
        let g = LegendreFunction::new(&basis, g.coeffs().to_vec()).expect("same basis");
        let u = SphereField::from_fn(&grid, |x| 2.0 * g.eval(x[2]));
        for alpha in AXISYM_ALPHAS {
            match (j_alpha(&u, alpha), i_functional(&g, alpha)) {
                (Ok(j), Ok(i)) => lift_err = lift_err.max((2.0 * j - i).abs()),
                (Err(e), _) | (_, Err(e)) => return CriterionResult::error(12, name, e),
            }
        }
    }
    let pass = min_i >= MIN_J_FLOOR && lift_err <= LIFT_TOL;
    CriterionResult::new(
        12,
        name,
        pass,
        format!(
            "{} α × {AXISYM_STARTS} starts, min I = {min_i:.2e}, max|2J(lift g) − I(g)| = {lift_err:.2e}",
            AXISYM_ALPHAS.len()
        ),
        json!({"min_value": min_i, "lift_error": lift_err}),
    )
}

/// Criteria 1–12.
pub fn run_criteria(seed: u64, exec: Execution) -> Vec<CriterionResult> {
    vec![
        spectral_core(),
        onofri_inequality(seed, exec),
        aubin_range(seed, exec),
        unbounded_below_half(),
        bridge_identities(),
        shooting_degeneracy(exec).0,
        pohozaev_window(exec),
        uniqueness_windows(exec),
        eigenvalue_oracles(exec),
        nodal_accounting(),
        second_variation_thresholds(),
        axisymmetric(seed, exec),
    ]
}

/// The full suite: criteria 1–12, then criterion 13 reruns them and
/// compares the serialized rows byte for byte.
pub fn run_all(seed: u64, exec: Execution) -> Vec<CriterionResult> {
    let first = run_criteria(seed, exec);
    let second = run_criteria(seed, exec);
    let (a, b) = (rows_json(&first), rows_json(&second));
    let same = a == b;
    let mut rows = first;
    rows.push(CriterionResult::new(
        13,
        "determinism",
        same,
        format!(
            "rerun with seed {seed}: {} bytes, {}",
            a.len(),
            if same { "identical" } else { "different" }
        ),
        json!({"bytes": a.len(), "identical": same}),
    ));
    rows
}

pub fn rows_json(rows: &[CriterionResult]) -> String {
    serde_json::to_string(rows).expect("criterion rows serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cheap_criteria_pass() {
        for r in [
            spectral_core(),
            unbounded_below_half(),
            nodal_accounting(),
            second_variation_thresholds(),
        ] {
            assert!(r.pass, "{}", r.line());
        }
    }

    #[test]
    fn lines_are_labeled() {
        let r = CriterionResult::new(3, "x", false, "d".into(), Value::Null);
        assert_eq!(r.line(), "criterion  3: FAIL  x  (d)");
    }
}
