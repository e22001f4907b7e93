use serde_json::{json, Value};
use std::f64::consts::PI;
use std::time::Instant;

use onofri_core::acceptance::{run_all, EL_RESIDUAL_TOL, MIN_J_FLOOR, S_BRACKET, THRESHOLD_TOL};
use onofri_core::axisym::{axisym_csv, axisym_probe, axisym_scan, LegendreBasis};
use onofri_core::bridge::{
    beta_l, bol_audit, mass_ledger, nodal_domains, planar_mass, pohozaev_window, to_planar, BetaOptions, BolOptions,
    BolVerdict, DiskGrid, Domain, Region,
};
use onofri_core::onofri::{
    alpha_scan, el_residual, minimize, normalize_mass, random_start, second_variation, MinimizeOptions, MinimizeResult,
    Mode, START_AMPLITUDE, START_DEGREE,
};
use onofri_core::report::{csv_table, num, row, Report, ReportVerdict, RunConfig};
use onofri_core::rng::task_rng;
use onofri_core::shooting::{
    beta_curve, curve_csv, shoot, shoot_resolved, solutions_at_beta, ShotVerdict, CURVE_SAMPLES, DEFAULT_TOL,
};
use onofri_core::sphere::SphereGrid;
use onofri_core::{Error, Execution, Result};

/// Relative accuracy required of planar masses against 8πρ.
const MASS_TOL: f64 = 1e-7;
/// Root-bracket width for `uniqueness`.
const ROOT_TOL: f64 = 1e-10;
/// Smallest α at which the full inequality is proved.
const PROVED_ALPHA: f64 = 2.0 / 3.0;

type Checks = Vec<(bool, String)>;

/// Dispatch one subcommand; returns the report and an optional CSV table.
pub fn run(config: RunConfig) -> Result<(Report, Option<String>)> {
    let start = Instant::now();
    let exec = Execution::default();
    let mut checks = Checks::new();
    let (rows, csv) = match config.command.as_str() {
        "minimize" => minimize_cmd(&config, &mut checks)?,
        "alpha-scan" => alpha_scan_cmd(&config, exec, &mut checks)?,
        "el-check" => el_check_cmd(&config, &mut checks)?,
        "bridge" => bridge_cmd(&config, &mut checks)?,
        "shoot" => shoot_cmd(&config, &mut checks)?,
        "beta-curve" => beta_curve_cmd(&config, exec, &mut checks)?,
        "uniqueness" => uniqueness_cmd(&config, exec, &mut checks)?,
        "axisym" => axisym_cmd(&config, exec, &mut checks)?,
        "bol-audit" => bol_audit_cmd(&config, exec, &mut checks)?,
        "nodal" => nodal_cmd(&config, &mut checks)?,
        "second-variation" => second_variation_cmd(&config, &mut checks)?,
        "verify" => verify_cmd(&config, exec, &mut checks),
        other => return Err(Error::Config(format!("unknown command {other:?}"))),
    };
    let verdict = ReportVerdict::from_checks(&checks);
    Ok((Report::new(config, rows, verdict, start.elapsed().as_secs_f64()), csv))
}

type Output = (Vec<Value>, Option<String>);

fn need(v: Option<f64>, name: &str) -> Result<f64> {
    v.ok_or_else(|| Error::Config(format!("--{name} is required")))
}

fn grid(config: &RunConfig) -> Result<std::sync::Arc<SphereGrid>> {
    match config.band_limit {
        Some(l) => SphereGrid::for_band_limit(l),
        None => Ok(SphereGrid::default_grid()),
    }
}

fn minimize_opts(config: &RunConfig) -> MinimizeOptions {
    let mut opts = MinimizeOptions::default();
    if let Some(t) = config.tol {
        opts.stat_tol = t;
    }
    opts
}

fn alphas(config: &RunConfig, lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (lo, hi) = (config.alpha_min.unwrap_or(lo), config.alpha_max.unwrap_or(hi));
    let n = config.n.unwrap_or(n);
    if n == 1 || lo == hi {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn minimize_once(config: &RunConfig) -> Result<(f64, MinimizeResult)> {
    let alpha = need(config.alpha, "alpha")?;
    let g = grid(config)?;
    let u0 = random_start(&g, START_DEGREE, START_AMPLITUDE, &mut task_rng(config.seed, 0));
    Ok((alpha, minimize(alpha, &u0, &minimize_opts(config))?))
}

fn proved_bound(alpha: f64, j: f64, checks: &mut Checks) {
    if alpha >= PROVED_ALPHA {
        checks.push((
            j >= MIN_J_FLOOR,
            format!("J = {j:e} below {MIN_J_FLOOR:e} at alpha = {alpha}"),
        ));
    }
}

fn minimize_cmd(config: &RunConfig, checks: &mut Checks) -> Result<Output> {
    let (alpha, r) = minimize_once(config)?;
    proved_bound(alpha, r.j_value, checks);
    let csv = csv_table(
        &["iteration", "j"],
        &r.trace
            .iter()
            .map(|(i, j)| vec![i.to_string(), num(*j)])
            .collect::<Vec<_>>(),
    );
    let anchor = if alpha >= PROVED_ALPHA {
        "constrained inequality, alpha >= 2/3"
    } else {
        "constrained inequality, open range"
    };
    Ok((
        vec![row(anchor, json!({"alpha": alpha, "summary": r.summary()}))],
        Some(csv),
    ))
}

fn alpha_scan_cmd(config: &RunConfig, exec: Execution, checks: &mut Checks) -> Result<Output> {
    let g = grid(config)?;
    let alphas = alphas(config, 0.55, 1.0, 10);
    let trials = config.trials.unwrap_or(10);
    let (table, _) = alpha_scan(&g, &alphas, trials, config.seed, &minimize_opts(config), exec)?;
    let mut rows = Vec::new();
    let mut csv = Vec::new();
    for r in &table {
        if let Some(j) = r.min_j {
            proved_bound(r.alpha, j, checks);
        }
        rows.push(row("multi-start minima of J_alpha", r));
        csv.push(vec![
            num(r.alpha),
            r.min_j.map_or("nan".into(), num),
            num(r.mean_iterations),
        ]);
    }
    Ok((rows, Some(csv_table(&["alpha", "min_j", "iterations"], &csv))))
}

fn el_check_cmd(config: &RunConfig, checks: &mut Checks) -> Result<Output> {
    let (alpha, r) = minimize_once(config)?;
    let residual = el_residual(&r.u, 1.0 / alpha)?;
    checks.push((
        residual <= EL_RESIDUAL_TOL,
        format!("Euler-Lagrange residual {residual:e} above {EL_RESIDUAL_TOL:e}"),
    ));
    Ok((
        vec![row(
            "Euler-Lagrange equation of the constrained problem",
            json!({"alpha": alpha, "rho": 1.0 / alpha, "el_residual": residual, "summary": r.summary()}),
        )],
        None,
    ))
}

fn bridge_cmd(config: &RunConfig, checks: &mut Checks) -> Result<Output> {
    let (alpha, r) = minimize_once(config)?;
    let rho = 1.0 / alpha;
    let v = to_planar(&normalize_mass(&r.u), rho)?;
    let beta = beta_l(&v, &BetaOptions::default())?;
    let window = pohozaev_window(v.l(), beta.beta);
    let mass = planar_mass(&v, 24, 64);
    let mass_err = (mass - 8.0 * PI * rho).abs();
    checks.push((
        mass_err <= MASS_TOL * 8.0 * PI * rho,
        format!("planar mass off by {mass_err:e}"),
    ));
    if v.l() > 0.0 {
        checks.push((
            window.inside,
            format!("beta = {} outside the Pohozaev window", beta.beta),
        ));
    }
    let csv = v.to_csv(4.0, 81);
    Ok((
        vec![row(
            "stereographic transfer and Pohozaev window",
            json!({
                "alpha": alpha,
                "rho": rho,
                "l": v.l(),
                "beta": beta.beta,
                "beta_lower": window.beta_lower,
                "beta_upper": window.beta_upper,
                "inside": window.inside,
                "planar_mass": mass,
                "j_value": r.j_value,
            }),
        )],
        Some(csv),
    ))
}

fn pohozaev_row(l: f64, beta: f64, finite: bool, checks: &mut Checks, what: &str) -> Value {
    let w = pohozaev_window(l, beta);
    if finite && l > 0.0 {
        checks.push((
            w.inside,
            format!("{what}: beta = {beta} outside ({}, {})", w.beta_lower, w.beta_upper),
        ));
    }
    json!({"beta_lower": w.beta_lower, "beta_upper": w.beta_upper, "inside": w.inside})
}

fn shoot_cmd(config: &RunConfig, checks: &mut Checks) -> Result<Output> {
    let l = need(config.l, "l")?;
    let s = need(config.s, "s")?;
    let tol = config.tol.unwrap_or(DEFAULT_TOL);
    let sol = match config.r_max {
        Some(r) => shoot(l, s, r, tol)?,
        None => shoot_resolved(l, s, tol)?,
    };
    let finite = sol.verdict == ShotVerdict::Finite;
    let window = pohozaev_row(l, sol.beta(), finite, checks, "radial solution");
    let mut fields = serde_json::to_value(&sol).unwrap_or(Value::Null);
    if let Value::Object(m) = &mut fields {
        m.insert("beta".into(), json!(sol.beta()));
        m.insert("window".into(), window);
    }
    Ok((vec![row("radial solution by shooting", fields)], Some(sol.to_csv())))
}

fn beta_curve_cmd(config: &RunConfig, exec: Execution, checks: &mut Checks) -> Result<Output> {
    let l = need(config.l, "l")?;
    let (lo, hi) = (
        config.s_min.unwrap_or(S_BRACKET[0]),
        config.s_max.unwrap_or(S_BRACKET[1]),
    );
    let rows = beta_curve(l, lo, hi, config.n.unwrap_or(CURVE_SAMPLES), exec)?;
    let out = rows
        .iter()
        .map(|r| {
            let finite = r.verdict == ShotVerdict::Finite;
            let w = pohozaev_row(l, r.beta, finite, checks, &format!("s = {}", r.s));
            row("beta(s) for radial solutions", json!({"l": l, "s": r.s, "beta": r.beta, "beta_slope": r.beta_slope, "verdict": r.verdict, "window": w}))
        })
        .collect();
    Ok((out, Some(curve_csv(&rows))))
}

fn uniqueness_cmd(config: &RunConfig, exec: Execution, checks: &mut Checks) -> Result<Output> {
    let l = need(config.l, "l")?;
    let beta = need(config.beta, "beta")?;
    let bracket = [
        config.s_min.unwrap_or(S_BRACKET[0]),
        config.s_max.unwrap_or(S_BRACKET[1]),
    ];
    let r = solutions_at_beta(l, beta, bracket, config.tol.unwrap_or(ROOT_TOL), exec)?;
    checks.push((
        !r.violates_uniqueness(),
        format!(
            "{} radial solutions with beta = {beta} at l = {l} inside the uniqueness window",
            r.roots.len()
        ),
    ));
    let csv = csv_table(
        &["s", "beta", "dbeta_ds"],
        &r.roots
            .iter()
            .map(|x| vec![num(x.s), num(x.beta), num(x.dbeta_ds)])
            .collect::<Vec<_>>(),
    );
    Ok((vec![row("uniqueness of radial solutions", &r)], Some(csv)))
}

fn axisym_cmd(config: &RunConfig, exec: Execution, checks: &mut Checks) -> Result<Output> {
    let alphas = match config.alpha {
        Some(a) if config.alpha_min.is_none() && config.alpha_max.is_none() => vec![a],
        _ => alphas(config, 0.5, 1.0, 6),
    };
    let (below, above): (Vec<f64>, Vec<f64>) = alphas.iter().partition(|&&a| a < 0.5);
    let mut rows = Vec::new();
    for a in below {
        let p = axisym_probe(a, -10.0, 300.0)?;
        rows.push(row("axially symmetric functional below alpha = 1/2", &p));
    }
    let basis = match config.band_limit {
        Some(k) => LegendreBasis::new(k, 4 * k)?,
        None => LegendreBasis::default_basis(),
    };
    let table = if above.is_empty() {
        Vec::new()
    } else {
        axisym_scan(
            &basis,
            &above,
            config.trials.unwrap_or(10),
            config.seed,
            &minimize_opts(config),
            exec,
        )?
    };
    for r in &table {
        if let Some(v) = r.min_value {
            checks.push((
                v >= MIN_J_FLOOR,
                format!("I = {v:e} below {MIN_J_FLOOR:e} at alpha = {}", r.alpha),
            ));
        }
        rows.push(row("axially symmetric inequality, alpha >= 1/2", r));
    }
    Ok((rows, (!table.is_empty()).then(|| axisym_csv(&table))))
}

fn bol_audit_cmd(config: &RunConfig, exec: Execution, checks: &mut Checks) -> Result<Output> {
    let rho = config.rho.unwrap_or(1.0);
    if !(rho >= 1.0) {
        return Err(Error::Config(format!("bol-audit needs rho >= 1, got {rho}")));
    }
    let c = (8.0 * rho).ln();
    let g = move |y: [f64; 2]| c - 2.0 * (1.0 + y[0] * y[0] + y[1] * y[1]).ln();
    let omega_r = config.r_max.unwrap_or(4.0);
    let n = config.n.unwrap_or(4);
    let family: Vec<Domain> = (1..=n)
        .map(|k| Domain::Disk {
            radius: omega_r * k as f64 / (n + 1) as f64,
        })
        .collect();
    let omega = Region::Bounded {
        domain: Domain::Disk { radius: omega_r },
    };
    let audits = bol_audit(&g, omega, &family, &BolOptions::default(), exec)?;
    let mut rows = Vec::new();
    let mut csv = Vec::new();
    for a in &audits {
        checks.push((
            a.verdict != BolVerdict::Violated,
            format!("{:?}: lambda1 <= 0 with mass {} <= 4 pi", a.domain, a.mass),
        ));
        rows.push(row(
            "eigenvalue/mass implication for supersolutions",
            json!({"rho": rho, "audit": a}),
        ));
        let r = match a.domain {
            Domain::Disk { radius } => radius,
            Domain::Rectangle { width, .. } => width,
        };
        let v = serde_json::to_value(a.verdict).unwrap_or_default();
        csv.push(vec![
            num(r),
            num(a.lambda1),
            num(a.mass),
            v.as_str().unwrap_or("").to_string(),
        ]);
    }
    Ok((rows, Some(csv_table(&["radius", "lambda1", "mass", "verdict"], &csv))))
}

fn nodal_cmd(config: &RunConfig, checks: &mut Checks) -> Result<Output> {
    let rho = config.rho.unwrap_or(1.5);
    let k = config.n.unwrap_or(2) as i32;
    let v = onofri_core::bridge::v_star_field(rho)?;
    let f = move |y: [f64; 2]| {
        let (r, t) = (y[0].hypot(y[1]), y[1].atan2(y[0]));
        r.powi(k) * (k as f64 * t).cos() * (-r * r).exp()
    };
    let rep = nodal_domains(f, DiskGrid { radius: 2.0, n: 200 }, None, Some(&v), Some(rho))?;
    let defect = (rep.masses().iter().sum::<f64>() + rep.nodal_set_mass - rep.total).abs();
    checks.push((defect <= 1e-8, format!("domain masses miss the total by {defect:e}")));
    let ledger = mass_ledger(rep.m, rho);
    let csv = csv_table(
        &["domain", "sign", "mass"],
        &rep.domains
            .iter()
            .enumerate()
            .map(|(i, d)| vec![i.to_string(), d.sign.to_string(), num(d.mass)])
            .collect::<Vec<_>>(),
    );
    Ok((
        vec![row(
            "nodal domain mass accounting",
            json!({"rho": rho, "sectors": 2 * k, "domains": rep.m, "partition_defect": defect, "report": rep, "ledger": ledger}),
        )],
        Some(csv),
    ))
}

fn second_variation_cmd(config: &RunConfig, checks: &mut Checks) -> Result<Output> {
    let alpha = config.alpha.unwrap_or(0.5);
    let g = grid(config)?;
    let mut rows = Vec::new();
    for (mode, expected) in [(Mode::Degree2, 1.0 / 3.0), (Mode::Degree1, 1.0)] {
        let r = second_variation(alpha, mode, &g)?;
        let err = (r.threshold_estimate - expected).abs();
        checks.push((
            err <= THRESHOLD_TOL,
            format!("{} threshold {} is not {expected}", r.mode, r.threshold_estimate),
        ));
        rows.push(row("second variation of J_alpha at 0", &r));
    }
    Ok((rows, None))
}

fn verify_cmd(config: &RunConfig, exec: Execution, checks: &mut Checks) -> Output {
    let results = run_all(config.seed, exec);
    let mut csv = Vec::new();
    let rows = results
        .iter()
        .map(|r| {
            checks.push((r.pass, r.line()));
            csv.push(vec![r.id.to_string(), r.name.replace(',', ";"), if r.pass { "pass" } else { "fail" }.to_string()]);
            row(&format!("criterion {}", r.id), json!({"id": r.id, "name": r.name, "status": if r.pass { "pass" } else { "fail" }, "detail": r.detail, "measured": r.measured}))
        })
        .collect();
    (rows, Some(csv_table(&["id", "name", "status"], &csv)))
}
