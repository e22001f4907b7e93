//! The axially symmetric problem on [−1, 1]:
//! I_α(g) = α∫(1−x²)g'² + 2∫g − 2 ln(½∫e^{2g}) under ∫e^{2g}x dx = 0.
//!
//! For u(x) = 2g(x₃) on S², I_α(g) = 2J_α(u); α = ½ is the classical
//! one-dimensional inequality.

use rand::Rng;
use serde::Serialize;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::onofri::probe::pair;
use crate::onofri::{MinimizeOptions, ProbeVerdict, Verdict};
use crate::quadrature::{gauss_legendre, legendre_with_derivative, CompositeRule};
use crate::rng::task_rng;

/// Default polynomial degree.
pub const DEFAULT_DEGREE: usize = 16;
/// Default quadrature size.
pub const DEFAULT_NODES: usize = 64;

/// Legendre polynomials up to degree K tabulated on a Gauss–Legendre rule.
#[derive(Debug, Clone, PartialEq)]
pub struct LegendreBasis {
    degree: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// P_k(x_i) at row i, column k.
    table: Vec<f64>,
}

impl LegendreBasis {
    pub fn new(degree: usize, n_nodes: usize) -> Result<Arc<Self>> {
        if n_nodes < 2 * degree.max(1) {
            return Err(Error::InvalidInput(format!(
                "quadrature size {n_nodes} is below 2K = {}",
                2 * degree
            )));
        }
        let (nodes, weights) = gauss_legendre(n_nodes);
        let mut table = vec![0.0; n_nodes * (degree + 1)];
        for (i, &x) in nodes.iter().enumerate() {
            for k in 0..=degree {
                table[i * (degree + 1) + k] = legendre_with_derivative(k, x).0;
            }
        }
        Ok(Arc::new(Self {
            degree,
            nodes,
            weights,
            table,
        }))
    }

    pub fn default_basis() -> Arc<Self> {
        Self::new(DEFAULT_DEGREE, DEFAULT_NODES).expect("default sizes are valid")
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn p(&self, i: usize, k: usize) -> f64 {
        self.table[i * (self.degree + 1) + k]
    }

    /// ∫(1−x²)P_k'² dx.
    fn energy_weight(k: usize) -> f64 {
        let k = k as f64;
        2.0 * k * (k + 1.0) / (2.0 * k + 1.0)
    }
}

/// g = Σ c_k P_k for k ≤ K.
#[derive(Debug, Clone, PartialEq)]
pub struct LegendreFunction {
    basis: Arc<LegendreBasis>,
    coeffs: Vec<f64>,
}

impl LegendreFunction {
    pub fn new(basis: &Arc<LegendreBasis>, mut coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() > basis.degree + 1 {
            return Err(Error::InvalidInput(format!(
                "{} coefficients exceed degree {}",
                coeffs.len(),
                basis.degree
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("coefficients must be finite".into()));
        }
        coeffs.resize(basis.degree + 1, 0.0);
        Ok(Self {
            basis: Arc::clone(basis),
            coeffs,
        })
    }

    pub fn zero(basis: &Arc<LegendreBasis>) -> Self {
        Self {
            basis: Arc::clone(basis),
            coeffs: vec![0.0; basis.degree + 1],
        }
    }

    /// L² projection of `f` onto degree ≤ K.
    pub fn project(basis: &Arc<LegendreBasis>, f: impl Fn(f64) -> f64) -> Self {
        let fx: Vec<f64> = basis.nodes.iter().map(|&x| f(x)).collect();
        let coeffs = (0..=basis.degree)
            .map(|k| {
                let s: f64 = (0..fx.len()).map(|i| basis.weights[i] * fx[i] * basis.p(i, k)).sum();
                s * (2 * k + 1) as f64 / 2.0
            })
            .collect();
        Self {
            basis: Arc::clone(basis),
            coeffs,
        }
    }

    pub fn basis(&self) -> &Arc<LegendreBasis> {
        &self.basis
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Synthesis at the quadrature nodes.
    pub fn node_values(&self) -> Vec<f64> {
        (0..self.basis.nodes.len())
            .map(|i| {
                (0..=self.basis.degree)
                    .map(|k| self.coeffs[k] * self.basis.p(i, k))
                    .sum()
            })
            .collect()
    }

    /// g(x) and g'(x).
    pub fn eval_with_derivative(&self, x: f64) -> (f64, f64) {
        self.coeffs.iter().enumerate().fold((0.0, 0.0), |(v, d), (k, c)| {
            let (p, dp) = legendre_with_derivative(k, x);
            (v + c * p, d + c * dp)
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_with_derivative(x).0
    }

    /// ∫(1−x²)g'² dx, exact for polynomials.
    pub fn energy(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| LegendreBasis::energy_weight(k) * c * c)
            .sum()
    }

    /// ∫g dx.
    pub fn integral(&self) -> f64 {
        2.0 * self.coeffs[0]
    }

    pub fn shifted(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.coeffs[0] += c;
        out
    }

    /// g(−x).
    pub fn reflected(&self) -> Self {
        let mut out = self.clone();
        for (k, c) in out.coeffs.iter_mut().enumerate() {
            if k % 2 == 1 {
                *c = -*c;
            }
        }
        out
    }

    /// ln(½∫e^{2g} dx), max-shifted.
    pub fn log_half_exp_integral(&self) -> f64 {
        log_half_exp(&self.basis, &self.node_values())
    }

    /// (x, g(x)) CSV on `n` equally spaced points.
    pub fn to_csv(&self, n: usize) -> String {
        let mut out = String::from("x,g\n");
        for i in 0..n {
            let x = -1.0 + 2.0 * i as f64 / (n.max(2) - 1) as f64;
            out.push_str(&format!("{x:.17e},{:.17e}\n", self.eval(x)));
        }
        out
    }
}

fn log_half_exp(basis: &LegendreBasis, values: &[f64]) -> f64 {
    let m = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = basis
        .weights
        .iter()
        .zip(values)
        .map(|(w, v)| w * (2.0 * (v - m)).exp())
        .sum();
    2.0 * m + (0.5 * s).ln()
}

/// I_α(g) = α∫(1−x²)g'² + 2∫g − 2 ln(½∫e^{2g}).
pub fn i_functional(g: &LegendreFunction, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidInput(format!("alpha must be positive, got {alpha}")));
    }
    Ok(alpha * g.energy() + 2.0 * g.integral() - 2.0 * g.log_half_exp_integral())
}

/// ∫e^{2g} x dx.
pub fn constraint_moment(g: &LegendreFunction) -> f64 {
    let b = &g.basis;
    g.node_values()
        .iter()
        .enumerate()
        .map(|(i, v)| b.weights[i] * (2.0 * v).exp() * b.nodes[i])
        .sum()
}

/// g + c with ½∫e^{2g} = 1.
pub fn normalize_axisym(g: &LegendreFunction) -> LegendreFunction {
    g.shifted(-0.5 * g.log_half_exp_integral())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Recentered1d {
    pub g: LegendreFunction,
    /// Parameters t of the successive maps x ↦ (x + t)/(1 + tx).
    pub rounds: Vec<f64>,
    pub moment: f64,
}

/// Root t ∈ (−1, 1) of ∫e^{2g(y)}(y − t)/(1 − ty) dy, the moment of the
/// reparametrized function; safeguarded Newton.
fn solve_t(g: &LegendreFunction) -> Result<f64> {
    let b = &g.basis;
    let values = g.node_values();
    let m = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let dens: Vec<f64> = values
        .iter()
        .zip(&b.weights)
        .map(|(v, w)| w * (2.0 * (v - m)).exp())
        .collect();
    let f = |t: f64| -> (f64, f64) {
        b.nodes.iter().zip(&dens).fold((0.0, 0.0), |(f, df), (&y, &q)| {
            let d = 1.0 - t * y;
            (f + q * (y - t) / d, df + q * (y * y - 1.0) / (d * d))
        })
    };
    let (mut lo, mut hi) = (-1.0 + 1e-15, 1.0 - 1e-15);
    let mut t = 0.0;
    for _ in 0..200 {
        let (v, dv) = f(t);
        // f is decreasing in t
        if v > 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        let newton = t - v / dv;
        let next = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - t).abs() <= 1e-16 * (1.0 + t.abs()) || v == 0.0 {
            return Ok(next);
        }
        t = next;
    }
    Err(Error::NonConvergence {
        what: "one-dimensional recentering",
        iterations: 200,
        residual: f(t).0.abs(),
    })
}

/// g ∘ m_t + ½ ln m_t' with m_t(x) = (x + t)/(1 + tx), projected to degree K.
pub fn pull_back(g: &LegendreFunction, t: f64) -> LegendreFunction {
    LegendreFunction::project(&g.basis, |x| {
        let d = 1.0 + t * x;
        g.eval((x + t) / d) + 0.5 * ((1.0 - t * t) / (d * d)).ln()
    })
}

/// Reparametrize by Möbius maps of [−1, 1] until |∫e^{2g}x| ≤ tol.
pub fn recenter_1d(g: &LegendreFunction, tol: f64) -> Result<Recentered1d> {
    let mut g = g.clone();
    let mut rounds = Vec::new();
    let mut moment = constraint_moment(&g);
    for _ in 0..20 {
        if moment.abs() <= tol {
            return Ok(Recentered1d { g, rounds, moment });
        }
        let t = solve_t(&g)?;
        g = pull_back(&g, t);
        rounds.push(t);
        moment = constraint_moment(&g);
    }
    Err(Error::NonConvergence {
        what: "one-dimensional recentering",
        iterations: 20,
        residual: moment.abs(),
    })
}

/// Seeded start: c_k uniform in ±amplitude/k for 1 ≤ k ≤ degree.
pub fn random_axial(basis: &Arc<LegendreBasis>, degree: usize, amplitude: f64, rng: &mut impl Rng) -> LegendreFunction {
    let mut g = LegendreFunction::zero(basis);
    for k in 1..=degree.min(basis.degree) {
        g.coeffs[k] = amplitude * rng.random_range(-1.0..1.0) / k as f64;
    }
    g
}

#[derive(Debug, Clone)]
pub struct AxisymResult {
    pub verdict: Verdict,
    pub g: LegendreFunction,
    pub value: f64,
    pub grad_norm: f64,
    pub moment: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct AxisymSummary {
    pub verdict: Verdict,
    pub value: f64,
    pub grad_norm: f64,
    pub moment: f64,
    pub iterations: usize,
    /// max |c_k| for k ≥ 1.
    pub coeff_sup: f64,
}

impl AxisymResult {
    pub fn summary(&self) -> AxisymSummary {
        AxisymSummary {
            verdict: self.verdict,
            value: self.value,
            grad_norm: self.grad_norm,
            moment: self.moment,
            iterations: self.iterations,
            coeff_sup: self.g.coeffs[1..].iter().fold(0.0, |m, c| m.max(c.abs())),
        }
    }
}

/// Coefficient gradient of I_α and the gradient of the moment constraint.
fn gradients(g: &LegendreFunction, alpha: f64) -> (Vec<f64>, Vec<f64>) {
    let b = &g.basis;
    let values = g.node_values();
    let m = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = values.iter().map(|v| (2.0 * (v - m)).exp()).collect();
    let z: f64 = b.weights.iter().zip(&e).map(|(w, e)| w * e).sum();
    let mut grad = vec![0.0; b.degree + 1];
    let mut row = vec![0.0; b.degree + 1];
    for k in 0..=b.degree {
        let (mut mean, mut tilt, mut mom) = (0.0, 0.0, 0.0);
        for (i, ei) in e.iter().enumerate() {
            let wp = b.weights[i] * b.p(i, k);
            mean += wp;
            tilt += wp * ei;
            mom += wp * ei * b.nodes[i];
        }
        grad[k] = 2.0 * alpha * LegendreBasis::energy_weight(k) * g.coeffs[k] + 2.0 * mean - 4.0 * tilt / z;
        row[k] = 2.0 * mom / z;
    }
    (grad, row)
}

/// Diagonal of the second variation at g = 0, floored at a quarter of the
/// energy term.
fn preconditioner(alpha: f64, k: usize) -> f64 {
    let energy = 2.0 * alpha * LegendreBasis::energy_weight(k);
    (energy - 8.0 / (2 * k + 1) as f64).max(0.25 * energy)
}

fn project_out(v: &mut [f64], row: &[f64], inv_h: &[f64]) -> f64 {
    let num: f64 = (1..v.len()).map(|k| row[k] * v[k]).sum();
    let den: f64 = (1..v.len()).map(|k| row[k] * row[k] * inv_h[k]).sum();
    if den > 0.0 {
        let lam = num / den;
        for k in 1..v.len() {
            v[k] -= lam * row[k] * inv_h[k];
        }
        lam
    } else {
        0.0
    }
}

fn tangent_grad_norm(grad: &[f64], row: &[f64]) -> f64 {
    let ones = vec![1.0; grad.len()];
    let mut g = grad.to_vec();
    project_out(&mut g, row, &ones);
    g[1..].iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Constrained descent for I_α over degree ≤ K: preconditioned gradient
/// steps projected onto the tangent of the moment constraint, Armijo
/// backtracking, then [`recenter_1d`] and the gauge ½∫e^{2g} = 1.
pub fn minimize_axisym(alpha: f64, g0: &LegendreFunction, opts: &MinimizeOptions) -> Result<AxisymResult> {
    if !(alpha >= 0.45) {
        return Err(Error::InvalidInput(format!(
            "axisymmetric minimization needs alpha ≥ 0.45, got {alpha}"
        )));
    }
    let k_max = g0.basis.degree;
    let inv_h: Vec<f64> = (0..=k_max)
        .map(|k| if k == 0 { 0.0 } else { 1.0 / preconditioner(alpha, k) })
        .collect();
    let mut g = normalize_axisym(&recenter_1d(g0, opts.constraint_tol)?.g);
    let mut value = i_functional(&g, alpha)?;
    let mut verdict = Verdict::IterationCap;
    let mut iterations = 0;
    let mut grad_norm = f64::INFINITY;
    while iterations < opts.max_iter {
        if value < opts.blowup_floor {
            verdict = Verdict::UnboundedDescent;
            break;
        }
        let (grad, row) = gradients(&g, alpha);
        grad_norm = tangent_grad_norm(&grad, &row);
        if grad_norm <= opts.stat_tol {
            verdict = Verdict::Converged;
            break;
        }
        let mut dir: Vec<f64> = grad.iter().zip(&inv_h).map(|(g, h)| -g * h).collect();
        project_out(&mut dir, &row, &inv_h);
        let slope: f64 = grad.iter().zip(&dir).map(|(g, d)| g * d).sum();
        let slack = 8.0 * f64::EPSILON * (1.0 + value.abs() + g.integral().abs());
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial = LegendreFunction {
                basis: Arc::clone(&g.basis),
                coeffs: g.coeffs.iter().zip(&dir).map(|(c, d)| c + step * d).collect(),
            };
            let tv = i_functional(&trial, alpha)?;
            if tv <= value + opts.armijo * step * slope + slack {
                accepted = Some(trial);
                break;
            }
            step *= 0.5;
        }
        iterations += 1;
        let Some(trial) = accepted else {
            verdict = Verdict::Stalled;
            break;
        };
        g = normalize_axisym(&recenter_1d(&trial, opts.constraint_tol)?.g);
        value = i_functional(&g, alpha)?;
    }
    if verdict == Verdict::IterationCap {
        let (grad, row) = gradients(&g, alpha);
        grad_norm = tangent_grad_norm(&grad, &row);
        if grad_norm <= opts.stat_tol {
            verdict = Verdict::Converged;
        }
    }
    Ok(AxisymResult {
        verdict,
        moment: constraint_moment(&g),
        g,
        value,
        grad_norm,
        iterations,
    })
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct AxisymRow {
    pub alpha: f64,
    /// Smallest I over the successful trials.
    pub min_value: Option<f64>,
    pub mean_iterations: f64,
    pub converged: usize,
    pub failures: usize,
}

/// Multi-start [`minimize_axisym`] for each α; trial `t` of α number `i`
/// starts from `task_rng(seed, i · trials + t)`.
pub fn axisym_scan(
    basis: &Arc<LegendreBasis>,
    alphas: &[f64],
    trials: usize,
    seed: u64,
    opts: &MinimizeOptions,
    exec: Execution,
) -> Result<Vec<AxisymRow>> {
    if let Some(a) = alphas.iter().find(|a| !(**a >= 0.45)) {
        return Err(Error::InvalidInput(format!(
            "axisymmetric scan needs alpha ≥ 0.45, got {a}"
        )));
    }
    let jobs: Vec<f64> = alphas.iter().flat_map(|&a| std::iter::repeat_n(a, trials)).collect();
    let cells = map_indexed(exec, &jobs, |k, &alpha| {
        let g0 = random_axial(basis, 8, 1.0, &mut task_rng(seed, k as u64));
        minimize_axisym(alpha, &g0, opts).map(|r| r.summary())
    });
    Ok(alphas
        .iter()
        .enumerate()
        .map(|(i, &alpha)| {
            let ok: Vec<&AxisymSummary> = cells[i * trials..(i + 1) * trials]
                .iter()
                .filter_map(|c| c.as_ref().ok())
                .collect();
            let converged = ok.iter().filter(|s| s.verdict == Verdict::Converged).count();
            AxisymRow {
                alpha,
                min_value: ok.iter().map(|s| s.value).reduce(f64::min),
                mean_iterations: if ok.is_empty() {
                    0.0
                } else {
                    ok.iter().map(|s| s.iterations as f64).sum::<f64>() / ok.len() as f64
                },
                converged,
                failures: trials - converged,
            }
        })
        .collect())
}

/// Scan rows as `alpha,min_value,iterations` CSV.
pub fn axisym_csv(rows: &[AxisymRow]) -> String {
    let mut out = String::from("alpha,min_value,iterations\n");
    for r in rows {
        let v = r.min_value.map_or("nan".to_string(), |v| format!("{v:.17e}"));
        out.push_str(&format!("{:.17e},{v},{}\n", r.alpha, r.mean_iterations));
    }
    out
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct AxisymProbeReport {
    pub alpha: f64,
    pub floor: f64,
    pub verdict: ProbeVerdict,
    pub i_value: f64,
    /// dI/d ln(1/δ) over the last step; tends to 2(4α − 2).
    pub asymptotic_slope: f64,
    /// (ln(1/δ), I) along the walk.
    pub path: Vec<(f64, f64)>,
}

/// I_α of g_δ(x) = ½u_δ(x), the profile of two antipodal bubbles of
/// concentration δ, by graded quadrature toward both ends of [−1, 1].
/// Returns `(I, ½∫e^{2g}, ∫e^{2g}x)`.
pub fn two_bubble_i(alpha: f64, delta: f64) -> Result<(f64, f64, f64)> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidInput(format!(
            "concentration must lie in (0, 1), got {delta}"
        )));
    }
    let rule = CompositeRule::graded(1e-3 * delta * delta, 1.0, 1.5, 16);
    let (mut energy, mut integral) = (0.0, 0.0);
    let mut samples = Vec::with_capacity(2 * rule.nodes.len());
    // left half x = −1 + w, right half x = 1 − w
    for (sign, flip) in [(-1.0, false), (1.0, true)] {
        for (&w, &q) in rule.nodes.iter().zip(&rule.weights) {
            let (w1, w2) = if flip { (2.0 - w, w) } else { (w, 2.0 - w) };
            let (u, du) = pair(delta, w1, w2);
            let (g, dg) = (0.5 * u, 0.5 * du);
            energy += q * w * (2.0 - w) * dg * dg;
            integral += q * g;
            samples.push((q, 2.0 * g, sign * (1.0 - w)));
        }
    }
    let m = samples.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
    let (mass, moment) = samples.iter().fold((0.0, 0.0), |(a, b), &(q, v, x)| {
        let e = q * (v - m).exp();
        (a + e, b + e * x)
    });
    let log_half = m + (0.5 * mass).ln();
    let value = alpha * energy + 2.0 * integral - 2.0 * log_half;
    Ok((value, log_half.exp(), moment * m.exp()))
}

/// Walk the axial two-bubble family until I_α falls below `floor` or
/// ln(1/δ) reaches `max_log_concentration` (at most 300).
pub fn axisym_probe(alpha: f64, floor: f64, max_log_concentration: f64) -> Result<AxisymProbeReport> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidInput(format!("alpha must be positive, got {alpha}")));
    }
    if !(max_log_concentration > 1.0 && max_log_concentration <= 300.0) {
        return Err(Error::InvalidInput("max_log_concentration must lie in (1, 300]".into()));
    }
    let mut path = Vec::new();
    let mut verdict = ProbeVerdict::NotReached;
    let mut t = 1.0;
    while t <= max_log_concentration {
        let (value, _, _) = two_bubble_i(alpha, (-t).exp())?;
        path.push((t, value));
        if value < floor {
            verdict = ProbeVerdict::UnboundedDescent;
            break;
        }
        t += 1.0;
    }
    let n = path.len();
    let slope = if n >= 2 {
        (path[n - 1].1 - path[n - 2].1) / (path[n - 1].0 - path[n - 2].0)
    } else {
        f64::NAN
    };
    Ok(AxisymProbeReport {
        alpha,
        floor,
        verdict,
        i_value: path[n - 1].1,
        asymptotic_slope: slope,
        path,
    })
}
