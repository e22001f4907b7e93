use serde::Serialize;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::CompositeRule;
use crate::sphere::{SphereField, SphereGrid};

/// Log of one conformal bubble of concentration `delta` centered at the
/// pole `w = 0`, as a function of `w = 1 ± μ` (the Möbius factor with
/// `|a| = 1 − δ`), together with its `w`-derivative.
fn bubble(delta: f64, w: f64) -> (f64, f64) {
    let a = delta * delta + 2.0 * (1.0 - delta) * w;
    let value = 2.0 * (delta * (2.0 - delta)).ln() - 2.0 * a.ln();
    (value, -4.0 * (1.0 - delta) / a)
}

/// The balanced pair `u = ln(½e^{u₁} + ½e^{u₂})` with bubbles at both poles,
/// and du/dμ, given `w₁ = 1 + μ` and `w₂ = 1 − μ` separately so neither
/// loses precision near its pole.
pub(crate) fn pair(delta: f64, w1: f64, w2: f64) -> (f64, f64) {
    let (u1, d1) = bubble(delta, w1);
    let (u2, d2) = bubble(delta, w2);
    let m = u1.max(u2);
    let (e1, e2) = ((u1 - m).exp(), (u2 - m).exp());
    let value = m + (0.5 * (e1 + e2)).ln();
    (value, (e1 * d1 - e2 * d2) / (e1 + e2))
}

/// Two antipodal conformal bubbles of equal concentration on the grid. Its
/// center of mass vanishes by symmetry and ∫e^u dω = 1.
pub fn two_bubble_field(grid: &Arc<SphereGrid>, delta: f64) -> Result<SphereField> {
    check_delta(delta)?;
    Ok(SphereField::from_fn(grid, |x| pair(delta, 1.0 + x[2], 1.0 - x[2]).0))
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "concentration must lie in (0, 1), got {delta}"
        )))
    }
}

/// J_α of [`two_bubble_field`] by one-dimensional quadrature in `w = 1 + μ`,
/// graded toward the pole so concentrations far below grid resolution are
/// resolved. Returns `(J, ∫e^u dω)`.
pub fn two_bubble_j(alpha: f64, delta: f64) -> Result<(f64, f64)> {
    check_delta(delta)?;
    // the pair is even in μ, so ½∫_{-1}^{1} dμ = ∫_0^1 dw
    let rule = CompositeRule::graded(1e-3 * delta * delta, 1.0, 1.5, 16);
    let mut energy = 0.0;
    let mut mean = 0.0;
    let mut values = Vec::with_capacity(rule.nodes.len());
    for (&w, &q) in rule.nodes.iter().zip(&rule.weights) {
        let (u, du) = pair(delta, w, 2.0 - w);
        energy += q * w * (2.0 - w) * du * du;
        mean += q * u;
        values.push(u);
    }
    let shift = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mass: f64 = rule
        .weights
        .iter()
        .zip(&values)
        .map(|(q, u)| q * (u - shift).exp())
        .sum();
    let log_mass = shift + mass.ln();
    Ok((0.25 * alpha * energy + mean - log_mass, log_mass.exp()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeVerdict {
    /// J fell below the floor along the family.
    UnboundedDescent,
    /// The family never reached the floor; no claim is made.
    NotReached,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ProbePoint {
    /// ln(1/δ).
    pub log_concentration: f64,
    pub j_value: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ProbeReport {
    pub alpha: f64,
    pub floor: f64,
    pub verdict: ProbeVerdict,
    pub j_value: f64,
    /// dJ/d ln(1/δ) over the last step; tends to 4α − 2.
    pub asymptotic_slope: f64,
    pub path: Vec<ProbePoint>,
}

/// Walk the two-bubble family toward concentration until J_α drops below
/// `floor` or `ln(1/δ)` reaches `max_log_concentration`.
pub fn two_bubble_probe(alpha: f64, floor: f64, max_log_concentration: f64) -> Result<ProbeReport> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidInput(format!("alpha must be positive, got {alpha}")));
    }
    if !(max_log_concentration > 1.0 && max_log_concentration <= 300.0) {
        return Err(Error::InvalidInput("max_log_concentration must lie in (1, 300]".into()));
    }
    let mut path = Vec::new();
    let mut t = 1.0;
    let mut verdict = ProbeVerdict::NotReached;
    while t <= max_log_concentration {
        let (j, _) = two_bubble_j(alpha, (-t).exp())?;
        path.push(ProbePoint {
            log_concentration: t,
            j_value: j,
        });
        if j < floor {
            verdict = ProbeVerdict::UnboundedDescent;
            break;
        }
        t += 1.0;
    }
    let n = path.len();
    let slope = if n >= 2 {
        (path[n - 1].j_value - path[n - 2].j_value) / (path[n - 1].log_concentration - path[n - 2].log_concentration)
    } else {
        f64::NAN
    };
    Ok(ProbeReport {
        alpha,
        floor,
        verdict,
        j_value: path[n - 1].j_value,
        asymptotic_slope: slope,
        path,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::onofri::functional::{center_of_mass, j_alpha};
    use approx::assert_abs_diff_eq;

    #[test]
    fn one_dimensional_evaluation_matches_grid() {
        let g = SphereGrid::default_grid();
        for delta in [0.5, 0.8] {
            let u = two_bubble_field(&g, delta).unwrap();
            let (j, mass) = two_bubble_j(0.6, delta).unwrap();
            assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(u.log_exp_integral(), 0.0, epsilon = 1e-10);
            assert_abs_diff_eq!(j, j_alpha(&u, 0.6).unwrap(), epsilon = 1e-8);
            assert!(center_of_mass(&u).iter().all(|c| c.abs() < 1e-14));
        }
    }

    #[test]
    fn mass_stays_one_under_concentration() {
        for t in [5.0, 40.0, 120.0] {
            let (_, mass) = two_bubble_j(0.45, f64::exp(-t)).unwrap();
            assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn slope_tends_to_4_alpha_minus_2() {
        for alpha in [0.45, 0.6, 1.0] {
            let (a, _) = two_bubble_j(alpha, f64::exp(-60.0)).unwrap();
            let (b, _) = two_bubble_j(alpha, f64::exp(-61.0)).unwrap();
            assert_abs_diff_eq!(b - a, 4.0 * alpha - 2.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn probe_verdicts() {
        let r = two_bubble_probe(0.45, -10.0, 300.0).unwrap();
        assert_eq!(r.verdict, ProbeVerdict::UnboundedDescent);
        assert!(r.j_value < -10.0);
        let r = two_bubble_probe(0.6, -10.0, 40.0).unwrap();
        assert_eq!(r.verdict, ProbeVerdict::NotReached);
        assert!(r.path.iter().all(|p| p.j_value > 0.0));
    }
}
