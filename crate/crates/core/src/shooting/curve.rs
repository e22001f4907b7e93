use serde::Serialize;

use super::{shoot_resolved, ShotVerdict, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};

/// Number of samples used to locate roots of β(s) = target.
pub const CURVE_SAMPLES: usize = 129;
/// Roots where |β'(s)| falls below this are flagged for review.
pub const TANGENCY_SLOPE: f64 = 1e-6;

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct BetaRow {
    pub s: f64,
    pub beta: f64,
    pub beta_slope: f64,
    pub verdict: ShotVerdict,
}

/// `n` equally spaced shots on `[s_min, s_max]`, each via [`shoot_resolved`].
pub fn beta_curve(l: f64, s_min: f64, s_max: f64, n: usize, exec: Execution) -> Result<Vec<BetaRow>> {
    if n < 2 || !(s_max > s_min) {
        return Err(Error::InvalidInput(format!(
            "beta curve needs n ≥ 2 and s_min < s_max (n = {n})"
        )));
    }
    let ss: Vec<f64> = (0..n)
        .map(|i| s_min + (s_max - s_min) * i as f64 / (n - 1) as f64)
        .collect();
    let rows = map_indexed(exec, &ss, |_, &s| {
        shoot_resolved(l, s, DEFAULT_TOL).map(|sol| BetaRow {
            s,
            beta: sol.beta_mass,
            beta_slope: sol.beta_slope,
            verdict: sol.verdict,
        })
    });
    rows.into_iter().collect()
}

/// β(s) table as `s,beta,verdict` CSV.
pub fn curve_csv(rows: &[BetaRow]) -> String {
    let mut out = String::from("s,beta,verdict\n");
    for r in rows {
        let v = serde_json::to_value(r.verdict).unwrap_or_default();
        out.push_str(&format!("{:.17e},{:.17e},{}\n", r.s, r.beta, v.as_str().unwrap_or("")));
    }
    out
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RootReport {
    pub s: f64,
    pub beta: f64,
    /// dβ/ds at the root by central difference.
    pub dbeta_ds: f64,
    pub near_tangent: bool,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct UniquenessReport {
    pub l: f64,
    pub beta_target: f64,
    pub s_bracket: [f64; 2],
    pub roots: Vec<RootReport>,
    /// Whether the target lies where uniqueness is predicted: any target
    /// for l ≤ 1, and 2l < β < 2(2+l) for l > 1.
    pub in_window: bool,
    /// Sample shots that were not accepted.
    pub unaccepted_samples: usize,
}

impl UniquenessReport {
    pub fn s_values(&self) -> Vec<f64> {
        self.roots.iter().map(|r| r.s).collect()
    }

    /// In-window targets must have at most one root.
    pub fn violates_uniqueness(&self) -> bool {
        self.in_window && self.roots.len() > 1
    }
}

pub fn uniqueness_window(l: f64, beta: f64) -> bool {
    l <= 1.0 || (2.0 * l < beta && beta < 2.0 * (2.0 + l))
}

/// All roots of β(s) = `beta_target` on `s_bracket`: sample
/// [`CURVE_SAMPLES`] shots, bisect every sign change to width `tol`.
pub fn solutions_at_beta(
    l: f64,
    beta_target: f64,
    s_bracket: [f64; 2],
    tol: f64,
    exec: Execution,
) -> Result<UniquenessReport> {
    let rows = beta_curve(l, s_bracket[0], s_bracket[1], CURVE_SAMPLES, exec)?;
    let beta_of = |s: f64| -> Result<Option<f64>> {
        let sol = shoot_resolved(l, s, DEFAULT_TOL)?;
        Ok(sol.accepted().then_some(sol.beta_mass))
    };
    let brackets: Vec<(f64, f64, f64)> = rows
        .windows(2)
        .filter(|w| w[0].verdict == ShotVerdict::Finite && w[1].verdict == ShotVerdict::Finite)
        .filter_map(|w| {
            let (fa, fb) = (w[0].beta - beta_target, w[1].beta - beta_target);
            (fa == 0.0 || fa * fb < 0.0).then_some((w[0].s, w[1].s, fa))
        })
        .collect();
    let found = map_indexed(exec, &brackets, |_, &(a0, b0, fa0)| -> Result<Option<RootReport>> {
        let (mut a, mut b, fa) = (a0, b0, fa0);
        if fa != 0.0 {
            while b - a > tol {
                let m = 0.5 * (a + b);
                match beta_of(m)? {
                    Some(beta) if (beta - beta_target) * fa > 0.0 => a = m,
                    Some(_) => b = m,
                    None => return Ok(None),
                }
            }
        } else {
            b = a;
        }
        let s = 0.5 * (a + b);
        let h = 1e-4;
        let (Some(bp), Some(bm), Some(beta)) = (beta_of(s + h)?, beta_of(s - h)?, beta_of(s)?) else {
            return Ok(None);
        };
        let dbeta_ds = (bp - bm) / (2.0 * h);
        Ok(Some(RootReport {
            s,
            beta,
            dbeta_ds,
            near_tangent: dbeta_ds.abs() < TANGENCY_SLOPE,
        }))
    });
    let mut roots = Vec::new();
    for r in found {
        if let Some(r) = r? {
            roots.push(r);
        }
    }
    Ok(UniquenessReport {
        l,
        beta_target,
        s_bracket,
        roots,
        in_window: uniqueness_window(l, beta_target),
        unaccepted_samples: rows.iter().filter(|r| r.verdict != ShotVerdict::Finite).count(),
    })
}
