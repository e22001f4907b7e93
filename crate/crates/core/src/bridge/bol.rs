use serde::Serialize;
use std::f64::consts::PI;

use super::eigen::{domain_mass, first_eigenvalue, Domain, EigenOptions};
use super::planar::fd_laplacian;
use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::quadrature::CompositeRule;

/// Where the supersolution and total-mass hypotheses are checked.
#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    Plane,
    Bounded { domain: Domain },
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum BolVerdict {
    /// λ₁ > 0, or a hypothesis fails: the implication says nothing.
    Vacuous,
    /// λ₁ ≤ 0 and the subdomain carries mass > 4π.
    Confirmed,
    /// λ₁ ≤ 0 on valid hypotheses but mass ≤ 4π.
    Violated,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct BolAudit {
    pub domain: Domain,
    pub lambda1: f64,
    /// ∫_ω e^g dy.
    pub mass: f64,
    /// ∫_Ω e^g dy.
    pub total_mass: f64,
    /// min over Ω of Δg + e^g.
    pub supersolution_margin: f64,
    pub hypotheses_hold: bool,
    pub verdict: BolVerdict,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct BolOptions {
    pub eigen: EigenOptions,
    /// Margins at or below this count as zero.
    pub margin_tol: f64,
    /// Finite-difference step for Δg.
    pub fd_step: f64,
    /// Radius sampled when Ω is the whole plane.
    pub plane_radius: f64,
}

impl Default for BolOptions {
    fn default() -> Self {
        Self {
            eigen: EigenOptions::default(),
            margin_tol: 1e-6,
            fd_step: 1e-3,
            plane_radius: 50.0,
        }
    }
}

fn sample_points(region: &Region, plane_radius: f64) -> Vec<[f64; 2]> {
    let disk = |radius: f64| {
        let mut pts = vec![[0.0, 0.0]];
        for i in 1..=80 {
            let r = radius * i as f64 / 80.0;
            for j in 0..48 {
                let t = 2.0 * PI * j as f64 / 48.0;
                pts.push([r * t.cos(), r * t.sin()]);
            }
        }
        pts
    };
    match *region {
        Region::Plane => disk(plane_radius),
        Region::Bounded {
            domain: Domain::Disk { radius },
        } => disk(radius),
        Region::Bounded {
            domain: Domain::Rectangle { width, height },
        } => {
            let mut pts = Vec::new();
            for i in 0..=80 {
                for j in 0..=80 {
                    pts.push([width * (i as f64 / 80.0 - 0.5), height * (j as f64 / 80.0 - 0.5)]);
                }
            }
            pts
        }
    }
}

/// min over Ω of Δg + e^g, sampled on a polar (or tensor) grid of Ω.
pub fn supersolution_margin(g: &(dyn Fn([f64; 2]) -> f64 + Sync), region: &Region, opts: &BolOptions) -> f64 {
    sample_points(region, opts.plane_radius)
        .into_iter()
        .map(|y| fd_laplacian(&|p| g(p), y, opts.fd_step) + g(y).exp())
        .fold(f64::INFINITY, f64::min)
}

/// ∫_Ω e^g dy; the plane is mapped through r = t/(1 − t).
pub fn region_mass(g: &(dyn Fn([f64; 2]) -> f64 + Sync), region: &Region) -> f64 {
    match region {
        Region::Bounded { domain } => domain_mass(g, domain),
        Region::Plane => {
            let breaks: Vec<f64> = (0..=20).map(|k| k as f64 / 20.0).collect();
            let rule = CompositeRule::from_breaks(&breaks, 20);
            let n_theta = 64;
            rule.integrate(|t| {
                let r = t / (1.0 - t);
                let s: f64 = (0..n_theta)
                    .map(|j| {
                        let a = 2.0 * PI * j as f64 / n_theta as f64;
                        g([r * a.cos(), r * a.sin()]).exp()
                    })
                    .sum();
                s * 2.0 * PI / n_theta as f64 * r / ((1.0 - t) * (1.0 - t))
            })
        }
    }
}

fn classify(lambda1: f64, mass: f64, hypotheses: bool) -> BolVerdict {
    if !hypotheses || lambda1 > 0.0 {
        BolVerdict::Vacuous
    } else if mass > 4.0 * PI {
        BolVerdict::Confirmed
    } else {
        BolVerdict::Violated
    }
}

/// Audit the eigenvalue/mass implication on each subdomain of `family`:
/// if Δg + e^g > 0 on Ω, ∫_Ω e^g ≤ 8π, ω ⊂ Ω and λ₁(ω) ≤ 0 for
/// −(Δ + e^g), then ∫_ω e^g > 4π.
pub fn bol_audit(
    g: &(dyn Fn([f64; 2]) -> f64 + Sync),
    omega: Region,
    family: &[Domain],
    opts: &BolOptions,
    exec: Execution,
) -> Result<Vec<BolAudit>> {
    let margin = supersolution_margin(g, &omega, opts);
    let total_mass = region_mass(g, &omega);
    let global = margin > opts.margin_tol && total_mass <= 8.0 * PI * (1.0 + 1e-12);
    let cells = map_indexed(exec, family, |_, domain| -> Result<BolAudit> {
        let inside = match &omega {
            Region::Plane => true,
            Region::Bounded { domain: big } => domain.within(big),
        };
        let lambda1 = first_eigenvalue(g, domain, &opts.eigen)?.lambda1;
        let mass = domain_mass(g, domain);
        let hypotheses_hold = global && inside;
        Ok(BolAudit {
            domain: *domain,
            lambda1,
            mass,
            total_mass,
            supersolution_margin: margin,
            hypotheses_hold,
            verdict: classify(lambda1, mass, hypotheses_hold),
        })
    });
    cells.into_iter().collect()
}

/// Radius in `[lo, hi]` where λ₁ of the disk crosses zero, by bisection,
/// together with the mass of that disk.
pub fn critical_radius(
    g: &(dyn Fn([f64; 2]) -> f64 + Sync),
    lo: f64,
    hi: f64,
    opts: &EigenOptions,
    tol: f64,
) -> Result<(f64, f64)> {
    let lambda = |r: f64| first_eigenvalue(g, &Domain::Disk { radius: r }, opts).map(|e| e.lambda1);
    let (mut a, mut b) = (lo, hi);
    let (la, lb) = (lambda(a)?, lambda(b)?);
    if !(la > 0.0 && lb < 0.0) {
        return Err(Error::InvalidInput(format!(
            "λ₁ does not change sign on [{lo}, {hi}] ({la:.3e}, {lb:.3e})"
        )));
    }
    while b - a > tol {
        let m = 0.5 * (a + b);
        if lambda(m)? > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    let r = 0.5 * (a + b);
    Ok((r, domain_mass(g, &Domain::Disk { radius: r })))
}
