use serde::Serialize;
use std::f64::consts::PI;

use super::planar::PlanarField;
use crate::error::{Error, Result};

/// Sampling of a disk by a uniform `n × n` cell-centered grid.
#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct DiskGrid {
    pub radius: f64,
    pub n: usize,
}

impl DiskGrid {
    pub fn step(&self) -> f64 {
        2.0 * self.radius / self.n as f64
    }

    pub fn node(&self, i: usize, j: usize) -> [f64; 2] {
        let h = self.step();
        [-self.radius + (i as f64 + 0.5) * h, -self.radius + (j as f64 + 0.5) * h]
    }

    fn inside(&self, y: [f64; 2]) -> bool {
        y[0] * y[0] + y[1] * y[1] <= self.radius * self.radius
    }
}

/// Arithmetic of the nodal-domain argument: `m` domains that each carry mass
/// greater than 4π need more than 4πm, against the 8πρ available.
#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct MassLedger {
    pub m: usize,
    pub rho: f64,
    /// 4πm, a strict lower bound for the mass the domains require.
    pub required: f64,
    /// 8πρ.
    pub available: f64,
    /// `required ≥ available`, i.e. the strict bound cannot be met.
    pub contradiction: bool,
}

pub fn mass_ledger(m: usize, rho: f64) -> MassLedger {
    let required = 4.0 * PI * m as f64;
    let available = 8.0 * PI * rho;
    MassLedger {
        m,
        rho,
        required,
        available,
        contradiction: required >= available * (1.0 - 1e-15),
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct NodalDomain {
    pub sign: i8,
    pub cells: usize,
    /// ∫(1+|y|²)^l e^v over the domain, when a companion field is supplied.
    pub mass: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct NodalReport {
    pub m: usize,
    pub domains: Vec<NodalDomain>,
    /// Mass on cells where |f| ≤ zero_tol.
    pub nodal_set_mass: f64,
    /// Mass of the whole disk.
    pub total: f64,
    pub zero_tol: f64,
    pub ledger: Option<MassLedger>,
}

impl NodalReport {
    pub fn masses(&self) -> Vec<f64> {
        self.domains.iter().map(|d| d.mass).collect()
    }
}

/// Count the connected components of `{f > tol}` and `{f < −tol}` on the
/// disk grid (4-connectivity through same-sign edge midpoints) and integrate the density of `companion` over
/// each. `zero_tol` defaults to 1e−8 · max|f|. With `rho`, the report
/// carries the [`MassLedger`] for the component count.
pub fn nodal_domains(
    f: impl Fn([f64; 2]) -> f64,
    grid: DiskGrid,
    zero_tol: Option<f64>,
    companion: Option<&PlanarField>,
    rho: Option<f64>,
) -> Result<NodalReport> {
    if grid.n == 0 || !(grid.radius > 0.0) {
        return Err(Error::InvalidInput("nodal grid is empty".into()));
    }
    let n = grid.n;
    let area = grid.step() * grid.step();
    let mut values = vec![f64::NAN; n * n];
    let mut density = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let y = grid.node(i, j);
            if grid.inside(y) {
                values[i * n + j] = f(y);
                density[i * n + j] = companion.map_or(0.0, |v| v.density(y)) * area;
            }
        }
    }
    let max_abs = values
        .iter()
        .filter(|v| v.is_finite())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    if values.iter().all(|v| v.is_nan()) {
        return Err(Error::InvalidInput("no grid node lies in the disk".into()));
    }
    let tol = zero_tol.unwrap_or(1e-8 * max_abs);
    let sign = |k: usize| -> i8 {
        let v = values[k];
        if v.is_nan() || v.abs() <= tol {
            0
        } else if v > 0.0 {
            1
        } else {
            -1
        }
    };
    // Neighbours join only if f keeps its sign at the shared edge midpoint,
    // which keeps sectors meeting at an under-resolved saddle apart.
    let joined = |k: usize, q: usize, s: i8| {
        let (a, b) = (grid.node(k / n, k % n), grid.node(q / n, q % n));
        let fm = f([0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]);
        fm * s as f64 > 0.0
    };
    let mut label = vec![usize::MAX; n * n];
    let mut domains = Vec::new();
    let mut stack = Vec::new();
    for start in 0..n * n {
        let s = sign(start);
        if s == 0 || label[start] != usize::MAX {
            continue;
        }
        let id = domains.len();
        let mut cells = 0;
        let mut mass = 0.0;
        label[start] = id;
        stack.push(start);
        while let Some(k) = stack.pop() {
            cells += 1;
            mass += density[k];
            let (i, j) = (k / n, k % n);
            let mut visit = |q: usize| {
                if label[q] == usize::MAX && sign(q) == s && joined(k, q, s) {
                    label[q] = id;
                    stack.push(q);
                }
            };
            if i > 0 {
                visit(k - n);
            }
            if i + 1 < n {
                visit(k + n);
            }
            if j > 0 {
                visit(k - 1);
            }
            if j + 1 < n {
                visit(k + 1);
            }
        }
        domains.push(NodalDomain { sign: s, cells, mass });
    }
    let nodal_set_mass: f64 = (0..n * n)
        .filter(|&k| !values[k].is_nan() && sign(k) == 0)
        .map(|k| density[k])
        .sum();
    let total: f64 = density.iter().sum();
    let m = domains.len();
    Ok(NodalReport {
        m,
        domains,
        nodal_set_mass,
        total,
        zero_tol: tol,
        ledger: rho.map(|r| mass_ledger(m, r)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bridge::planar::v_star_field;
    use approx::assert_abs_diff_eq;

    #[test]
    fn degree_two_harmonic_has_four_domains() {
        let grid = DiskGrid { radius: 2.0, n: 200 };
        let f = |y: [f64; 2]| (y[0] * y[0] - y[1] * y[1]) * (-(y[0] * y[0] + y[1] * y[1])).exp();
        let v = v_star_field(1.5).unwrap();
        let r = nodal_domains(f, grid, None, Some(&v), Some(1.5)).unwrap();
        assert_eq!(r.m, 4);
        assert_eq!(r.domains.iter().filter(|d| d.sign > 0).count(), 2);
        let sum: f64 = r.masses().iter().sum::<f64>() + r.nodal_set_mass;
        assert_abs_diff_eq!(sum, r.total, epsilon = 1e-8 * r.total);
        assert!(r.masses().iter().all(|m| *m >= 0.0));
        assert!(r.ledger.unwrap().contradiction);
    }

    #[test]
    fn saddle_of_degree_three_keeps_six_sectors() {
        let f = |y: [f64; 2]| {
            let (r, t) = (y[0].hypot(y[1]), y[1].atan2(y[0]));
            r.powi(3) * (3.0 * t).cos() * (-r * r).exp()
        };
        let r = nodal_domains(f, DiskGrid { radius: 2.0, n: 200 }, None, None, None).unwrap();
        assert_eq!(r.m, 6);
    }

    #[test]
    fn linear_field_has_two_domains() {
        let r = nodal_domains(|y| y[0], DiskGrid { radius: 1.0, n: 101 }, None, None, None).unwrap();
        assert_eq!(r.m, 2);
        assert!(r.ledger.is_none());
    }

    #[test]
    fn empty_grid_is_rejected() {
        assert!(nodal_domains(|y| y[0], DiskGrid { radius: 1.0, n: 0 }, None, None, None).is_err());
    }

    #[test]
    fn ledger_arithmetic() {
        let l = mass_ledger(3, 1.5);
        assert_abs_diff_eq!(l.required, 12.0 * PI, epsilon = 1e-12);
        assert_abs_diff_eq!(l.available, 12.0 * PI, epsilon = 1e-12);
        assert!(l.contradiction);
        assert!(mass_ledger(3, 1.4).contradiction);
        assert!(!mass_ledger(3, 1.6).contradiction);
        let l = mass_ledger(4, 2.0);
        assert_abs_diff_eq!(l.required, 16.0 * PI, epsilon = 1e-12);
        assert!(l.contradiction);
        assert!(!mass_ledger(4, 2.1).contradiction);
    }
}
