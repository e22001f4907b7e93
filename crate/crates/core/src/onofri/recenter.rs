use nalgebra::{Matrix3, Vector3};

use super::functional::center_of_mass;
use crate::error::{Error, Result};
use crate::mobius::{norm, Mobius, Vec3};
use crate::sphere::SphereField;

const MAX_ROUNDS: usize = 8;
const MAX_NEWTON: usize = 60;
const FD_STEP: f64 = 1e-7;

/// Output of [`recenter`].
#[derive(Debug, Clone)]
pub struct Recentered {
    /// `u∘T + ln det dT`, centered.
    pub u: SphereField,
    /// Möbius maps applied, one per resampling round.
    pub rounds: Vec<Mobius>,
    pub com_norm: f64,
}

/// Weighted nodes `(e^{u−max u} w, x)` of the density.
fn density_nodes(u: &SphereField) -> (Vec<f64>, Vec<Vec3>) {
    let grid = u.grid();
    let shift = u.max();
    let n_phi = grid.n_phi();
    let mut weights = Vec::with_capacity(grid.len());
    for i in 0..grid.n_mu() {
        let w = grid.weight(i);
        for v in u.row(i) {
            weights.push(w * (v - shift).exp());
        }
    }
    let points = grid.points();
    debug_assert_eq!(points.len(), n_phi * grid.n_mu());
    (weights, points)
}

/// Center of mass of `u∘T_a + ln det dT_a`, computed by pushing the density
/// of `u` forward through `T_a⁻¹ = T_{−a}` (no resampling needed).
fn pushed_com(weights: &[f64], points: &[Vec3], b: Vec3) -> Vec3 {
    let map = Mobius::new(b);
    let mut s = [0.0; 3];
    let mut mass = 0.0;
    for (w, x) in weights.iter().zip(points) {
        let y = map.apply(*x);
        mass += w;
        for k in 0..3 {
            s[k] += w * y[k];
        }
    }
    [s[0] / mass, s[1] / mass, s[2] / mass]
}

/// Damped Newton solve of `pushed_com(b) = 0` over the open unit ball.
fn solve_parameter(weights: &[f64], points: &[Vec3], tol: f64) -> Result<Vec3> {
    let mut b = [0.0; 3];
    let mut f = pushed_com(weights, points, b);
    let mut res = norm(f);
    for _ in 0..MAX_NEWTON {
        if res <= 0.1 * tol {
            return Ok(b);
        }
        let mut jac = Matrix3::zeros();
        for k in 0..3 {
            let mut bp = b;
            let mut bm = b;
            bp[k] += FD_STEP;
            bm[k] -= FD_STEP;
            let fp = pushed_com(weights, points, bp);
            let fm = pushed_com(weights, points, bm);
            for r in 0..3 {
                jac[(r, k)] = (fp[r] - fm[r]) / (2.0 * FD_STEP);
            }
        }
        let step = jac
            .lu()
            .solve(&Vector3::new(-f[0], -f[1], -f[2]))
            .ok_or(Error::NonConvergence {
                what: "recenter (singular Jacobian)",
                iterations: 0,
                residual: res,
            })?;
        let mut t = 1.0;
        loop {
            let cand = [b[0] + t * step[0], b[1] + t * step[1], b[2] + t * step[2]];
            if norm(cand) < 1.0 - 1e-12 {
                let fc = pushed_com(weights, points, cand);
                let rc = norm(fc);
                if rc < res || t < 1e-10 {
                    b = cand;
                    f = fc;
                    res = rc;
                    break;
                }
            }
            t *= 0.5;
            if t < 1e-12 {
                return Err(Error::NonConvergence {
                    what: "recenter (line search)",
                    iterations: 0,
                    residual: res,
                });
            }
        }
    }
    if res <= tol {
        Ok(b)
    } else {
        Err(Error::NonConvergence {
            what: "recenter",
            iterations: MAX_NEWTON,
            residual: res,
        })
    }
}

/// Newton solve for a degree-1 correction `u + c·x` whose grid center of
/// mass vanishes. Used only to absorb the resampling error left by the
/// Möbius rounds, so `c` is tiny.
fn polish(u: &SphereField, tol: f64) -> Result<SphereField> {
    let mut c = Vector3::zeros();
    let mut current = u.clone();
    for _ in 0..MAX_NEWTON {
        let com = center_of_mass(&current);
        if norm(com) <= tol {
            return Ok(current);
        }
        let shift = current.max();
        let density = current.map(|v| (v - shift).exp());
        let mass = density.integrate();
        let mut jac = Matrix3::zeros();
        for a in 0..3 {
            for b in a..3 {
                let m = density.mul_fn(|x| x[a] * x[b]).integrate() / mass - com[a] * com[b];
                jac[(a, b)] = m;
                jac[(b, a)] = m;
            }
        }
        let step = jac
            .lu()
            .solve(&Vector3::new(-com[0], -com[1], -com[2]))
            .ok_or(Error::NonConvergence {
                what: "recenter (degree-1 correction)",
                iterations: 0,
                residual: norm(com),
            })?;
        c += step;
        let linear = SphereField::from_fn(u.grid(), |x| c[0] * x[0] + c[1] * x[1] + c[2] * x[2]);
        current = u.zip_map(&linear, |a, b| a + b);
    }
    Err(Error::NonConvergence {
        what: "recenter (degree-1 correction)",
        iterations: MAX_NEWTON,
        residual: norm(center_of_mass(&current)),
    })
}

/// Pull `u` back by a Möbius map so that its center of mass vanishes:
/// `u' = u∘T_a + ln det dT_a`, with `a` found by damped Newton iteration.
///
/// Each round resamples through the spectrum of `u`. Rounds repeat while they
/// reduce the center of mass tenfold; what is left (the resampling error of a
/// field that is not band-limited after composition) is removed by a final
/// degree-1 correction of the same size.
pub fn recenter(u: &SphereField, tol: f64) -> Result<Recentered> {
    let mut current = u.clone();
    let mut rounds = Vec::new();
    let mut com = norm(center_of_mass(&current));
    while com > tol && rounds.len() < MAX_ROUNDS {
        let (weights, points) = density_nodes(&current);
        let b = solve_parameter(&weights, &points, tol)?;
        let map = Mobius::new(b).inverse();
        let spec = current.spectrum();
        let mapped: Vec<Vec3> = points.iter().map(|x| map.apply(*x)).collect();
        let values: Vec<f64> = spec
            .eval_many(&mapped)
            .into_iter()
            .zip(&points)
            .map(|(v, x)| v + map.log_jacobian(*x))
            .collect();
        let next = SphereField::new(current.grid().clone(), values)?;
        let next_com = norm(center_of_mass(&next));
        let improved = next_com < 0.1 * com;
        if next_com < com {
            current = next;
            com = next_com;
            rounds.push(map);
        }
        if !improved {
            break;
        }
    }
    if com > tol {
        current = polish(&current, tol)?;
        com = norm(center_of_mass(&current));
    }
    Ok(Recentered {
        u: current,
        rounds,
        com_norm: com,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::onofri::functional::j_alpha;
    use crate::sphere::SphereGrid;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_is_already_centered() {
        let g = SphereGrid::default_grid();
        let r = recenter(&SphereField::constant(&g, 0.0), 1e-10).unwrap();
        assert!(r.rounds.is_empty());
        assert_eq!(r.u.sup_norm(), 0.0);
    }

    #[test]
    fn tilted_field_is_centered_and_j1_preserved() {
        let g = SphereGrid::default_grid();
        let u = SphereField::from_fn(&g, |x| 0.3 * x[2]);
        let r = recenter(&u, 1e-10).unwrap();
        assert!(norm(center_of_mass(&r.u)) <= 1e-10);
        assert_abs_diff_eq!(j_alpha(&r.u, 1.0).unwrap(), j_alpha(&u, 1.0).unwrap(), epsilon = 1e-8);
        assert_abs_diff_eq!(r.u.log_exp_integral(), u.log_exp_integral(), epsilon = 1e-10);
    }

    #[test]
    fn conformal_factor_is_undone() {
        let g = SphereGrid::default_grid();
        let t = Mobius::new([0.0, 0.0, 0.5]);
        let u = SphereField::from_fn(&g, |x| t.log_jacobian(x));
        let r = recenter(&u, 1e-10).unwrap();
        let mean = r.u.integrate();
        assert!(r.u.shifted(-mean).sup_norm() <= 1e-6);
    }

    #[test]
    fn off_axis_field() {
        let g = SphereGrid::default_grid();
        let u = SphereField::from_fn(&g, |x| 0.8 * x[0] - 0.5 * x[1] * x[2] + 0.4 * x[1]);
        let r = recenter(&u, 1e-10).unwrap();
        assert!(r.com_norm <= 1e-10);
        assert_abs_diff_eq!(j_alpha(&r.u, 1.0).unwrap(), j_alpha(&u, 1.0).unwrap(), epsilon = 1e-8);
    }
}
