use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::CompositeRule;

/// Bounded planar domain centered at the origin.
#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    Disk {
        radius: f64,
    },
    /// `[−width/2, width/2] × [−height/2, height/2]`.
    Rectangle {
        width: f64,
        height: f64,
    },
}

impl Domain {
    pub fn contains(&self, y: [f64; 2]) -> bool {
        match *self {
            Domain::Disk { radius } => y[0] * y[0] + y[1] * y[1] <= radius * radius,
            Domain::Rectangle { width, height } => y[0].abs() <= 0.5 * width && y[1].abs() <= 0.5 * height,
        }
    }

    /// Whether `self` lies inside `other`.
    pub fn within(&self, other: &Domain) -> bool {
        match *self {
            Domain::Disk { radius } => match *other {
                Domain::Disk { radius: big } => radius <= big,
                Domain::Rectangle { width, height } => 2.0 * radius <= width.min(height),
            },
            Domain::Rectangle { width, height } => {
                let (w, h) = (0.5 * width, 0.5 * height);
                [[w, h], [-w, h], [w, -h], [-w, -h]].iter().all(|c| other.contains(*c))
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Domain::Disk { radius } => radius > 0.0 && radius.is_finite(),
            Domain::Rectangle { width, height } => {
                width > 0.0 && height > 0.0 && width.is_finite() && height.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("degenerate domain {self:?}")))
        }
    }
}

/// ∫_ω e^g dy by Gauss–Legendre panels (polar for disks).
pub fn domain_mass(g: &(dyn Fn([f64; 2]) -> f64 + Sync), domain: &Domain) -> f64 {
    match *domain {
        Domain::Disk { radius } => {
            let breaks: Vec<f64> = (0..=16).map(|k| radius * k as f64 / 16.0).collect();
            let rule = CompositeRule::from_breaks(&breaks, 16);
            let n_theta = 128;
            rule.integrate(|r| {
                let s: f64 = (0..n_theta)
                    .map(|j| {
                        let t = 2.0 * PI * j as f64 / n_theta as f64;
                        g([r * t.cos(), r * t.sin()]).exp()
                    })
                    .sum();
                s * 2.0 * PI / n_theta as f64 * r
            })
        }
        Domain::Rectangle { width, height } => {
            let bx: Vec<f64> = (0..=16).map(|k| width * (k as f64 / 16.0 - 0.5)).collect();
            let by: Vec<f64> = (0..=16).map(|k| height * (k as f64 / 16.0 - 0.5)).collect();
            let rx = CompositeRule::from_breaks(&bx, 16);
            let ry = CompositeRule::from_breaks(&by, 16);
            rx.integrate(|x| ry.integrate(|y| g([x, y]).exp()))
        }
    }
}

/// Symmetric block-tridiagonal matrix whose off-diagonal blocks are scalar
/// multiples of the identity, with a block-constant positive weight.
struct BlockSystem {
    diag: Vec<DMatrix<f64>>,
    coupling: Vec<f64>,
    weight: Vec<f64>,
    nodes: Vec<[f64; 2]>,
}

impl BlockSystem {
    fn block(&self) -> usize {
        self.diag[0].nrows()
    }

    fn matvec(&self, x: &[DVector<f64>]) -> Vec<DVector<f64>> {
        let nb = self.diag.len();
        (0..nb)
            .map(|i| {
                let mut y = &self.diag[i] * &x[i];
                if i > 0 {
                    y += self.coupling[i - 1] * &x[i - 1];
                }
                if i + 1 < nb {
                    y += self.coupling[i] * &x[i + 1];
                }
                y
            })
            .collect()
    }

    fn weighted(&self, x: &[DVector<f64>]) -> Vec<DVector<f64>> {
        x.iter().zip(&self.weight).map(|(v, w)| v * *w).collect()
    }

    /// Block LDLᵀ of `A − σW`; returns the Cholesky factors of the Schur
    /// complements, or `None` if it is not positive definite.
    fn factor(&self, sigma: f64) -> Option<Vec<Cholesky<f64, Dyn>>> {
        let m = self.block();
        let mut out: Vec<Cholesky<f64, Dyn>> = Vec::with_capacity(self.diag.len());
        for (i, d) in self.diag.iter().enumerate() {
            let mut s = d.clone();
            for k in 0..m {
                s[(k, k)] -= sigma * self.weight[i];
            }
            if i > 0 {
                let c = self.coupling[i - 1];
                let inv = out[i - 1].inverse();
                s -= inv * (c * c);
            }
            out.push(Cholesky::new(s)?);
        }
        Some(out)
    }

    fn solve(&self, factors: &[Cholesky<f64, Dyn>], rhs: &[DVector<f64>]) -> Vec<DVector<f64>> {
        let nb = rhs.len();
        let mut y: Vec<DVector<f64>> = Vec::with_capacity(nb);
        for i in 0..nb {
            let mut b = rhs[i].clone();
            if i > 0 {
                b -= self.coupling[i - 1] * factors[i - 1].solve(&y[i - 1]);
            }
            y.push(b);
        }
        let mut x = vec![DVector::zeros(0); nb];
        for i in (0..nb).rev() {
            let mut b = y[i].clone();
            if i + 1 < nb {
                b -= self.coupling[i] * &x[i + 1];
            }
            x[i] = factors[i].solve(&b);
        }
        x
    }
}

fn dot(a: &[DVector<f64>], b: &[DVector<f64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

/// Polar discretization of −Δ − e^g on a disk, multiplied through by r:
/// rings at r_i = (i − ½)Δr with Δr = R/(N + ½), so the Dirichlet circle
/// falls exactly on r_{N+1} and the origin needs no special stencil.
fn disk_system(g: &dyn Fn([f64; 2]) -> f64, radius: f64, rings: usize, n_theta: usize) -> BlockSystem {
    let dr = radius / (rings as f64 + 0.5);
    let dtheta = 2.0 * PI / n_theta as f64;
    let mut diag = Vec::with_capacity(rings);
    let mut weight = Vec::with_capacity(rings);
    let mut coupling = Vec::with_capacity(rings.saturating_sub(1));
    let mut nodes = Vec::with_capacity(rings * n_theta);
    for i in 1..=rings {
        let r = (i as f64 - 0.5) * dr;
        let (inner, outer) = ((i as f64 - 1.0) * dr, i as f64 * dr);
        let radial = (inner + outer) / (dr * dr);
        let angular = 1.0 / (r * dtheta * dtheta);
        let mut d = DMatrix::zeros(n_theta, n_theta);
        for j in 0..n_theta {
            let t = j as f64 * dtheta;
            let y = [r * t.cos(), r * t.sin()];
            nodes.push(y);
            d[(j, j)] = radial + 2.0 * angular - r * g(y).exp();
            if n_theta > 1 {
                let next = (j + 1) % n_theta;
                d[(j, next)] -= angular;
                d[(next, j)] -= angular;
            }
        }
        diag.push(d);
        weight.push(r);
        if i < rings {
            coupling.push(-outer / (dr * dr));
        }
    }
    BlockSystem {
        diag,
        coupling,
        weight,
        nodes,
    }
}

/// Five-point discretization on a rectangle with `nx × ny` interior nodes.
fn rectangle_system(g: &dyn Fn([f64; 2]) -> f64, width: f64, height: f64, nx: usize, ny: usize) -> BlockSystem {
    let hx = width / (nx + 1) as f64;
    let hy = height / (ny + 1) as f64;
    let mut diag = Vec::with_capacity(nx);
    let mut nodes = Vec::with_capacity(nx * ny);
    for i in 1..=nx {
        let x = -0.5 * width + i as f64 * hx;
        let mut d = DMatrix::zeros(ny, ny);
        for j in 0..ny {
            let y = [x, -0.5 * height + (j + 1) as f64 * hy];
            nodes.push(y);
            d[(j, j)] = 2.0 / (hx * hx) + 2.0 / (hy * hy) - g(y).exp();
            if j + 1 < ny {
                d[(j, j + 1)] = -1.0 / (hy * hy);
                d[(j + 1, j)] = -1.0 / (hy * hy);
            }
        }
        diag.push(d);
    }
    BlockSystem {
        diag,
        coupling: vec![-1.0 / (hx * hx); nx.saturating_sub(1)],
        weight: vec![1.0; nx],
        nodes,
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct EigenOptions {
    /// Radial (disk) or Cartesian (rectangle) grid step of the coarse grid.
    pub h: f64,
    /// Angular nodes on each ring of the disk grid.
    pub n_theta: usize,
    /// Also solve on the grid of step h/2 and Richardson-extrapolate.
    pub extrapolate: bool,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            h: 0.01,
            n_theta: 32,
            extrapolate: true,
            tol: 1e-12,
            max_iter: 500,
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct EigenResult {
    /// Extrapolated value when requested, otherwise the coarse-grid value.
    pub lambda1: f64,
    pub lambda_coarse: f64,
    pub lambda_fine: Option<f64>,
    /// ‖(A − λW)x‖ / ‖Wx‖ of the last solve.
    pub residual: f64,
    pub iterations: usize,
    /// Eigenvector of the last solve at its grid nodes, positive with max 1.
    #[serde(skip)]
    pub nodes: Vec<[f64; 2]>,
    #[serde(skip)]
    pub vector: Vec<f64>,
}

struct Solve {
    lambda: f64,
    residual: f64,
    iterations: usize,
    nodes: Vec<[f64; 2]>,
    vector: Vec<f64>,
}

fn inverse_iteration(sys: BlockSystem, opts: &EigenOptions) -> Result<Solve> {
    let m = sys.block();
    let max_potential = sys
        .diag
        .iter()
        .zip(&sys.weight)
        .flat_map(|(d, w)| (0..m).map(move |k| d[(k, k)] / w))
        .fold(f64::INFINITY, f64::min);
    // every diagonal entry bounds λ_min from above after dividing by the
    // weight; shifting well below the smallest keeps A − σW definite
    let mut sigma = max_potential.min(0.0) - 1.0;
    let factors = loop {
        if let Some(f) = sys.factor(sigma) {
            break f;
        }
        sigma = 2.0 * sigma - 1.0;
        if sigma < -1e12 {
            return Err(Error::NonConvergence {
                what: "eigenvalue shift",
                iterations: 0,
                residual: f64::NAN,
            });
        }
    };
    let mut x: Vec<DVector<f64>> = vec![DVector::from_element(m, 1.0); sys.diag.len()];
    let mut lambda = f64::NAN;
    let mut residual = f64::INFINITY;
    for it in 1..=opts.max_iter {
        let wx = sys.weighted(&x);
        let mut y = sys.solve(&factors, &wx);
        let norm = dot(&y, &sys.weighted(&y)).sqrt();
        for v in y.iter_mut() {
            *v /= norm;
        }
        let ay = sys.matvec(&y);
        let wy = sys.weighted(&y);
        let next = dot(&y, &ay);
        let r: Vec<DVector<f64>> = ay.iter().zip(&wy).map(|(a, w)| a - w * next).collect();
        residual = dot(&r, &r).sqrt() / dot(&wy, &wy).sqrt();
        let converged = (next - lambda).abs() <= opts.tol * (1.0 + next.abs()) && residual <= 1e-8 * (1.0 + next.abs());
        lambda = next;
        x = y;
        if converged {
            let mut vector: Vec<f64> = x.iter().flat_map(|v| v.iter().copied()).collect();
            let peak = vector
                .iter()
                .copied()
                .fold(0.0f64, |a, b| if b.abs() > a.abs() { b } else { a });
            for v in vector.iter_mut() {
                *v /= peak;
            }
            return Ok(Solve {
                lambda,
                residual,
                iterations: it,
                nodes: sys.nodes,
                vector,
            });
        }
    }
    Err(Error::NonConvergence {
        what: "inverse iteration",
        iterations: opts.max_iter,
        residual,
    })
}

fn solve_on(g: &dyn Fn([f64; 2]) -> f64, domain: &Domain, h: f64, opts: &EigenOptions) -> Result<Solve> {
    let sys = match *domain {
        Domain::Disk { radius } => {
            let rings = ((radius / h).round() as usize).max(2);
            disk_system(g, radius, rings, opts.n_theta.max(1))
        }
        Domain::Rectangle { width, height } => {
            let nx = ((width / h).round() as usize).max(2) - 1;
            let ny = ((height / h).round() as usize).max(2) - 1;
            rectangle_system(g, width, height, nx, ny)
        }
    };
    inverse_iteration(sys, opts)
}

/// Smallest λ with −(Δφ + e^g φ) = λφ in `domain`, φ = 0 on its boundary.
///
/// Disks use a boundary-conforming polar grid; rectangles a five-point
/// Cartesian grid. Both are second order in `opts.h`, which the optional
/// Richardson step removes.
pub fn first_eigenvalue(
    g: &(dyn Fn([f64; 2]) -> f64 + Sync),
    domain: &Domain,
    opts: &EigenOptions,
) -> Result<EigenResult> {
    domain.validate()?;
    if !(opts.h > 0.0) {
        return Err(Error::Config("grid step must be positive".into()));
    }
    let coarse = solve_on(g, domain, opts.h, opts)?;
    if !opts.extrapolate {
        return Ok(EigenResult {
            lambda1: coarse.lambda,
            lambda_coarse: coarse.lambda,
            lambda_fine: None,
            residual: coarse.residual,
            iterations: coarse.iterations,
            nodes: coarse.nodes,
            vector: coarse.vector,
        });
    }
    let fine = solve_on(g, domain, 0.5 * opts.h, opts)?;
    // disk grids are parametrized by N, so the effective ratio is not
    // exactly 2; use the true steps
    let (hc, hf) = match *domain {
        Domain::Disk { radius } => {
            let n = (radius / opts.h).round().max(2.0);
            let nf = (radius / (0.5 * opts.h)).round().max(2.0);
            (radius / (n + 0.5), radius / (nf + 0.5))
        }
        Domain::Rectangle { .. } => (opts.h, 0.5 * opts.h),
    };
    let q = (hc / hf).powi(2);
    let extrapolated = (q * fine.lambda - coarse.lambda) / (q - 1.0);
    Ok(EigenResult {
        lambda1: extrapolated,
        lambda_coarse: coarse.lambda,
        lambda_fine: Some(fine.lambda),
        residual: fine.residual,
        iterations: fine.iterations,
        nodes: fine.nodes,
        vector: fine.vector,
    })
}
