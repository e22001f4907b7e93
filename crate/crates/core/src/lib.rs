//! Numerical experiments around the constrained Moser–Onofri–Aubin
//! inequality on S².
//!
//! * [`sphere`]: quadrature grid and spherical-harmonic transforms.
//! * [`onofri`]: the functional J_α, its gradient, conformal recentering onto
//!   the Aubin manifold, and the constrained minimizer.
//! * [`bridge`]: stereographic transfer to the planar equation
//!   Δv + (1+|y|²)^l e^v = 0, masses, nodal domains and eigenvalue audits.
//! * [`shooting`]: radial solutions of the planar equation by ODE shooting.
//! * [`axisym`]: the one-dimensional axially symmetric inequality.
//! * [`report`] and [`acceptance`]: machine-readable run reports and the
//!   verification suite.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod axisym;
pub mod bridge;
pub mod error;
pub mod exec;
pub mod mobius;
pub mod onofri;
pub mod quadrature;
pub mod report;
pub mod rng;
pub mod shooting;
pub mod sphere;

pub use error::{Error, Result};
pub use exec::Execution;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
