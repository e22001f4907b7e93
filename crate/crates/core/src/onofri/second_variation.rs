use serde::Serialize;
use std::sync::Arc;

use super::functional::{j_alpha, quadratic_form};
use crate::error::{Error, Result};
use crate::sphere::{HarmonicSpectrum, SphereField, SphereGrid};

/// Perturbation direction for the second-variation probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// x₁x₂, an eigenfunction of eigenvalue 6.
    Degree2,
    /// x₃, an eigenfunction of eigenvalue 2.
    Degree1,
    /// A single real spherical harmonic.
    Harmonic { l: usize, m: i64 },
}

impl Mode {
    pub fn field(&self, grid: &Arc<SphereGrid>) -> Result<SphereField> {
        match *self {
            Mode::Degree2 => Ok(SphereField::from_fn(grid, |x| x[0] * x[1])),
            Mode::Degree1 => Ok(SphereField::from_fn(grid, |x| x[2])),
            Mode::Harmonic { l, m } => {
                if l == 0 || l > grid.band_limit() || m.unsigned_abs() as usize > l {
                    return Err(Error::InvalidInput(format!("no harmonic mode ({l}, {m}) on this grid")));
                }
                let mut s = HarmonicSpectrum::zeros(grid.band_limit());
                s.set(l, m, 1.0);
                s.synthesize(grid)
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Mode::Degree2 => "x1*x2 (degree 2)".into(),
            Mode::Degree1 => "x3 (degree 1)".into(),
            Mode::Harmonic { l, m } => format!("Y[{l},{m}]"),
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SecondVariationReport {
    pub alpha: f64,
    pub mode: String,
    /// J_α(t v)/(t² ∫v²), extrapolated to t → 0 from the sampled `steps`.
    pub quadratic_coefficient: f64,
    /// quadratic_form(v, α)/∫v², the closed form of the same number.
    pub exact_coefficient: f64,
    /// α at which the measured coefficient changes sign.
    pub threshold_estimate: f64,
    pub steps: Vec<f64>,
    /// (J_α(t v) − t² Q_α(v))/t² at each step.
    pub taylor_residuals: Vec<f64>,
}

/// Measure the second variation of J_α at u = 0 along `mode` from values of
/// J_α(t v) at two small steps (Richardson-extrapolated in t²).
///
/// J_α(t v)/t² is affine in α, so evaluating it at α and α + 1 also locates
/// the sign change.
pub fn second_variation(alpha: f64, mode: Mode, grid: &Arc<SphereGrid>) -> Result<SecondVariationReport> {
    let v = mode.field(grid)?;
    let spec = v.spectrum();
    let mass = spec.l2_norm_sq();
    let steps = vec![1e-2, 1e-3];
    let coefficient = |a: f64, t: f64| -> Result<f64> { Ok(j_alpha(&v.map(|x| t * x), a)? / (t * t * mass)) };
    let extrapolate = |a: f64| -> Result<f64> {
        let (t1, t2) = (steps[0], steps[1]);
        let (q1, q2) = (coefficient(a, t1)?, coefficient(a, t2)?);
        Ok((q2 * t1 * t1 - q1 * t2 * t2) / (t1 * t1 - t2 * t2))
    };
    let q = extrapolate(alpha)?;
    let slope = extrapolate(alpha + 1.0)? - q;
    let exact = quadratic_form(&spec, alpha);
    let taylor_residuals = steps
        .iter()
        .map(|&t| Ok((j_alpha(&v.map(|x| t * x), alpha)? - t * t * exact) / (t * t)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SecondVariationReport {
        alpha,
        mode: mode.describe(),
        quadratic_coefficient: q,
        exact_coefficient: exact / mass,
        threshold_estimate: alpha - q / slope,
        steps,
        taylor_residuals,
    })
}
