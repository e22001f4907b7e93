use crate::error::{Error, Result};
use crate::mobius::Vec3;

/// Stereographic projection from the north pole: `y = (x₁, x₂)/(1 − x₃)`.
pub fn stereo_map(x: Vec3) -> Result<[f64; 2]> {
    let d = 1.0 - x[2];
    if d <= 1e-300 {
        return Err(Error::Pole);
    }
    Ok([x[0] / d, x[1] / d])
}

/// Inverse of [`stereo_map`].
pub fn stereo_lift(y: [f64; 2]) -> Vec3 {
    let r2 = y[0] * y[0] + y[1] * y[1];
    let d = 1.0 + r2;
    [2.0 * y[0] / d, 2.0 * y[1] / d, (r2 - 1.0) / d]
}

/// Area factor `(2/(1+|y|²))²` of the lift.
pub fn jacobian(y: [f64; 2]) -> f64 {
    let s = 2.0 / (1.0 + y[0] * y[0] + y[1] * y[1]);
    s * s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::CompositeRule;
    use crate::sphere::SphereGrid;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn examples() {
        assert_eq!(stereo_map([0.0, 0.0, -1.0]).unwrap(), [0.0, 0.0]);
        assert_eq!(jacobian([0.0, 0.0]), 4.0);
        assert_eq!(stereo_map([1.0, 0.0, 0.0]).unwrap(), [1.0, 0.0]);
        assert_eq!(jacobian([1.0, 0.0]), 1.0);
        assert!(matches!(stereo_map([0.0, 0.0, 1.0]), Err(Error::Pole)));
    }

    #[test]
    fn total_area() {
        // r = t/(1 − t) maps (0, 1) onto (0, ∞)
        let rule = CompositeRule::from_breaks(&[0.0, 0.25, 0.5, 0.75, 1.0], 30);
        let area = rule.integrate(|t| {
            let r = t / (1.0 - t);
            2.0 * PI * jacobian([r, 0.0]) * r / ((1.0 - t) * (1.0 - t))
        });
        assert_abs_diff_eq!(area, 4.0 * PI, epsilon = 1e-8);
    }

    #[test]
    fn round_trip() {
        for x in SphereGrid::new(8, 16, 32).unwrap().points() {
            let back = stereo_lift(stereo_map(x).unwrap());
            for k in 0..3 {
                assert_abs_diff_eq!(back[k], x[k], epsilon = 1e-14);
            }
        }
    }
}
