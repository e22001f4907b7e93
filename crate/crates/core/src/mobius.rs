//! Conformal maps of S² used for recentering, and rotations.

use rand::Rng;

pub type Vec3 = [f64; 3];

pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

/// The Möbius map of the closed unit ball with `T_a(0) = a`, restricted to
/// the sphere:
///
/// `T_a(x) = ((1 − |a|²) x + 2(1 + a·x) a) / |x + a|²`, `|a| < 1`.
///
/// Its inverse is `T_{−a}` and its area distortion on S² is
/// `((1 − |a|²) / |x + a|²)²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mobius {
    a: Vec3,
}

impl Mobius {
    pub fn new(a: Vec3) -> Self {
        assert!(norm(a) < 1.0, "Möbius parameter must lie in the open unit ball");
        Self { a }
    }

    pub fn identity() -> Self {
        Self { a: [0.0; 3] }
    }

    pub fn parameter(&self) -> Vec3 {
        self.a
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: [-self.a[0], -self.a[1], -self.a[2]],
        }
    }

    pub fn apply(&self, x: Vec3) -> Vec3 {
        let a = self.a;
        let a2 = dot(a, a);
        let ax = dot(a, x);
        let d = 1.0 + 2.0 * ax + a2;
        let s = 1.0 - a2;
        let t = 2.0 * (1.0 + ax);
        let y = [
            (s * x[0] + t * a[0]) / d,
            (s * x[1] + t * a[1]) / d,
            (s * x[2] + t * a[2]) / d,
        ];
        // renormalize away roundoff so repeated maps stay on the sphere
        let r = norm(y);
        [y[0] / r, y[1] / r, y[2] / r]
    }

    /// ln det dT_a(x) on S².
    pub fn log_jacobian(&self, x: Vec3) -> f64 {
        let a = self.a;
        let a2 = dot(a, a);
        let d = 1.0 + 2.0 * dot(a, x) + a2;
        2.0 * ((1.0 - a2).ln() - d.ln())
    }
}

/// Proper rotation stored as a row-major 3 × 3 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation(pub [[f64; 3]; 3]);

impl Rotation {
    pub fn identity() -> Self {
        Rotation([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    }

    /// Rodrigues rotation by `angle` about the unit vector `axis`.
    pub fn about_axis(axis: Vec3, angle: f64) -> Self {
        let n = norm(axis);
        let [x, y, z] = [axis[0] / n, axis[1] / n, axis[2] / n];
        let (s, c) = angle.sin_cos();
        let t = 1.0 - c;
        Rotation([
            [c + x * x * t, x * y * t - z * s, x * z * t + y * s],
            [y * x * t + z * s, c + y * y * t, y * z * t - x * s],
            [z * x * t - y * s, z * y * t + x * s, c + z * z * t],
        ])
    }

    /// Uniformly distributed rotation from a random unit quaternion.
    pub fn random(rng: &mut impl Rng) -> Self {
        let (u1, u2, u3): (f64, f64, f64) = (rng.random(), rng.random(), rng.random());
        let tau = std::f64::consts::TAU;
        let q = [
            (1.0 - u1).sqrt() * (tau * u2).sin(),
            (1.0 - u1).sqrt() * (tau * u2).cos(),
            u1.sqrt() * (tau * u3).sin(),
            u1.sqrt() * (tau * u3).cos(),
        ];
        let [w, x, y, z] = [q[3], q[0], q[1], q[2]];
        Rotation([
            [
                1.0 - 2.0 * (y * y + z * z),
                2.0 * (x * y - z * w),
                2.0 * (x * z + y * w),
            ],
            [
                2.0 * (x * y + z * w),
                1.0 - 2.0 * (x * x + z * z),
                2.0 * (y * z - x * w),
            ],
            [
                2.0 * (x * z - y * w),
                2.0 * (y * z + x * w),
                1.0 - 2.0 * (x * x + y * y),
            ],
        ])
    }

    /// Rotation taking the unit vector `from` onto `to`.
    pub fn taking(from: Vec3, to: Vec3) -> Self {
        let f = scale(from, 1.0 / norm(from));
        let t = scale(to, 1.0 / norm(to));
        let c = dot(f, t).clamp(-1.0, 1.0);
        let axis = cross(f, t);
        let s = norm(axis);
        if s < 1e-14 {
            if c > 0.0 {
                return Self::identity();
            }
            // antipodal: any axis orthogonal to `from`
            let helper = if f[0].abs() < 0.9 {
                [1.0, 0.0, 0.0]
            } else {
                [0.0, 1.0, 0.0]
            };
            return Self::about_axis(cross(f, helper), std::f64::consts::PI);
        }
        Self::about_axis(axis, s.atan2(c))
    }

    pub fn apply(&self, x: Vec3) -> Vec3 {
        let m = &self.0;
        [
            m[0][0] * x[0] + m[0][1] * x[1] + m[0][2] * x[2],
            m[1][0] * x[0] + m[1][1] * x[1] + m[1][2] * x[2],
            m[2][0] * x[0] + m[2][1] * x[1] + m[2][2] * x[2],
        ]
    }

    pub fn transpose(&self) -> Self {
        let m = &self.0;
        Rotation([
            [m[0][0], m[1][0], m[2][0]],
            [m[0][1], m[1][1], m[2][1]],
            [m[0][2], m[1][2], m[2][2]],
        ])
    }
}

pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}
