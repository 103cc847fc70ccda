//! Minimal 3D vector type. Units are millimeters throughout.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// A point or direction in 3D space.
///
/// Axes follow the production-line convention: `x` runs front-to-back
/// along the line, `y` is vertical and `z` is lateral (left positive).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);
    pub const UNIT_X: Vec3 = Vec3::new(1.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn distance(self, other: Vec3) -> f64 {
        (self - other).norm()
    }

    pub fn distance_sq(self, other: Vec3) -> f64 {
        (self - other).norm_sq()
    }

    /// Linear interpolation, `self` at `s = 0` and `other` at `s = 1`.
    pub fn lerp(self, other: Vec3, s: f64) -> Vec3 {
        self + (other - self) * s
    }

    /// Reflection through the `z = 0` plane.
    pub fn mirror_z(self) -> Vec3 {
        Vec3::new(self.x, self.y, -self.z)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(v: [f64; 3]) -> Self {
        Vec3::new(v[0], v[1], v[2])
    }
}

impl From<Vec3> for [f64; 3] {
    fn from(v: Vec3) -> Self {
        [v.x, v.y, v.z]
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// Moves `from` toward `to` by at most `step`. Returns the new point and
/// whether `to` was reached.
pub fn step_toward(from: Vec3, to: Vec3, step: f64) -> (Vec3, bool) {
    let delta = to - from;
    let dist = delta.norm();
    if dist <= step {
        (to, true)
    } else {
        (from + delta * (step / dist), false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_toward_clamps_at_target() {
        let (p, hit) = step_toward(Vec3::ZERO, Vec3::new(3.0, 4.0, 0.0), 10.0);
        assert!(hit);
        assert_eq!(p, Vec3::new(3.0, 4.0, 0.0));

        let (p, hit) = step_toward(Vec3::ZERO, Vec3::new(3.0, 4.0, 0.0), 2.5);
        assert!(!hit);
        assert!((p.norm() - 2.5).abs() < 1e-12);
    }

    #[test]
    fn mirror_is_exact_negation_of_z() {
        let p = Vec3::new(1.25, -7.5, 0.1 + 0.2);
        assert_eq!(p.mirror_z().z, -p.z);
        assert_eq!(p.mirror_z().mirror_z(), p);
    }
}
