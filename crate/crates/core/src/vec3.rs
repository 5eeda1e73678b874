use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// A vector in ambient three-space.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3<S> {
    pub x: S,
    pub y: S,
    pub z: S,
}

impl<S: Scalar> Vec3<S> {
    #[inline]
    pub const fn new(x: S, y: S, z: S) -> Self {
        Self { x, y, z }
    }

    #[inline]
    pub fn zero() -> Self {
        Self::new(S::zero(), S::zero(), S::zero())
    }

    #[inline]
    pub fn unit_x() -> Self {
        Self::new(S::one(), S::zero(), S::zero())
    }

    #[inline]
    pub fn unit_y() -> Self {
        Self::new(S::zero(), S::one(), S::zero())
    }

    #[inline]
    pub fn unit_z() -> Self {
        Self::new(S::zero(), S::zero(), S::one())
    }

    pub fn from_f64(v: [f64; 3]) -> Self {
        Self::new(S::lit(v[0]), S::lit(v[1]), S::lit(v[2]))
    }

    pub fn to_f64(self) -> [f64; 3] {
        [self.x.to_f64_lossy(), self.y.to_f64_lossy(), self.z.to_f64_lossy()]
    }

    #[inline]
    pub fn dot(self, o: Self) -> S {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    #[inline]
    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    #[inline]
    pub fn norm_squared(self) -> S {
        self.dot(self)
    }

    /// Euclidean norm via `hypot`, safe against intermediate overflow.
    #[inline]
    pub fn norm(self) -> S {
        self.x.hypot(self.y).hypot(self.z)
    }

    pub fn normalize(self) -> Self {
        self / self.norm()
    }

    /// Normalized copy, or `None` when the norm is not above `eps`.
    pub fn try_normalize(self, eps: S) -> Option<Self> {
        let n = self.norm();
        (n > eps).then(|| self / n)
    }

    pub fn max_abs(self) -> S {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn scale(self, k: S) -> Self {
        self * k
    }
}

impl<S: Scalar> Add for Vec3<S> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<S: Scalar> AddAssign for Vec3<S> {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<S: Scalar> Sub for Vec3<S> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<S: Scalar> SubAssign for Vec3<S> {
    #[inline]
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<S: Scalar> Neg for Vec3<S> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

impl<S: Scalar> Mul<S> for Vec3<S> {
    type Output = Self;
    #[inline]
    fn mul(self, k: S) -> Self {
        Self::new(self.x * k, self.y * k, self.z * k)
    }
}

impl<S: Scalar> Div<S> for Vec3<S> {
    type Output = Self;
    #[inline]
    fn div(self, k: S) -> Self {
        Self::new(self.x / k, self.y / k, self.z / k)
    }
}

/// A proper rigid motion `p -> R p + b`, `R` given row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidMotion<S> {
    pub rotation: [[S; 3]; 3],
    pub translation: Vec3<S>,
}

impl<S: Scalar> RigidMotion<S> {
    /// Rotation by `angle` about `axis` (Rodrigues), followed by `translation`.
    pub fn from_axis_angle(axis: Vec3<S>, angle: S, translation: Vec3<S>) -> Self {
        let k = axis.normalize();
        let (s, c) = angle.sin_cos();
        let v = S::one() - c;
        let rotation = [
            [c + k.x * k.x * v, k.x * k.y * v - k.z * s, k.x * k.z * v + k.y * s],
            [k.y * k.x * v + k.z * s, c + k.y * k.y * v, k.y * k.z * v - k.x * s],
            [k.z * k.x * v - k.y * s, k.z * k.y * v + k.x * s, c + k.z * k.z * v],
        ];
        Self { rotation, translation }
    }

    pub fn rotate(&self, v: Vec3<S>) -> Vec3<S> {
        let r = &self.rotation;
        Vec3::new(
            r[0][0] * v.x + r[0][1] * v.y + r[0][2] * v.z,
            r[1][0] * v.x + r[1][1] * v.y + r[1][2] * v.z,
            r[2][0] * v.x + r[2][1] * v.y + r[2][2] * v.z,
        )
    }

    pub fn apply(&self, p: Vec3<S>) -> Vec3<S> {
        self.rotate(p) + self.translation
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cross_is_right_handed() {
        let x = Vec3::<f64>::unit_x();
        let y = Vec3::unit_y();
        assert_eq!(x.cross(y), Vec3::unit_z());
        assert_eq!(y.cross(x), -Vec3::unit_z());
    }

    #[test]
    fn norm_survives_large_components() {
        let v = Vec3::new(1e200_f64, 1e200, 0.0);
        assert!((v.norm() / 1e200 - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rodrigues_quarter_turn() {
        let m = RigidMotion::from_axis_angle(
            Vec3::<f64>::unit_z(),
            std::f64::consts::FRAC_PI_2,
            Vec3::zero(),
        );
        let r = m.rotate(Vec3::unit_x());
        assert!((r - Vec3::unit_y()).norm() < 1e-15);
    }
}
