use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::num::Scalar;

/// A point or vector in 3D space, coordinates in meters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Scalar> Point3<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn dot(&self, other: &Self) -> T {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(&self, other: &Self) -> Self {
        Self::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn norm(&self) -> T {
        self.dot(self).sqrt()
    }

    pub fn distance(&self, other: &Self) -> T {
        (*self - *other).norm()
    }

    /// Unit vector in the same direction, or `None` for a zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let len = self.norm();
        if len > T::zero() && len.is_finite() {
            Some(*self * (T::one() / len))
        } else {
            None
        }
    }

    /// Angle between two unit vectors, robust to rounding outside [-1, 1].
    pub fn angle_to(&self, other: &Self) -> T {
        self.dot(other).max(-T::one()).min(T::one()).acos()
    }

    pub fn to_f64(self) -> Point3<f64> {
        Point3::new(self.x.as_f64(), self.y.as_f64(), self.z.as_f64())
    }

    pub fn from_f64(p: Point3<f64>) -> Self {
        Self::new(T::of(p.x), T::of(p.y), T::of(p.z))
    }
}

impl<T: Scalar> Add for Point3<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl<T: Scalar> Sub for Point3<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl<T: Scalar> Mul<T> for Point3<T> {
    type Output = Self;
    fn mul(self, rhs: T) -> Self {
        Self::new(self.x * rhs, self.y * rhs, self.z * rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cross_and_angle() {
        let x = Point3::new(1.0, 0.0, 0.0);
        let y = Point3::new(0.0, 1.0, 0.0);
        assert_eq!(x.cross(&y), Point3::new(0.0, 0.0, 1.0));
        assert!((x.angle_to(&y) - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert_eq!(x.angle_to(&x), 0.0);
        assert!(Point3::<f64>::zero().normalized().is_none());
    }
}
