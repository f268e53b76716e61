use std::ops::Mul;

use super::quat::UnitQuaternion;
use crate::linalg::Vec3;
use crate::num::Real;

/// Rigid transform: rotate, then translate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transform<T> {
    pub rotation: UnitQuaternion<T>,
    pub translation: Vec3<T>,
}

impl<T: Real> Transform<T> {
    pub fn identity() -> Self {
        Self {
            rotation: UnitQuaternion::identity(),
            translation: Vec3::zeros(),
        }
    }

    pub fn new(rotation: UnitQuaternion<T>, translation: Vec3<T>) -> Self {
        Self {
            rotation,
            translation,
        }
    }

    pub fn from_translation(translation: Vec3<T>) -> Self {
        Self::new(UnitQuaternion::identity(), translation)
    }

    pub fn from_rotation(rotation: UnitQuaternion<T>) -> Self {
        Self::new(rotation, Vec3::zeros())
    }

    /// `self ∘ other`: `other` is expressed in the frame of `self`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            rotation: self.rotation * other.rotation,
            translation: self.translation + self.rotation.rotate(other.translation),
        }
    }

    pub fn inverse(&self) -> Self {
        let r = self.rotation.inverse();
        Self {
            rotation: r,
            translation: -r.rotate(self.translation),
        }
    }

    pub fn transform_point(&self, p: Vec3<T>) -> Vec3<T> {
        self.translation + self.rotation.rotate(p)
    }

    pub fn cast<U: Real>(&self) -> Transform<U> {
        Transform::new(self.rotation.cast(), self.translation.cast())
    }
}

impl<T: Real> Default for Transform<T> {
    fn default() -> Self {
        Self::identity()
    }
}

impl<T: Real> Mul for Transform<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.compose(&rhs)
    }
}

/// End-effector pose in the world frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose<T> {
    pub position: Vec3<T>,
    pub orientation: UnitQuaternion<T>,
}

impl<T: Real> Pose<T> {
    pub fn new(position: Vec3<T>, orientation: UnitQuaternion<T>) -> Self {
        Self {
            position,
            orientation,
        }
    }

    pub fn identity() -> Self {
        Self::new(Vec3::zeros(), UnitQuaternion::identity())
    }
}

impl<T: Real> From<Transform<T>> for Pose<T> {
    fn from(t: Transform<T>) -> Self {
        Self::new(t.translation, t.rotation)
    }
}

impl<T: Real> From<Pose<T>> for Transform<T> {
    fn from(p: Pose<T>) -> Self {
        Self::new(p.orientation, p.position)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(i: u32) -> Transform<f64> {
        let f = i as f64;
        Transform::new(
            UnitQuaternion::from_rpy(0.3 * f, -0.2 + 0.1 * f, 1.1 - f),
            Vec3::new(f, 0.5 - f, 0.25 * f),
        )
    }

    #[test]
    fn composition_is_associative() {
        let (a, b, c) = (sample(1), sample(2), sample(3));
        let l = (a * b) * c;
        let r = a * (b * c);
        assert!((l.translation - r.translation).norm() < 1e-14);
        assert!((l.rotation * r.rotation.inverse()).angle() < 1e-14);
    }

    #[test]
    fn identity_is_neutral_and_inverse_cancels() {
        let a = sample(2);
        let i = Transform::identity();
        assert_eq!((i * a).translation, a.translation);
        let e = a * a.inverse();
        assert!(e.translation.norm() < 1e-14);
        assert!(e.rotation.angle() < 1e-14);
    }
}
