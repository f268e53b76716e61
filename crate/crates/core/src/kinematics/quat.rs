//! Unit quaternions, Hamilton convention, scalar first.

use std::ops::Mul;

use crate::linalg::Vec3;
use crate::num::Real;

/// Vector-part norm below which the log/exp maps switch to a series.
const SMALL_ANGLE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitQuaternion<T> {
    w: T,
    x: T,
    y: T,
    z: T,
}

impl<T: Real> UnitQuaternion<T> {
    pub fn identity() -> Self {
        Self {
            w: T::one(),
            x: T::zero(),
            y: T::zero(),
            z: T::zero(),
        }
    }

    /// Normalizes the given components. Returns `None` for a zero or
    /// non-finite quaternion.
    pub fn try_new_normalize(w: T, x: T, y: T, z: T) -> Option<Self> {
        let n = (w * w + x * x + y * y + z * z).sqrt();
        if !(n > T::zero()) || !n.is_finite() {
            return None;
        }
        Some(Self {
            w: w / n,
            x: x / n,
            y: y / n,
            z: z / n,
        })
    }

    /// Like [`try_new_normalize`](Self::try_new_normalize) but panics on a
    /// zero quaternion.
    pub fn new_normalize(w: T, x: T, y: T, z: T) -> Self {
        Self::try_new_normalize(w, x, y, z).expect("nonzero quaternion")
    }

    /// Rotation of `angle` about `axis` (normalized internally).
    pub fn from_axis_angle(axis: Vec3<T>, angle: T) -> Self {
        let n = axis.norm();
        if n == T::zero() {
            return Self::identity();
        }
        let (s, c) = (angle * T::half()).sin_cos();
        let a = axis.scale(s / n);
        Self::new_normalize(c, a.x, a.y, a.z)
    }

    /// Exponential map: rotation vector (axis times angle) to quaternion.
    pub fn from_rotation_vector(v: Vec3<T>) -> Self {
        let theta = v.norm();
        let half = theta * T::half();
        // sin(θ/2)/θ
        let k = if half < T::lit(SMALL_ANGLE) {
            T::half() - theta * theta / T::lit(48.0)
        } else {
            half.sin() / theta
        };
        Self::new_normalize(half.cos(), v.x * k, v.y * k, v.z * k)
    }

    /// Roll-pitch-yaw applied as extrinsic X, then Y, then Z
    /// (`R = Rz(yaw) · Ry(pitch) · Rx(roll)`).
    pub fn from_rpy(roll: T, pitch: T, yaw: T) -> Self {
        let rx = Self::from_axis_angle(Vec3::new(T::one(), T::zero(), T::zero()), roll);
        let ry = Self::from_axis_angle(Vec3::new(T::zero(), T::one(), T::zero()), pitch);
        let rz = Self::from_axis_angle(Vec3::new(T::zero(), T::zero(), T::one()), yaw);
        rz * ry * rx
    }

    /// Inverse of [`from_rpy`](Self::from_rpy); pitch in `[-π/2, π/2]`.
    pub fn to_rpy(&self) -> [T; 3] {
        let m = self.to_rotation_matrix();
        let sp = -m[2][0];
        let pitch = if sp >= T::one() {
            T::FRAC_PI_2()
        } else if sp <= -T::one() {
            -T::FRAC_PI_2()
        } else {
            sp.asin()
        };
        // gimbal lock: put everything into yaw
        if (T::one() - sp.abs()) < T::lit(1e-12) {
            let yaw = (-m[0][1]).atan2(m[1][1]);
            return [T::zero(), pitch, yaw];
        }
        let roll = m[2][1].atan2(m[2][2]);
        let yaw = m[1][0].atan2(m[0][0]);
        [roll, pitch, yaw]
    }

    #[inline]
    pub fn w(&self) -> T {
        self.w
    }
    #[inline]
    pub fn x(&self) -> T {
        self.x
    }
    #[inline]
    pub fn y(&self) -> T {
        self.y
    }
    #[inline]
    pub fn z(&self) -> T {
        self.z
    }

    /// `[w, x, y, z]`.
    pub fn coords(&self) -> [T; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn vector_part(&self) -> Vec3<T> {
        Vec3::new(self.x, self.y, self.z)
    }

    pub fn norm(&self) -> T {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Conjugate, which is the inverse for unit quaternions.
    pub fn inverse(&self) -> Self {
        Self {
            w: self.w,
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    /// Same rotation, opposite sign (the other point of the double cover).
    pub fn negated(&self) -> Self {
        Self {
            w: -self.w,
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    /// Hamilton product followed by renormalization.
    pub fn mul_quat(&self, b: &Self) -> Self {
        let a = self;
        Self::new_normalize(
            a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        )
    }

    pub fn rotate(&self, v: Vec3<T>) -> Vec3<T> {
        // v + 2w(u × v) + 2u × (u × v)
        let u = self.vector_part();
        let t = u.cross(v).scale(T::two());
        v + t.scale(self.w) + u.cross(t)
    }

    /// Logarithm map scaled to a full rotation vector. The angle is always
    /// in `[0, π]`: quaternions with `w < 0` are negated first.
    pub fn rotation_vector(&self) -> Vec3<T> {
        let q = if self.w < T::zero() {
            self.negated()
        } else {
            *self
        };
        let v = q.vector_part();
        let n = v.norm();
        // angle / n = 2·atan2(n, w) / n
        let k = if n < T::lit(SMALL_ANGLE) {
            let w2 = q.w * q.w;
            T::two() / q.w * (T::one() - n * n / (T::lit(3.0) * w2))
        } else {
            T::two() * n.atan2(q.w) / n
        };
        v.scale(k)
    }

    /// Rotation angle in `[0, π]`.
    pub fn angle(&self) -> T {
        self.rotation_vector().norm()
    }

    /// Row-major 3×3 rotation matrix.
    pub fn to_rotation_matrix(&self) -> [[T; 3]; 3] {
        let (w, x, y, z) = (self.w, self.x, self.y, self.z);
        let one = T::one();
        let two = T::two();
        [
            [
                one - two * (y * y + z * z),
                two * (x * y - w * z),
                two * (x * z + w * y),
            ],
            [
                two * (x * y + w * z),
                one - two * (x * x + z * z),
                two * (y * z - w * x),
            ],
            [
                two * (x * z - w * y),
                two * (y * z + w * x),
                one - two * (x * x + y * y),
            ],
        ]
    }

    pub fn cast<U: Real>(&self) -> UnitQuaternion<U> {
        let c = |v: T| U::lit(v.to_f64_lossy());
        UnitQuaternion::new_normalize(c(self.w), c(self.x), c(self.y), c(self.z))
    }
}

impl<T: Real> Default for UnitQuaternion<T> {
    fn default() -> Self {
        Self::identity()
    }
}

impl<T: Real> Mul for UnitQuaternion<T> {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        self.mul_quat(&rhs)
    }
}

/// Hamilton product of two unit quaternions, renormalized.
pub fn quat_mul<T: Real>(a: &UnitQuaternion<T>, b: &UnitQuaternion<T>) -> UnitQuaternion<T> {
    a.mul_quat(b)
}

pub fn quat_inverse<T: Real>(a: &UnitQuaternion<T>) -> UnitQuaternion<T> {
    a.inverse()
}

pub fn rotation_vector<T: Real>(a: &UnitQuaternion<T>) -> Vec3<T> {
    a.rotation_vector()
}
