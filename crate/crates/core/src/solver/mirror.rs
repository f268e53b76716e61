//! Mirror map between the box-constrained joint space and the
//! unconstrained mirror space: a scaled logistic sigmoid composed with the
//! affine normalization onto the unit interval.

use crate::num::{clamp, Real};

use super::bounds::BoxConstraint;
use super::SolverError;

/// Gain `a = 2·ln((1-ε)/ε)`, so that `σ(0) = ε` and `σ(1) = 1-ε`.
#[inline]
pub fn sigmoid_gain<T: Real>(epsilon: T) -> T {
    T::two() * ((T::one() - epsilon) / epsilon).ln()
}

#[inline]
fn logistic<T: Real>(x: T, gain: T) -> T {
    T::one() / (T::one() + (-gain * (x - T::half())).exp())
}

#[inline]
fn logit<T: Real>(y: T, gain: T) -> T {
    T::half() + (y / (T::one() - y)).ln() / gain
}

/// `σ(x) = 1 / (1 + exp(-a (x - ½)))`.
pub fn sigmoid<T: Real>(x: T, epsilon: T) -> T {
    logistic(x, sigmoid_gain(epsilon))
}

/// Inverse of [`sigmoid`]; defined on the open unit interval.
pub fn sigmoid_inv<T: Real>(y: T, epsilon: T) -> Result<T, SolverError> {
    if !(y > T::zero() && y < T::one()) {
        return Err(SolverError::Domain(format!(
            "sigmoid inverse needs 0 < y < 1, got {y}"
        )));
    }
    Ok(logit(y, sigmoid_gain(epsilon)))
}

/// `(q - lower) / (upper - lower)` per joint; `0.5` on degenerate dimensions,
/// where the caller must pin the joint to `upper`.
pub fn normalize<T: Real>(q: &[T], bounds: &BoxConstraint<T>) -> Vec<T> {
    q.iter()
        .enumerate()
        .map(|(i, &v)| {
            if bounds.is_degenerate(i) {
                T::half()
            } else {
                (v - bounds.lower[i]) / bounds.width(i)
            }
        })
        .collect()
}

/// `(upper - lower)·u + lower` per joint.
pub fn denormalize<T: Real>(u: &[T], bounds: &BoxConstraint<T>) -> Vec<T> {
    u.iter()
        .enumerate()
        .map(|(i, &v)| bounds.width(i) * v + bounds.lower[i])
        .collect()
}

/// One mirror-descent update:
/// `q ← (upper - lower)·σ(σ⁻¹(ν(q)) - α·g) + lower`,
/// with degenerate dimensions pinned to `upper`.
pub fn md_step<T: Real>(
    q_ref: &[T],
    g: &[T],
    bounds: &BoxConstraint<T>,
    alpha: T,
    epsilon: T,
) -> Vec<T> {
    let mut q = q_ref.to_vec();
    md_step_in_place(&mut q, g, bounds, alpha, epsilon);
    q
}

pub(crate) fn md_step_in_place<T: Real>(
    q: &mut [T],
    g: &[T],
    bounds: &BoxConstraint<T>,
    alpha: T,
    epsilon: T,
) {
    let gain = sigmoid_gain(epsilon);
    for (i, (v, &gi)) in q.iter_mut().zip(g).enumerate() {
        if bounds.is_degenerate(i) {
            *v = bounds.upper[i];
            continue;
        }
        let w = bounds.width(i);
        // Points on or past the boundary map to ±∞ rather than NaN.
        let nu = clamp((*v - bounds.lower[i]) / w, T::zero(), T::one());
        let rho = logit(nu, gain) - alpha * gi;
        *v = w * logistic(rho, gain) + bounds.lower[i];
    }
}

/// Clamps the normalized position into `[ε, 1-ε]` and maps back.
pub fn eps_clamp<T: Real>(q_ref: &[T], bounds: &BoxConstraint<T>, epsilon: T) -> Vec<T> {
    let mut q = q_ref.to_vec();
    eps_clamp_in_place(&mut q, bounds, epsilon);
    q
}

pub(crate) fn eps_clamp_in_place<T: Real>(q: &mut [T], bounds: &BoxConstraint<T>, epsilon: T) {
    let hi = T::one() - epsilon;
    for (i, v) in q.iter_mut().enumerate() {
        if bounds.is_degenerate(i) {
            *v = bounds.upper[i];
            continue;
        }
        let w = bounds.width(i);
        let nu = (*v - bounds.lower[i]) / w;
        if nu < epsilon || nu > hi {
            *v = w * clamp(nu, epsilon, hi) + bounds.lower[i];
        }
    }
}
