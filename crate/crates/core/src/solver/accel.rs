//! Accelerated mirror descent: a projected-gradient companion iterate `z`
//! blended into the mirror-descent iterate, plus the smooth reset that
//! carries `z` and `k` across control ticks.

use crate::num::Real;

use super::bounds::BoxConstraint;
use super::config::SolverState;

/// Projected-gradient step size `α_z = k·α / (r·γ)`.
#[inline]
pub fn companion_step_size<T: Real>(k: T, alpha: T, r: T, gamma: T) -> T {
    k * alpha / (r * gamma)
}

/// Interpolation ratio `β = 1 / (1 + k/r)`.
#[inline]
pub fn blend_ratio<T: Real>(k: T, r: T) -> T {
    T::one() / (T::one() + k / r)
}

/// `z ← clamp(z - α_z·g)`, then `q_ref ← β·z + (1-β)·q_ref`.
///
/// Uses the current `k`; the caller increments it afterwards.
pub fn accel_step<T: Real>(
    mut state: SolverState<T>,
    q_ref: &[T],
    g: &[T],
    bounds: &BoxConstraint<T>,
    alpha: T,
    r: T,
    gamma: T,
) -> (SolverState<T>, Vec<T>) {
    let mut q = q_ref.to_vec();
    accel_step_in_place(&mut state, &mut q, g, bounds, alpha, r, gamma);
    (state, q)
}

pub(crate) fn accel_step_in_place<T: Real>(
    state: &mut SolverState<T>,
    q: &mut [T],
    g: &[T],
    bounds: &BoxConstraint<T>,
    alpha: T,
    r: T,
    gamma: T,
) {
    debug_assert!(state.initialized, "accelerator state not initialized");
    let step = companion_step_size(state.k, alpha, r, gamma);
    let beta = blend_ratio(state.k, r);
    for (zi, &gi) in state.z.iter_mut().zip(g) {
        *zi -= step * gi;
    }
    bounds.clamp_in_place(&mut state.z);
    for (qi, &zi) in q.iter_mut().zip(&state.z) {
        *qi = beta * zi + (T::one() - beta) * *qi;
    }
}

/// Warm start of the accelerator for a new tick.
///
/// First call: `z = q_obs` (projected onto the box) and `k = 1`. Later calls:
/// `z ← clamp(η·z + (1-η)·q_obs)` and `k ← η·k`.
pub fn smooth_reset<T: Real>(
    mut state: SolverState<T>,
    q_obs: &[T],
    bounds: &BoxConstraint<T>,
    eta: T,
) -> SolverState<T> {
    if !state.initialized || state.z.len() != q_obs.len() {
        state.z = bounds.clamp(q_obs);
        state.k = T::one();
        state.initialized = true;
        return state;
    }
    for (zi, &qi) in state.z.iter_mut().zip(q_obs) {
        *zi = eta * *zi + (T::one() - eta) * qi;
    }
    bounds.clamp_in_place(&mut state.z);
    state.k = eta * state.k;
    state
}

/// Full reset, as on a first call: `z = q_obs`, `k = 1`.
pub fn hard_reset<T: Real>(q_obs: &[T], bounds: &BoxConstraint<T>) -> SolverState<T> {
    smooth_reset(SolverState::new(), q_obs, bounds, T::zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(z: f64, k: f64) -> SolverState<f64> {
        SolverState {
            z: vec![z],
            k,
            initialized: true,
        }
    }

    #[test]
    fn step_sizes() {
        assert_eq!(blend_ratio(5.0, 5.0), 0.5);
        assert_eq!(companion_step_size(5.0, 1.0, 5.0, 2.0), 0.5);
        assert!(blend_ratio(1e12, 5.0) < 1e-11);
    }

    #[test]
    fn smooth_reset_examples() {
        let b = BoxConstraint::new(vec![-2.0], vec![2.0]);
        let s = smooth_reset(state(1.0, 8.0), &[0.0], &b, 0.5);
        assert_eq!((s.z[0], s.k), (0.5, 4.0));
        let s = smooth_reset(state(1.0, 8.0), &[0.3], &b, 0.0);
        assert_eq!((s.z[0], s.k), (0.3, 0.0));
        let s = smooth_reset(state(1.0, 8.0), &[0.3], &b, 1.0);
        assert_eq!((s.z[0], s.k), (1.0, 8.0));
        // z outside the new box is clamped even with η = 1
        let s = smooth_reset(state(3.0, 8.0), &[0.3], &b, 1.0);
        assert_eq!(s.z[0], 2.0);
    }

    #[test]
    fn first_reset_initializes() {
        let b = BoxConstraint::new(vec![-2.0, -2.0], vec![2.0, 2.0]);
        let s = smooth_reset(SolverState::new(), &[0.1, -0.2], &b, 0.5);
        assert!(s.initialized);
        assert_eq!(s.z, vec![0.1, -0.2]);
        assert_eq!(s.k, 1.0);
    }

    #[test]
    fn accel_step_blends_equally_at_k_equal_r() {
        let b = BoxConstraint::new(vec![-1.0], vec![1.0]);
        // α_z = 0.5: z = 0.2 - 0.5·(-0.4) = 0.4, q = ½·0.4 + ½·0.0
        let (s, q) = accel_step(state(0.2, 5.0), &[0.0], &[-0.4], &b, 1.0, 5.0, 2.0);
        assert!((s.z[0] - 0.4).abs() < 1e-15);
        assert!((q[0] - 0.2).abs() < 1e-15);
        assert_eq!(s.k, 5.0);
    }

    #[test]
    fn accel_step_clamps_companion() {
        let b = BoxConstraint::new(vec![-1.0], vec![1.0]);
        let (s, _) = accel_step(state(0.9, 10.0), &[0.0], &[-10.0], &b, 1.0, 5.0, 2.0);
        assert_eq!(s.z[0], 1.0);
    }
}
