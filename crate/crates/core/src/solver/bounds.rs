//! Per-tick joint boxes merging position limits and velocity caps.

use crate::kinematics::RobotModel;
use crate::num::{clamp, Real};

use super::SolverError;

#[derive(Debug, Clone, PartialEq)]
pub struct BoxConstraint<T> {
    pub lower: Vec<T>,
    pub upper: Vec<T>,
}

impl<T: Real> BoxConstraint<T> {
    /// Panics if the bounds differ in length or are inverted.
    pub fn new(lower: Vec<T>, upper: Vec<T>) -> Self {
        assert_eq!(lower.len(), upper.len(), "bound lengths differ");
        assert!(
            lower.iter().zip(&upper).all(|(l, u)| l <= u),
            "lower bound exceeds upper bound"
        );
        Self { lower, upper }
    }

    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    #[inline]
    pub fn width(&self, i: usize) -> T {
        self.upper[i] - self.lower[i]
    }

    /// `lower == upper` on dimension `i`.
    #[inline]
    pub fn is_degenerate(&self, i: usize) -> bool {
        self.lower[i] == self.upper[i]
    }

    /// Element-wise projection onto the box.
    pub fn clamp(&self, q: &[T]) -> Vec<T> {
        q.iter()
            .enumerate()
            .map(|(i, &v)| clamp(v, self.lower[i], self.upper[i]))
            .collect()
    }

    pub fn clamp_in_place(&self, q: &mut [T]) {
        for (i, v) in q.iter_mut().enumerate() {
            *v = clamp(*v, self.lower[i], self.upper[i]);
        }
    }

    /// The box left after ε-clamping:
    /// `[(1-ε)·lower + ε·upper, (1-ε)·upper + ε·lower]`.
    pub fn shrunk(&self, epsilon: T) -> Self {
        let one = T::one();
        let (lower, upper) = (0..self.len())
            .map(|i| {
                let (l, u) = (self.lower[i], self.upper[i]);
                if self.is_degenerate(i) {
                    (u, u)
                } else {
                    (
                        (one - epsilon) * l + epsilon * u,
                        (one - epsilon) * u + epsilon * l,
                    )
                }
            })
            .unzip();
        Self { lower, upper }
    }

    /// Largest violation of the bounds by `q` (zero when inside).
    pub fn violation(&self, q: &[T]) -> T {
        q.iter().enumerate().fold(T::zero(), |m, (i, &v)| {
            m.max(self.lower[i] - v).max(v - self.upper[i])
        })
    }

    pub fn contains(&self, q: &[T], tol: T) -> bool {
        q.len() == self.len() && self.violation(q) <= tol
    }
}

/// Box for one control tick.
///
/// An observation outside the hardware limits is clamped into them first;
/// the second return value reports whether that happened.
pub fn compute_box_checked<T: Real>(
    model: &RobotModel<T>,
    q_obs: &[T],
    dt: T,
) -> Result<(BoxConstraint<T>, bool), SolverError> {
    if q_obs.len() != model.dof() {
        return Err(SolverError::Dimension {
            expected: model.dof(),
            got: q_obs.len(),
        });
    }
    let mut clamped = false;
    let mut lower = Vec::with_capacity(q_obs.len());
    let mut upper = Vec::with_capacity(q_obs.len());
    for (j, &q) in model.active_joints().zip(q_obs) {
        let lim = j.limits.expect("active joints carry limits");
        let q_in = clamp(q, lim.lower, lim.upper);
        clamped |= q_in != q;
        let reach = lim.max_velocity * dt;
        lower.push(lim.lower.max(q_in - reach));
        upper.push(lim.upper.min(q_in + reach));
    }
    Ok((BoxConstraint { lower, upper }, clamped))
}

/// Like [`compute_box_checked`], logging a warning when the observation had
/// to be clamped into the hardware limits.
pub fn compute_box<T: Real>(
    model: &RobotModel<T>,
    q_obs: &[T],
    dt: T,
) -> Result<BoxConstraint<T>, SolverError> {
    let (b, clamped) = compute_box_checked(model, q_obs, dt)?;
    if clamped {
        log::warn!("observation outside joint limits; clamped before building the box");
    }
    Ok(b)
}
