//! Pose error, weighted objective and its Jacobian-transpose gradient.

use crate::kinematics::{frame_pose, resolve_frame, Pose, RobotModel};
use crate::linalg::Matrix;
use crate::num::Real;

use super::SolverError;

/// Target poses for one or more end effectors with diagonal weights.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskSet<T> {
    frames: Vec<String>,
    targets: Vec<Pose<T>>,
    /// Diagonal of W, 6 entries per frame.
    weights: Vec<T>,
}

impl<T: Real> TaskSet<T> {
    /// Unit weights (W = I).
    pub fn new(frames: Vec<String>, targets: Vec<Pose<T>>) -> Result<Self, SolverError> {
        let weights = vec![T::one(); 6 * frames.len()];
        Self::with_weights(frames, targets, weights)
    }

    pub fn with_weights(
        frames: Vec<String>,
        targets: Vec<Pose<T>>,
        weights: Vec<T>,
    ) -> Result<Self, SolverError> {
        if frames.is_empty() {
            return Err(SolverError::EmptyTaskSet);
        }
        if frames.len() != targets.len() {
            return Err(SolverError::TaskShape(format!(
                "{} frames but {} targets",
                frames.len(),
                targets.len()
            )));
        }
        if weights.len() != 6 * frames.len() {
            return Err(SolverError::TaskShape(format!(
                "expected {} weights, got {}",
                6 * frames.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| !(*w >= T::zero()) || !w.is_finite()) {
            return Err(SolverError::TaskShape(
                "weights must be finite and nonnegative".into(),
            ));
        }
        Ok(Self {
            frames,
            targets,
            weights,
        })
    }

    pub fn single(frame: impl Into<String>, target: Pose<T>) -> Self {
        Self::new(vec![frame.into()], vec![target]).expect("one frame, one target")
    }

    pub fn frames(&self) -> &[String] {
        &self.frames
    }

    pub fn targets(&self) -> &[Pose<T>] {
        &self.targets
    }

    pub fn targets_mut(&mut self) -> &mut [Pose<T>] {
        &mut self.targets
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Number of error rows, 6 per frame.
    pub fn rows(&self) -> usize {
        6 * self.frames.len()
    }

    pub(crate) fn resolve(&self, model: &RobotModel<T>) -> Result<Vec<usize>, SolverError> {
        self.frames
            .iter()
            .map(|f| resolve_frame(model, f).map_err(SolverError::from))
            .collect()
    }
}

/// Error vector for resolved frame indices; writes into `out` (length 6M).
pub(crate) fn task_error_into<T: Real>(
    model: &RobotModel<T>,
    q: &[T],
    frames: &[usize],
    targets: &[Pose<T>],
    out: &mut [T],
) {
    for ((&f, target), e) in frames.iter().zip(targets).zip(out.chunks_exact_mut(6)) {
        let pose = frame_pose(model, q, f);
        let dp = target.position - pose.position;
        let rot = (target.orientation * pose.orientation.inverse()).rotation_vector();
        e.copy_from_slice(&[dp.x, dp.y, dp.z, rot.x, rot.y, rot.z]);
    }
}

/// Stacked pose errors `[p_ref - p(q); f(Q_ref * Q(q)⁻¹)]` per frame, where
/// `f` is the rotation vector.
pub fn task_error<T: Real>(
    model: &RobotModel<T>,
    q: &[T],
    tasks: &TaskSet<T>,
) -> Result<Vec<T>, SolverError> {
    if q.len() != model.dof() {
        return Err(SolverError::Dimension {
            expected: model.dof(),
            got: q.len(),
        });
    }
    let frames = tasks.resolve(model)?;
    let mut e = vec![T::zero(); tasks.rows()];
    task_error_into(model, q, &frames, &tasks.targets, &mut e);
    Ok(e)
}

/// `½ Σ wᵢ eᵢ²`.
pub fn objective<T: Real>(e: &[T], weights: &[T]) -> T {
    debug_assert_eq!(e.len(), weights.len());
    T::half() * e.iter().zip(weights).map(|(&e, &w)| w * e * e).sum::<T>()
}

/// `-Jᵀ (W e)`.
pub fn gradient<T: Real>(jacobian: &Matrix<T>, weights: &[T], e: &[T]) -> Vec<T> {
    let we: Vec<T> = e.iter().zip(weights).map(|(&e, &w)| w * e).collect();
    let mut g = jacobian.tr_mul_vec(&we);
    for v in &mut g {
        *v = -*v;
    }
    g
}
