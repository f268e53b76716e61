//! Mirror-descent IK on a box-constrained joint space.

mod accel;
mod bounds;
mod config;
mod mirror;
mod solve;
mod task;

pub use accel::{accel_step, blend_ratio, companion_step_size, hard_reset, smooth_reset};
pub use bounds::{compute_box, compute_box_checked, BoxConstraint};
pub use config::{DeadlineMode, SolveResult, SolveStatus, SolverConfig, SolverState, Variant};
pub use mirror::{denormalize, eps_clamp, md_step, normalize, sigmoid, sigmoid_gain, sigmoid_inv};
pub use solve::solve;
pub(crate) use solve::Problem;
pub use task::{gradient, objective, task_error, TaskSet};

use crate::kinematics::KinematicsError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolverError {
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
    #[error("task set is empty")]
    EmptyTaskSet,
    #[error("malformed task set: {0}")]
    TaskShape(String),
    #[error("configuration has {got} entries, model has {expected} degrees of freedom")]
    Dimension { expected: usize, got: usize },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("domain error: {0}")]
    Domain(String),
}
