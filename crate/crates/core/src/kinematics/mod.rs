//! Kinematic chains: quaternions, transforms, robot models, forward
//! kinematics and geometric Jacobians.

mod fk;
mod model;
mod parse;
mod quat;
mod transform;

pub use fk::{forward_kinematics, geometric_jacobian, stack_tasks};
pub(crate) use fk::{frame_jacobian, frame_pose, resolve_frame};
pub use model::{EndEffector, JointKind, JointLimits, JointSpec, ModelError, RobotModel};
pub use parse::{model_to_json, parse_model, AXIS_NORMALIZE_TOL};
pub use quat::{quat_inverse, quat_mul, rotation_vector, UnitQuaternion};
pub use transform::{Pose, Transform};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KinematicsError {
    #[error("unknown end-effector frame `{0}`")]
    UnknownFrame(String),
    #[error("configuration has {got} entries, model has {expected} degrees of freedom")]
    Dimension { expected: usize, got: usize },
    #[error("task set is empty")]
    EmptyTaskSet,
}
