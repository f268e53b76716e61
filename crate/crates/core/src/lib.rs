//! Mirror-descent inverse kinematics on box-constrained joint spaces.
//!
//! The solvers treat joint position limits and per-tick velocity caps as a
//! box and run gradient updates in an unconstrained mirror space, so the
//! iterates never need hard clamping. Accelerated variants blend in a
//! projected-gradient companion iterate and can carry it between control
//! ticks.
//!
//! All math is generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix the scalar for the common case.

// `!(x > 0)` deliberately rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod bench;
pub mod kinematics;
pub mod linalg;
pub mod num;
pub mod solver;

pub use num::Real;

pub type Model = kinematics::RobotModel<f64>;
pub type Pose = kinematics::Pose<f64>;
pub type Quaternion = kinematics::UnitQuaternion<f64>;
pub type Transform = kinematics::Transform<f64>;
pub type Vector3 = linalg::Vec3<f64>;
pub type Config = solver::SolverConfig<f64>;
pub type State = solver::SolverState<f64>;
pub type Tasks = solver::TaskSet<f64>;
pub type Bounds = solver::BoxConstraint<f64>;

pub type Model32 = kinematics::RobotModel<f32>;
pub type Config32 = solver::SolverConfig<f32>;
pub type State32 = solver::SolverState<f32>;
pub type Tasks32 = solver::TaskSet<f32>;
