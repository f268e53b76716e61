//! Forward kinematics and world-frame geometric Jacobians.

use super::model::{JointKind, RobotModel};
use super::quat::UnitQuaternion;
use super::transform::{Pose, Transform};
use super::KinematicsError;
use crate::linalg::{Matrix, Vec3};
use crate::num::Real;

fn check_dof<T: Real>(model: &RobotModel<T>, q: &[T]) -> Result<(), KinematicsError> {
    if q.len() != model.dof() {
        return Err(KinematicsError::Dimension {
            expected: model.dof(),
            got: q.len(),
        });
    }
    Ok(())
}

pub(crate) fn resolve_frame<T: Real>(
    model: &RobotModel<T>,
    frame: &str,
) -> Result<usize, KinematicsError> {
    model
        .frame_index(frame)
        .ok_or_else(|| KinematicsError::UnknownFrame(frame.to_owned()))
}

fn joint_motion<T: Real>(kind: JointKind, axis: Vec3<T>, value: T) -> Transform<T> {
    match kind {
        JointKind::Revolute => {
            Transform::from_rotation(UnitQuaternion::from_axis_angle(axis, value))
        }
        JointKind::Prismatic => Transform::from_translation(axis.scale(value)),
        JointKind::Fixed => Transform::identity(),
    }
}

/// Walks the chain of `frame`, calling `visit(dof, world_axis, joint_origin)`
/// for each active joint before applying its motion.
fn walk_chain<T: Real>(
    model: &RobotModel<T>,
    q: &[T],
    frame: usize,
    mut visit: impl FnMut(usize, JointKind, Vec3<T>, Vec3<T>),
) -> Transform<T> {
    let mut world = Transform::identity();
    for &ji in model.chain(frame) {
        let joint = &model.joints()[ji];
        world = world * joint.origin;
        if let Some(i) = model.dof_index(ji) {
            visit(
                i,
                joint.kind,
                world.rotation.rotate(joint.axis),
                world.translation,
            );
            world = world * joint_motion(joint.kind, joint.axis, q[i]);
        }
    }
    world * model.end_effectors()[frame].origin
}

pub(crate) fn frame_pose<T: Real>(model: &RobotModel<T>, q: &[T], frame: usize) -> Pose<T> {
    walk_chain(model, q, frame, |_, _, _, _| {}).into()
}

pub(crate) fn frame_jacobian<T: Real>(
    model: &RobotModel<T>,
    q: &[T],
    frame: usize,
) -> (Pose<T>, Matrix<T>) {
    let mut cols = Vec::new();
    let tip = walk_chain(model, q, frame, |i, kind, z, p| cols.push((i, kind, z, p)));
    let mut j = Matrix::zeros(6, model.dof());
    for (i, kind, z, p) in cols {
        let (lin, ang) = match kind {
            JointKind::Revolute => (z.cross(tip.translation - p), z),
            JointKind::Prismatic => (z, Vec3::zeros()),
            JointKind::Fixed => unreachable!("fixed joints have no column"),
        };
        for (r, v) in lin.to_array().into_iter().chain(ang.to_array()).enumerate() {
            j[(r, i)] = v;
        }
    }
    (tip.into(), j)
}

/// World pose of `frame` at configuration `q`.
pub fn forward_kinematics<T: Real>(
    model: &RobotModel<T>,
    q: &[T],
    frame: &str,
) -> Result<Pose<T>, KinematicsError> {
    check_dof(model, q)?;
    let f = resolve_frame(model, frame)?;
    Ok(frame_pose(model, q, f))
}

/// 6×N world-frame geometric Jacobian, linear rows first. Joints off the
/// path to `frame` have zero columns.
pub fn geometric_jacobian<T: Real>(
    model: &RobotModel<T>,
    q: &[T],
    frame: &str,
) -> Result<Matrix<T>, KinematicsError> {
    check_dof(model, q)?;
    let f = resolve_frame(model, frame)?;
    Ok(frame_jacobian(model, q, f).1)
}

/// Per-frame Jacobians stacked vertically in the given order (6M×N).
pub fn stack_tasks<T: Real, S: AsRef<str>>(
    model: &RobotModel<T>,
    q: &[T],
    frames: &[S],
) -> Result<Matrix<T>, KinematicsError> {
    check_dof(model, q)?;
    if frames.is_empty() {
        return Err(KinematicsError::EmptyTaskSet);
    }
    let blocks = frames
        .iter()
        .map(|f| resolve_frame(model, f.as_ref()).map(|i| frame_jacobian(model, q, i).1))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Matrix::vstack(&blocks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::parse_model;

    const PLANAR: &str = r#"{"name": "p", "joints": [
        {"name": "j1", "kind": "revolute", "parent": "root", "axis": [0,0,1],
         "lower": -3, "upper": 3, "max_velocity": 1},
        {"name": "j2", "kind": "revolute", "parent": "j1", "origin": {"xyz": [1,0,0]},
         "axis": [0,0,1], "lower": -3, "upper": 3, "max_velocity": 1},
        {"name": "side", "kind": "revolute", "parent": "root", "axis": [1,0,0],
         "lower": -3, "upper": 3, "max_velocity": 1}],
      "end_effectors": {"tip": {"parent": "j2", "origin": {"xyz": [1,0,0]}},
                        "elbow": {"parent": "j2"}}}"#;

    const SLIDER: &str = r#"{"name": "s", "joints": [
        {"name": "lift", "kind": "prismatic", "parent": "root", "axis": [0,0,1],
         "lower": 0, "upper": 1, "max_velocity": 1}],
      "end_effectors": {"top": {"parent": "lift", "origin": {"xyz": [0.1,0,0.5]}}}}"#;

    #[test]
    fn straight_chain() {
        let m: RobotModel<f64> = parse_model(PLANAR).unwrap();
        let p = forward_kinematics(&m, &[0.0, 0.0, 0.0], "tip").unwrap();
        assert!((p.position - Vec3::new(2.0, 0.0, 0.0)).norm() < 1e-15);
        assert!(p.orientation.angle() < 1e-15);
    }

    #[test]
    fn rigid_rotation_of_chain() {
        let m: RobotModel<f64> = parse_model(PLANAR).unwrap();
        let p = forward_kinematics(&m, &[std::f64::consts::FRAC_PI_2, 0.0, 0.0], "tip").unwrap();
        assert!((p.position - Vec3::new(0.0, 2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn prismatic_translates_along_axis() {
        let m: RobotModel<f64> = parse_model(SLIDER).unwrap();
        let p = forward_kinematics(&m, &[0.3], "top").unwrap();
        assert!((p.position - Vec3::new(0.1, 0.0, 0.8)).norm() < 1e-15);
        let j = geometric_jacobian(&m, &[0.3], "top").unwrap();
        assert_eq!(j.column(0), vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn planar_jacobian_at_zero() {
        let m: RobotModel<f64> = parse_model(PLANAR).unwrap();
        let j = geometric_jacobian(&m, &[0.0; 3], "tip").unwrap();
        assert_eq!(j.column(0), vec![0.0, 2.0, 0.0, 0.0, 0.0, 1.0]);
        assert_eq!(j.column(1), vec![0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        // off-path joint
        assert_eq!(j.column(2), vec![0.0; 6]);
    }

    #[test]
    fn stacked_blocks_follow_frame_order() {
        let m: RobotModel<f64> = parse_model(PLANAR).unwrap();
        let q = [0.3, -0.7, 0.1];
        let s = stack_tasks(&m, &q, &["elbow", "tip"]).unwrap();
        assert_eq!(s.shape(), (12, 3));
        assert_eq!(
            s.row_block(0, 6),
            geometric_jacobian(&m, &q, "elbow").unwrap()
        );
        assert_eq!(
            s.row_block(6, 6),
            geometric_jacobian(&m, &q, "tip").unwrap()
        );
        assert_eq!(
            stack_tasks(&m, &q, &["tip"]).unwrap(),
            geometric_jacobian(&m, &q, "tip").unwrap()
        );
    }

    #[test]
    fn errors() {
        let m: RobotModel<f64> = parse_model(PLANAR).unwrap();
        assert_eq!(
            forward_kinematics(&m, &[0.0], "tip").unwrap_err(),
            KinematicsError::Dimension {
                expected: 3,
                got: 1
            }
        );
        assert_eq!(
            forward_kinematics(&m, &[0.0; 3], "nope").unwrap_err(),
            KinematicsError::UnknownFrame("nope".into())
        );
        let empty: [&str; 0] = [];
        assert_eq!(
            stack_tasks(&m, &[0.0; 3], &empty).unwrap_err(),
            KinematicsError::EmptyTaskSet
        );
    }
}
