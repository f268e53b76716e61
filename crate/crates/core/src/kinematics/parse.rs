//! JSON robot-model documents.
//!
//! ```json
//! {
//!   "name": "planar2r",
//!   "joints": [
//!     {"name": "j1", "kind": "revolute", "parent": "root",
//!      "origin": {"xyz": [0, 0, 0], "rpy": [0, 0, 0]}, "axis": [0, 0, 1],
//!      "lower": -2.8, "upper": 2.8, "max_velocity": 3.0}
//!   ],
//!   "end_effectors": {"tip": {"parent": "j1", "origin": {"xyz": [1, 0, 0], "rpy": [0, 0, 0]}}}
//! }
//! ```
//!
//! Joint order in the document is the configuration-vector order. Rotations
//! are roll-pitch-yaw, extrinsic X then Y then Z.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::model::{EndEffector, JointKind, JointLimits, JointSpec, ModelError, RobotModel};
use super::quat::UnitQuaternion;
use super::transform::Transform;
use crate::linalg::Vec3;
use crate::num::Real;

/// Axes this close to unit length are normalized silently.
pub const AXIS_NORMALIZE_TOL: f64 = 1e-6;

const ROOT: &str = "root";

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOrigin {
    #[serde(default)]
    xyz: [f64; 3],
    #[serde(default)]
    rpy: [f64; 3],
}

impl Default for RawOrigin {
    fn default() -> Self {
        Self {
            xyz: [0.0; 3],
            rpy: [0.0; 3],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawJoint {
    name: String,
    kind: String,
    parent: String,
    #[serde(default)]
    origin: RawOrigin,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    axis: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lower: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    upper: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    max_velocity: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFrame {
    parent: String,
    #[serde(default)]
    origin: RawOrigin,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    name: String,
    joints: Vec<RawJoint>,
    #[serde(default)]
    end_effectors: BTreeMap<String, RawFrame>,
}

fn origin_to_transform<T: Real>(o: &RawOrigin, owner: &str) -> Result<Transform<T>, ModelError> {
    if o.xyz.iter().chain(&o.rpy).any(|v| !v.is_finite()) {
        return Err(ModelError::NonFinite(owner.to_owned()));
    }
    let [x, y, z] = o.xyz.map(T::lit);
    let [r, p, yaw] = o.rpy.map(T::lit);
    Ok(Transform::new(
        UnitQuaternion::from_rpy(r, p, yaw),
        Vec3::new(x, y, z),
    ))
}

fn transform_to_origin<T: Real>(t: &Transform<T>) -> RawOrigin {
    RawOrigin {
        xyz: t.translation.to_array().map(|v| v.to_f64_lossy()),
        rpy: t.rotation.to_rpy().map(|v| v.to_f64_lossy()),
    }
}

fn parent_ref(p: &str) -> Option<String> {
    (p != ROOT).then(|| p.to_owned())
}

fn convert_joint<T: Real>(raw: &RawJoint) -> Result<JointSpec<T>, ModelError> {
    let kind = match raw.kind.as_str() {
        "revolute" => JointKind::Revolute,
        "prismatic" => JointKind::Prismatic,
        "fixed" => JointKind::Fixed,
        other => {
            return Err(ModelError::UnknownKind {
                joint: raw.name.clone(),
                kind: other.to_owned(),
            })
        }
    };
    let origin = origin_to_transform(&raw.origin, &raw.name)?;
    if !kind.is_active() {
        return Ok(JointSpec {
            name: raw.name.clone(),
            kind,
            parent: parent_ref(&raw.parent),
            origin,
            axis: Vec3::new(T::zero(), T::zero(), T::one()),
            limits: None,
        });
    }

    let missing = |field| ModelError::MissingField {
        joint: raw.name.clone(),
        field,
    };
    let axis = raw.axis.ok_or_else(|| missing("axis"))?;
    let lower = raw.lower.ok_or_else(|| missing("lower"))?;
    let upper = raw.upper.ok_or_else(|| missing("upper"))?;
    let max_velocity = raw.max_velocity.ok_or_else(|| missing("max_velocity"))?;

    if axis.iter().any(|v| !v.is_finite()) {
        return Err(ModelError::NonFinite(raw.name.clone()));
    }
    let norm = axis.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > AXIS_NORMALIZE_TOL {
        return Err(ModelError::NonUnitAxis {
            joint: raw.name.clone(),
            norm,
        });
    }
    let axis = axis.map(|v| T::lit(v / norm));

    Ok(JointSpec {
        name: raw.name.clone(),
        kind,
        parent: parent_ref(&raw.parent),
        origin,
        axis: Vec3::new(axis[0], axis[1], axis[2]),
        limits: Some(JointLimits {
            lower: T::lit(lower),
            upper: T::lit(upper),
            max_velocity: T::lit(max_velocity),
        }),
    })
}

/// Parses and validates a model document.
pub fn parse_model<T: Real>(text: &str) -> Result<RobotModel<T>, ModelError> {
    let raw: RawModel = serde_json::from_str(text).map_err(|e| ModelError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;

    let joints = raw
        .joints
        .iter()
        .map(convert_joint)
        .collect::<Result<Vec<_>, _>>()?;
    let end_effectors = raw
        .end_effectors
        .iter()
        .map(|(name, f)| {
            Ok(EndEffector {
                name: name.clone(),
                parent: parent_ref(&f.parent),
                origin: origin_to_transform(&f.origin, name)?,
            })
        })
        .collect::<Result<Vec<_>, ModelError>>()?;
    RobotModel::new(raw.name, joints, end_effectors)
}

/// Serializes a model back into the document format.
pub fn model_to_json<T: Real>(model: &RobotModel<T>) -> String {
    let parent = |p: &Option<String>| p.clone().unwrap_or_else(|| ROOT.to_owned());
    let raw = RawModel {
        name: model.name().to_owned(),
        joints: model
            .joints()
            .iter()
            .map(|j| RawJoint {
                name: j.name.clone(),
                kind: j.kind.as_str().to_owned(),
                parent: parent(&j.parent),
                origin: transform_to_origin(&j.origin),
                axis: j
                    .limits
                    .map(|_| j.axis.to_array().map(|v| v.to_f64_lossy())),
                lower: j.limits.map(|l| l.lower.to_f64_lossy()),
                upper: j.limits.map(|l| l.upper.to_f64_lossy()),
                max_velocity: j.limits.map(|l| l.max_velocity.to_f64_lossy()),
            })
            .collect(),
        end_effectors: model
            .end_effectors()
            .iter()
            .map(|e| {
                (
                    e.name.clone(),
                    RawFrame {
                        parent: parent(&e.parent),
                        origin: transform_to_origin(&e.origin),
                    },
                )
            })
            .collect(),
    };
    serde_json::to_string_pretty(&raw).expect("model serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_LINK: &str = r#"{
      "name": "two",
      "joints": [
        {"name": "j1", "kind": "revolute", "parent": "root",
         "origin": {"xyz": [0,0,0], "rpy": [0,0,0]}, "axis": [0,0,1],
         "lower": -1, "upper": 1, "max_velocity": 2},
        {"name": "j2", "kind": "revolute", "parent": "j1",
         "origin": {"xyz": [1,0,0], "rpy": [0,0,0]}, "axis": [0,0,1],
         "lower": -1, "upper": 1, "max_velocity": 2}
      ],
      "end_effectors": {"tip": {"parent": "j2", "origin": {"xyz": [1,0,0], "rpy": [0,0,0]}}}
    }"#;

    #[test]
    fn two_joint_document() {
        let m: RobotModel<f64> = parse_model(TWO_LINK).unwrap();
        assert_eq!(m.dof(), 2);
        assert_eq!(m.frame_index("tip"), Some(0));
    }

    #[test]
    fn self_parent_is_a_cycle() {
        let doc = TWO_LINK.replace(r#""parent": "j1""#, r#""parent": "j2""#);
        let err = parse_model::<f64>(&doc).unwrap_err();
        assert_eq!(err, ModelError::Cycle("j2".into()));
    }

    #[test]
    fn two_joint_cycle() {
        let doc = TWO_LINK.replace(r#""parent": "root""#, r#""parent": "j2""#);
        assert!(matches!(
            parse_model::<f64>(&doc).unwrap_err(),
            ModelError::Cycle(_)
        ));
    }

    #[test]
    fn inverted_limits_name_the_joint() {
        let doc = TWO_LINK.replacen(r#""lower": -1, "upper": 1"#, r#""lower": 2, "upper": 1"#, 1);
        let err = parse_model::<f64>(&doc).unwrap_err();
        assert!(matches!(&err, ModelError::InvalidLimits { joint, .. } if joint == "j1"));
        assert!(err.to_string().contains("j1"));
    }

    #[test]
    fn duplicate_joint_name() {
        let doc = TWO_LINK.replace(r#""name": "j2""#, r#""name": "j1""#);
        assert_eq!(
            parse_model::<f64>(&doc).unwrap_err(),
            ModelError::DuplicateJoint("j1".into())
        );
    }

    #[test]
    fn missing_limits_on_active_joint() {
        let doc = TWO_LINK.replacen(r#", "max_velocity": 2"#, "", 1);
        assert_eq!(
            parse_model::<f64>(&doc).unwrap_err(),
            ModelError::MissingField {
                joint: "j1".into(),
                field: "max_velocity"
            }
        );
    }

    #[test]
    fn nearly_unit_axis_is_normalized_otherwise_rejected() {
        let doc = TWO_LINK.replacen("[0,0,1]", "[0,0,1.0000005]", 1);
        let m: RobotModel<f64> = parse_model(&doc).unwrap();
        assert!((m.joints()[0].axis.norm() - 1.0).abs() < 1e-15);

        let doc = TWO_LINK.replacen("[0,0,1]", "[0,0,1.1]", 1);
        assert!(matches!(
            parse_model::<f64>(&doc).unwrap_err(),
            ModelError::NonUnitAxis { .. }
        ));
    }

    #[test]
    fn syntax_error_reports_position() {
        let doc = "{\n  \"name\": \"x\",\n  \"joints\": [,]\n}";
        match parse_model::<f64>(doc).unwrap_err() {
            ModelError::Syntax { line, column, .. } => {
                assert_eq!(line, 3);
                assert!(column > 0);
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn unknown_frame_parent() {
        let doc = TWO_LINK.replace(r#""tip": {"parent": "j2""#, r#""tip": {"parent": "j9""#);
        assert!(matches!(
            parse_model::<f64>(&doc).unwrap_err(),
            ModelError::UnknownFrameParent { .. }
        ));
    }

    #[test]
    fn fixed_joints_only_has_zero_dof() {
        let doc = r#"{"name": "rigid", "joints": [
            {"name": "mount", "kind": "fixed", "parent": "root",
             "origin": {"xyz": [0,0,1], "rpy": [0,0,0]}}],
            "end_effectors": {"tool": {"parent": "mount"}}}"#;
        let m: RobotModel<f64> = parse_model(doc).unwrap();
        assert_eq!(m.dof(), 0);
    }
}
