//! Kinematic tree data model.

use std::collections::HashMap;

use super::transform::Transform;
use crate::linalg::Vec3;
use crate::num::Real;

/// Tolerance on `‖axis‖ - 1` for a stored (already normalized) axis.
pub const AXIS_UNIT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JointKind {
    Revolute,
    Prismatic,
    Fixed,
}

impl JointKind {
    pub fn as_str(self) -> &'static str {
        match self {
            JointKind::Revolute => "revolute",
            JointKind::Prismatic => "prismatic",
            JointKind::Fixed => "fixed",
        }
    }

    pub fn is_active(self) -> bool {
        !matches!(self, JointKind::Fixed)
    }
}

/// Position and velocity limits of an active joint (rad or m, rad/s or m/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointLimits<T> {
    pub lower: T,
    pub upper: T,
    pub max_velocity: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointSpec<T> {
    pub name: String,
    pub kind: JointKind,
    /// Parent joint name; `None` for joints attached to the world frame.
    pub parent: Option<String>,
    /// Fixed offset from the parent frame.
    pub origin: Transform<T>,
    /// Motion axis in the joint frame. Unused for fixed joints.
    pub axis: Vec3<T>,
    /// `None` exactly for fixed joints.
    pub limits: Option<JointLimits<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EndEffector<T> {
    pub name: String,
    /// Parent joint name; `None` for a frame fixed to the world.
    pub parent: Option<String>,
    pub origin: Transform<T>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("duplicate joint name `{0}`")]
    DuplicateJoint(String),
    #[error("joint `{joint}` references unknown parent `{parent}`")]
    UnknownParent { joint: String, parent: String },
    #[error("cycle in parent graph through joint `{0}`")]
    Cycle(String),
    #[error("joint `{joint}` is missing `{field}`")]
    MissingField { joint: String, field: &'static str },
    #[error("joint `{joint}`: lower limit {lower} exceeds upper limit {upper}")]
    InvalidLimits {
        joint: String,
        lower: f64,
        upper: f64,
    },
    #[error("joint `{joint}`: max_velocity {value} must be finite and nonnegative")]
    InvalidVelocity { joint: String, value: f64 },
    #[error("joint `{joint}`: axis norm {norm} is not unit")]
    NonUnitAxis { joint: String, norm: f64 },
    #[error("joint `{joint}`: unknown kind `{kind}`")]
    UnknownKind { joint: String, kind: String },
    #[error("end effector `{frame}` references unknown joint `{parent}`")]
    UnknownFrameParent { frame: String, parent: String },
    #[error("`{0}`: non-finite number")]
    NonFinite(String),
}

/// Immutable kinematic tree. Active (non-fixed) joints in document order
/// define the index layout of the configuration vector.
#[derive(Debug, Clone, PartialEq)]
pub struct RobotModel<T> {
    name: String,
    joints: Vec<JointSpec<T>>,
    end_effectors: Vec<EndEffector<T>>,
    /// Joint index -> configuration index.
    dof_index: Vec<Option<usize>>,
    /// Configuration index -> joint index.
    active: Vec<usize>,
    /// Per end effector: joints from the root to its parent joint.
    chains: Vec<Vec<usize>>,
    frame_lookup: HashMap<String, usize>,
}

impl<T: Real> RobotModel<T> {
    /// Validates and indexes a joint tree.
    pub fn new(
        name: impl Into<String>,
        joints: Vec<JointSpec<T>>,
        end_effectors: Vec<EndEffector<T>>,
    ) -> Result<Self, ModelError> {
        let mut index = HashMap::with_capacity(joints.len());
        for (i, j) in joints.iter().enumerate() {
            if index.insert(j.name.clone(), i).is_some() {
                return Err(ModelError::DuplicateJoint(j.name.clone()));
            }
        }

        let mut parent = Vec::with_capacity(joints.len());
        for j in &joints {
            let p = match &j.parent {
                None => None,
                Some(p) => Some(*index.get(p).ok_or_else(|| ModelError::UnknownParent {
                    joint: j.name.clone(),
                    parent: p.clone(),
                })?),
            };
            parent.push(p);
            validate_joint(j)?;
        }

        // Walking up more than n steps means the walk revisits a joint.
        let n = joints.len();
        let mut chain_to = Vec::with_capacity(n);
        for (start, joint) in joints.iter().enumerate() {
            let mut chain = vec![start];
            let mut cur = start;
            while let Some(p) = parent[cur] {
                if chain.len() > n {
                    return Err(ModelError::Cycle(joint.name.clone()));
                }
                chain.push(p);
                cur = p;
            }
            chain.reverse();
            chain_to.push(chain);
        }

        let mut dof_index = vec![None; n];
        let mut active = Vec::new();
        for (i, j) in joints.iter().enumerate() {
            if j.kind.is_active() {
                dof_index[i] = Some(active.len());
                active.push(i);
            }
        }

        let mut frame_lookup = HashMap::new();
        let mut chains = Vec::with_capacity(end_effectors.len());
        for (k, ee) in end_effectors.iter().enumerate() {
            let chain = match &ee.parent {
                None => Vec::new(),
                Some(p) => {
                    let &ji = index.get(p).ok_or_else(|| ModelError::UnknownFrameParent {
                        frame: ee.name.clone(),
                        parent: p.clone(),
                    })?;
                    chain_to[ji].clone()
                }
            };
            chains.push(chain);
            frame_lookup.insert(ee.name.clone(), k);
        }

        Ok(Self {
            name: name.into(),
            joints,
            end_effectors,
            dof_index,
            active,
            chains,
            frame_lookup,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of active joints.
    pub fn dof(&self) -> usize {
        self.active.len()
    }

    pub fn joints(&self) -> &[JointSpec<T>] {
        &self.joints
    }

    /// Active joints in configuration order.
    pub fn active_joints(&self) -> impl Iterator<Item = &JointSpec<T>> + '_ {
        self.active.iter().map(move |&i| &self.joints[i])
    }

    pub fn end_effectors(&self) -> &[EndEffector<T>] {
        &self.end_effectors
    }

    pub fn frame_names(&self) -> impl Iterator<Item = &str> + '_ {
        self.end_effectors.iter().map(|e| e.name.as_str())
    }

    pub fn frame_index(&self, frame: &str) -> Option<usize> {
        self.frame_lookup.get(frame).copied()
    }

    /// Number of active joints that move `frame`.
    pub fn frame_dof(&self, frame: &str) -> Option<usize> {
        let f = self.frame_index(frame)?;
        Some(
            self.chain(f)
                .iter()
                .filter(|&&j| self.dof_index[j].is_some())
                .count(),
        )
    }

    /// The frame moved by the most joints. Ties go to the frame mounted
    /// furthest from its parent joint, then to the first name.
    pub fn primary_frame(&self) -> Option<&str> {
        let mut best: Option<(usize, T, &str)> = None;
        for ee in &self.end_effectors {
            let dof = self.frame_dof(&ee.name).unwrap_or(0);
            let reach = ee.origin.translation.norm();
            let better = match best {
                None => true,
                Some((d, r, _)) => dof > d || (dof == d && reach > r),
            };
            if better {
                best = Some((dof, reach, &ee.name));
            }
        }
        best.map(|(_, _, name)| name)
    }

    pub(crate) fn chain(&self, frame: usize) -> &[usize] {
        &self.chains[frame]
    }

    pub(crate) fn dof_index(&self, joint: usize) -> Option<usize> {
        self.dof_index[joint]
    }

    fn active_limits(&self) -> impl Iterator<Item = JointLimits<T>> + '_ {
        self.active_joints()
            .map(|j| j.limits.expect("active joints carry limits"))
    }

    pub fn lower_limits(&self) -> Vec<T> {
        self.active_limits().map(|l| l.lower).collect()
    }

    pub fn upper_limits(&self) -> Vec<T> {
        self.active_limits().map(|l| l.upper).collect()
    }

    pub fn max_velocities(&self) -> Vec<T> {
        self.active_limits().map(|l| l.max_velocity).collect()
    }

    /// Midpoint of the position limits.
    pub fn center_configuration(&self) -> Vec<T> {
        self.active_limits()
            .map(|l| (l.lower + l.upper) * T::half())
            .collect()
    }

    /// Converts every number to another scalar type.
    pub fn cast<U: Real>(&self) -> RobotModel<U> {
        let c = |v: T| U::lit(v.to_f64_lossy());
        let joints = self
            .joints
            .iter()
            .map(|j| JointSpec {
                name: j.name.clone(),
                kind: j.kind,
                parent: j.parent.clone(),
                origin: j.origin.cast(),
                axis: j.axis.cast(),
                limits: j.limits.map(|l| JointLimits {
                    lower: c(l.lower),
                    upper: c(l.upper),
                    max_velocity: c(l.max_velocity),
                }),
            })
            .collect();
        let ees = self
            .end_effectors
            .iter()
            .map(|e| EndEffector {
                name: e.name.clone(),
                parent: e.parent.clone(),
                origin: e.origin.cast(),
            })
            .collect();
        RobotModel::new(self.name.clone(), joints, ees).expect("cast preserves validity")
    }
}

fn validate_joint<T: Real>(j: &JointSpec<T>) -> Result<(), ModelError> {
    if !j.kind.is_active() {
        return Ok(());
    }
    let l = j.limits.ok_or_else(|| ModelError::MissingField {
        joint: j.name.clone(),
        field: "lower",
    })?;
    let (lo, hi, v) = (
        l.lower.to_f64_lossy(),
        l.upper.to_f64_lossy(),
        l.max_velocity.to_f64_lossy(),
    );
    if !lo.is_finite() || !hi.is_finite() {
        return Err(ModelError::NonFinite(j.name.clone()));
    }
    if lo > hi {
        return Err(ModelError::InvalidLimits {
            joint: j.name.clone(),
            lower: lo,
            upper: hi,
        });
    }
    if !v.is_finite() || v < 0.0 {
        return Err(ModelError::InvalidVelocity {
            joint: j.name.clone(),
            value: v,
        });
    }
    let norm = j.axis.norm().to_f64_lossy();
    let tol = if std::mem::size_of::<T>() < 8 {
        1e-6
    } else {
        AXIS_UNIT_TOL
    };
    if (norm - 1.0).abs() > tol {
        return Err(ModelError::NonUnitAxis {
            joint: j.name.clone(),
            norm,
        });
    }
    Ok(())
}
