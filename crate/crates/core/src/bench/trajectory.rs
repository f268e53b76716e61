//! Sinusoidal end-effector references and their random sampling.

use std::f64::consts::{PI, TAU};

use rand::Rng;

use crate::kinematics::{forward_kinematics, KinematicsError, UnitQuaternion};
use crate::linalg::Vec3;
use crate::{Model, Pose};

use super::BenchError;

/// Highest oscillation frequency of any reference component.
pub const MAX_FREQUENCY_HZ: f64 = 0.5;

/// Per-component sinusoid around a center pose. Components are ordered
/// `[x, y, z, rx, ry, rz]`; the rotational ones are a world-frame
/// rotation-vector offset applied on top of the center orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySpec {
    pub center: Pose,
    pub amplitude: [f64; 6],
    pub frequency: [f64; 6],
    pub phase: [f64; 6],
    pub duration: f64,
    pub dt: f64,
}

impl TrajectorySpec {
    pub fn validate(&self) -> Result<(), BenchError> {
        if !(self.duration > 0.0) || !(self.dt > 0.0) {
            return Err(BenchError::InvalidTrajectory(
                "duration and dt must be positive".into(),
            ));
        }
        if self
            .frequency
            .iter()
            .any(|&f| !(f > 0.0 && f <= MAX_FREQUENCY_HZ))
        {
            return Err(BenchError::InvalidTrajectory(format!(
                "frequencies must lie in (0, {MAX_FREQUENCY_HZ}] Hz"
            )));
        }
        Ok(())
    }

    /// `floor(duration / dt)`, robust to the representation error of `dt`.
    pub fn tick_count(&self) -> usize {
        tick_count(self.duration, self.dt)
    }

    /// Constant reference at `center`.
    pub fn stationary(center: Pose, duration: f64, dt: f64) -> Self {
        Self {
            center,
            amplitude: [0.0; 6],
            frequency: [MAX_FREQUENCY_HZ; 6],
            phase: [0.0; 6],
            duration,
            dt,
        }
    }
}

pub fn tick_count(duration: f64, dt: f64) -> usize {
    (duration / dt + 1e-9).floor() as usize
}

/// Reference pose at time `t`.
pub fn gen_reference(spec: &TrajectorySpec, t: f64) -> Pose {
    let wave: [f64; 6] = std::array::from_fn(|i| {
        spec.amplitude[i] * (TAU * spec.frequency[i] * t + spec.phase[i]).sin()
    });
    let position = spec.center.position + Vec3::new(wave[0], wave[1], wave[2]);
    let offset = UnitQuaternion::from_rotation_vector(Vec3::new(wave[3], wave[4], wave[5]));
    Pose::new(position, offset * spec.center.orientation)
}

/// Half-extent of the end-effector positions seen over random
/// configurations, per world axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReachEnvelope {
    pub half_extent: [f64; 3],
}

impl ReachEnvelope {
    pub fn estimate<R: Rng>(
        model: &Model,
        frame: &str,
        samples: usize,
        rng: &mut R,
    ) -> Result<Self, KinematicsError> {
        let (lo, hi) = (model.lower_limits(), model.upper_limits());
        let mut min = [f64::INFINITY; 3];
        let mut max = [f64::NEG_INFINITY; 3];
        for _ in 0..samples.max(1) {
            let q: Vec<f64> = lo
                .iter()
                .zip(&hi)
                .map(|(&l, &u)| if l < u { rng.gen_range(l..=u) } else { l })
                .collect();
            let p = forward_kinematics(model, &q, frame)?.position.to_array();
            for k in 0..3 {
                min[k] = min[k].min(p[k]);
                max[k] = max[k].max(p[k]);
            }
        }
        Ok(Self {
            half_extent: std::array::from_fn(|k| 0.5 * (max[k] - min[k])),
        })
    }
}

/// Knobs of the random trajectory generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySampler {
    /// Position amplitudes are uniform on `[0, position_scale·half_extent]`.
    pub position_scale: f64,
    /// Rotation amplitudes are uniform on `[0, rotation_amplitude]` rad.
    pub rotation_amplitude: f64,
    /// The start configuration is uniform in this central fraction of each
    /// joint range.
    pub center_fraction: f64,
    pub duration: f64,
    pub dt: f64,
}

impl Default for TrajectorySampler {
    fn default() -> Self {
        Self {
            position_scale: 0.15,
            rotation_amplitude: 0.3,
            center_fraction: 0.5,
            duration: 12.5,
            dt: 5e-3,
        }
    }
}

/// One trial's trajectory and start configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialSetup {
    pub trial: usize,
    pub frame: String,
    pub spec: TrajectorySpec,
    pub q_init: Vec<f64>,
}

impl TrajectorySampler {
    pub fn sample<R: Rng>(
        &self,
        model: &Model,
        frame: &str,
        envelope: &ReachEnvelope,
        trial: usize,
        rng: &mut R,
    ) -> Result<TrialSetup, BenchError> {
        let (lo, hi) = (model.lower_limits(), model.upper_limits());
        let q_init: Vec<f64> = lo
            .iter()
            .zip(&hi)
            .map(|(&l, &u)| {
                let mid = 0.5 * (l + u);
                let half = 0.5 * (u - l) * self.center_fraction;
                if half > 0.0 {
                    rng.gen_range(mid - half..=mid + half)
                } else {
                    mid
                }
            })
            .collect();
        let center = forward_kinematics(model, &q_init, frame)?;
        let amplitude = std::array::from_fn(|i| {
            let cap = if i < 3 {
                self.position_scale * envelope.half_extent[i]
            } else {
                self.rotation_amplitude
            };
            cap * rng.gen::<f64>()
        });
        // (0, MAX]: flip the half-open [0, 1) draw
        let frequency = std::array::from_fn(|_| MAX_FREQUENCY_HZ * (1.0 - rng.gen::<f64>()));
        let phase = std::array::from_fn(|_| rng.gen_range(0.0..2.0 * PI));
        let spec = TrajectorySpec {
            center,
            amplitude,
            frequency,
            phase,
            duration: self.duration,
            dt: self.dt,
        };
        spec.validate()?;
        Ok(TrialSetup {
            trial,
            frame: frame.to_owned(),
            spec,
            q_init,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> TrajectorySpec {
        TrajectorySpec {
            center: Pose::new(
                Vec3::new(0.5, -0.2, 0.3),
                UnitQuaternion::from_rpy(0.1, 0.2, 0.3),
            ),
            amplitude: [0.1, 0.2, 0.05, 0.3, 0.1, 0.2],
            frequency: [0.5; 6],
            phase: [0.0; 6],
            duration: 12.5,
            dt: 5e-3,
        }
    }

    #[test]
    fn zero_amplitude_is_constant() {
        let mut s = spec();
        s.amplitude = [0.0; 6];
        for t in [0.0, 0.3, 7.1] {
            assert_eq!(gen_reference(&s, t), s.center);
        }
    }

    #[test]
    fn zero_crossings_give_center() {
        let s = spec();
        let p = gen_reference(&s, 0.0);
        assert!((p.position - s.center.position).norm() < 1e-15);
        assert!((p.orientation * s.center.orientation.inverse()).angle() < 1e-15);
        // sin(2π·0.5·2) = 0 again at t = 2 s
        let p = gen_reference(&s, 2.0);
        assert!((p.position - s.center.position).norm() < 1e-15);
    }

    #[test]
    fn quarter_period_reaches_amplitude() {
        let s = spec();
        let p = gen_reference(&s, 0.5);
        let d = p.position - s.center.position;
        assert!((d - Vec3::new(0.1, 0.2, 0.05)).norm() < 1e-15);
        let rot = (p.orientation * s.center.orientation.inverse()).rotation_vector();
        assert!((rot - Vec3::new(0.3, 0.1, 0.2)).norm() < 1e-15);
    }

    #[test]
    fn tick_counts() {
        assert_eq!(spec().tick_count(), 2500);
        assert_eq!(tick_count(0.05, 0.005), 10);
        assert_eq!(tick_count(0.052, 0.005), 10);
    }

    #[test]
    fn rejects_fast_or_degenerate_specs() {
        let mut s = spec();
        s.frequency[2] = 0.6;
        assert!(s.validate().is_err());
        let mut s = spec();
        s.frequency[0] = 0.0;
        assert!(s.validate().is_err());
        let mut s = spec();
        s.dt = 0.0;
        assert!(s.validate().is_err());
        spec().validate().unwrap();
    }
}
