//! The iteration loop shared by every solver: fixed initial Jacobian,
//! objective threshold, and a wall-clock or iteration-count deadline.

use std::time::Instant;

use crate::kinematics::{frame_jacobian, Pose, RobotModel};
use crate::linalg::Matrix;
use crate::num::Real;

use super::accel::{accel_step_in_place, hard_reset, smooth_reset};
use super::bounds::{compute_box_checked, BoxConstraint};
use super::config::{DeadlineMode, SolveResult, SolveStatus, SolverConfig, SolverState, Variant};
use super::mirror::{eps_clamp_in_place, md_step_in_place};
use super::task::{gradient, objective, task_error_into, TaskSet};
use super::SolverError;

/// Validated inputs of one solve.
pub(crate) struct Problem<'a, T> {
    pub model: &'a RobotModel<T>,
    pub frames: Vec<usize>,
    pub targets: &'a [Pose<T>],
    pub weights: &'a [T],
    pub bounds: BoxConstraint<T>,
    /// Observation projected into the hardware limits.
    pub q_obs: Vec<T>,
    pub observation_clamped: bool,
}

impl<'a, T: Real> Problem<'a, T> {
    pub fn new(
        model: &'a RobotModel<T>,
        tasks: &'a TaskSet<T>,
        q_obs: &[T],
        config: &SolverConfig<T>,
    ) -> Result<Self, SolverError> {
        config.validate()?;
        if q_obs.len() != model.dof() {
            return Err(SolverError::Dimension {
                expected: model.dof(),
                got: q_obs.len(),
            });
        }
        let frames = tasks.resolve(model)?;
        let (bounds, observation_clamped) = compute_box_checked(model, q_obs, config.dt)?;
        if observation_clamped {
            log::warn!("observation outside joint limits; clamped before building the box");
        }
        let q_obs = bounds.clamp(q_obs);
        Ok(Self {
            model,
            frames,
            targets: tasks.targets(),
            weights: tasks.weights(),
            bounds,
            q_obs,
            observation_clamped,
        })
    }

    pub fn jacobian(&self, q: &[T]) -> Matrix<T> {
        stacked_jacobian(self.model, q, &self.frames)
    }

    /// Runs the loop from `q`, calling `step(q, e, jacobian)` once per
    /// iteration until the objective drops below δ or the deadline hits.
    pub fn iterate<F>(&self, config: &SolverConfig<T>, mut q: Vec<T>, mut step: F) -> SolveResult<T>
    where
        F: FnMut(&mut [T], &[T], T, &Matrix<T>) -> Result<(), SolveStatus>,
    {
        let start = Instant::now();
        let budget = config.time_budget().to_f64_lossy();
        let mut jacobian = self.jacobian(&q);
        let mut e = vec![T::zero(); 6 * self.frames.len()];
        let mut iterations = 0;
        let (status, value) = loop {
            task_error_into(self.model, &q, &self.frames, self.targets, &mut e);
            let value = objective(&e, self.weights);
            if value < config.delta {
                break (SolveStatus::Converged, value);
            }
            if config.max_iters.is_some_and(|cap| iterations >= cap) {
                break (SolveStatus::IterCap, value);
            }
            if config.deadline_mode == DeadlineMode::WallClock
                && start.elapsed().as_secs_f64() > budget
            {
                break (SolveStatus::Deadline, value);
            }
            if config.refresh_jacobian && iterations > 0 {
                jacobian = self.jacobian(&q);
            }
            if let Err(s) = step(&mut q, &e, value, &jacobian) {
                break (s, value);
            }
            iterations += 1;
        };
        SolveResult {
            q_ref: q,
            objective: value,
            iterations,
            elapsed: start.elapsed().as_secs_f64(),
            converged: status == SolveStatus::Converged,
            status,
            observation_clamped: self.observation_clamped,
        }
    }
}

pub(crate) fn stacked_jacobian<T: Real>(
    model: &RobotModel<T>,
    q: &[T],
    frames: &[usize],
) -> Matrix<T> {
    let blocks: Vec<_> = frames
        .iter()
        .map(|&f| frame_jacobian(model, q, f).1)
        .collect();
    Matrix::vstack(&blocks)
}

/// Solves one control tick with a mirror-descent variant.
///
/// `state` carries the accelerator between ticks; it is used by
/// [`Variant::Samd`], overwritten by [`Variant::Amd`] and left alone by
/// [`Variant::Md`]. The accelerator works inside the ε-shrunk box so the
/// blended iterate keeps the same margin as the mirror-descent iterate.
pub fn solve<T: Real>(
    model: &RobotModel<T>,
    tasks: &TaskSet<T>,
    q_obs: &[T],
    config: &SolverConfig<T>,
    state: &mut SolverState<T>,
    variant: Variant,
) -> Result<SolveResult<T>, SolverError> {
    let problem = Problem::new(model, tasks, q_obs, config)?;
    let bounds = &problem.bounds;
    let shrunk = bounds.shrunk(config.epsilon);

    let mut q = problem.q_obs.clone();
    eps_clamp_in_place(&mut q, bounds, config.epsilon);

    let accelerated = match variant {
        Variant::Md => false,
        Variant::Amd => {
            *state = hard_reset(&problem.q_obs, &shrunk);
            true
        }
        Variant::Samd => {
            *state = smooth_reset(std::mem::take(state), &problem.q_obs, &shrunk, config.eta);
            true
        }
    };

    let result = problem.iterate(config, q, |q, e, _, jacobian| {
        let g = gradient(jacobian, problem.weights, e);
        md_step_in_place(q, &g, bounds, config.alpha, config.epsilon);
        eps_clamp_in_place(q, bounds, config.epsilon);
        if accelerated {
            accel_step_in_place(state, q, &g, &shrunk, config.alpha, config.r, config.gamma);
            state.k += T::one();
        }
        Ok(())
    });
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::{forward_kinematics, parse_model};
    use crate::solver::task::task_error;

    const PLANAR: &str = r#"{"name": "p", "joints": [
        {"name": "j1", "kind": "revolute", "parent": "root", "axis": [0,0,1],
         "lower": -2.8, "upper": 2.8, "max_velocity": 3},
        {"name": "j2", "kind": "revolute", "parent": "j1", "origin": {"xyz": [1,0,0]},
         "axis": [0,0,1], "lower": -2.8, "upper": 2.8, "max_velocity": 3}],
      "end_effectors": {"tip": {"parent": "j2", "origin": {"xyz": [1,0,0]}}}}"#;

    fn model() -> RobotModel<f64> {
        parse_model(PLANAR).unwrap()
    }

    #[test]
    fn satisfied_target_returns_observation() {
        let m = model();
        let q = [0.3, 0.5];
        let tasks = TaskSet::single("tip", forward_kinematics(&m, &q, "tip").unwrap());
        for v in [Variant::Md, Variant::Amd, Variant::Samd] {
            let mut st = SolverState::new();
            let r = solve(
                &m,
                &tasks,
                &q,
                &SolverConfig::iteration_capped(10),
                &mut st,
                v,
            )
            .unwrap();
            assert_eq!(r.iterations, 0);
            assert!(r.converged);
            assert_eq!(r.q_ref, q.to_vec());
        }
    }

    #[test]
    fn unreachable_target_improves_and_respects_margin() {
        let m = model();
        let q_obs = [0.3, 0.5];
        let target = forward_kinematics(&m, &[1.5, -0.5], "tip").unwrap();
        let tasks = TaskSet::single("tip", target);
        let cfg = SolverConfig::iteration_capped(30);
        let e0 = objective(&task_error(&m, &q_obs, &tasks).unwrap(), tasks.weights());
        let shrunk = compute_box_checked(&m, &q_obs, cfg.dt)
            .unwrap()
            .0
            .shrunk(cfg.epsilon);
        for v in [Variant::Md, Variant::Amd, Variant::Samd] {
            let mut st = SolverState::new();
            let r = solve(&m, &tasks, &q_obs, &cfg, &mut st, v).unwrap();
            assert_eq!(r.status, SolveStatus::IterCap);
            assert!(r.objective < e0);
            assert!(shrunk.contains(&r.q_ref, 1e-12), "{v:?} {:?}", r.q_ref);

            let one = solve(
                &m,
                &tasks,
                &q_obs,
                &SolverConfig::iteration_capped(1),
                &mut SolverState::new(),
                v,
            )
            .unwrap();
            assert!(one.objective < e0, "first iteration should descend");
        }
    }

    #[test]
    fn samd_on_fresh_state_matches_amd() {
        let m = model();
        let q_obs = [0.3, 0.5];
        let tasks = TaskSet::single("tip", forward_kinematics(&m, &[0.32, 0.46], "tip").unwrap());
        let cfg = SolverConfig::iteration_capped(25);
        let mut a = SolverState::new();
        let mut s = SolverState::new();
        let ra = solve(&m, &tasks, &q_obs, &cfg, &mut a, Variant::Amd).unwrap();
        let rs = solve(&m, &tasks, &q_obs, &cfg, &mut s, Variant::Samd).unwrap();
        assert_eq!(ra.q_ref, rs.q_ref);
        assert_eq!(a, s);
    }

    #[test]
    fn input_errors() {
        let m = model();
        let tasks = TaskSet::single("tip", forward_kinematics(&m, &[0.0, 0.0], "tip").unwrap());
        let mut st = SolverState::new();
        let cfg = SolverConfig::iteration_capped(5);
        assert!(matches!(
            solve(&m, &tasks, &[0.0], &cfg, &mut st, Variant::Md),
            Err(SolverError::Dimension {
                expected: 2,
                got: 1
            })
        ));
        let bad = SolverConfig { alpha: 0.0, ..cfg };
        assert!(matches!(
            solve(&m, &tasks, &[0.0, 0.0], &bad, &mut st, Variant::Md),
            Err(SolverError::InvalidConfig(_))
        ));
    }

    #[test]
    fn wall_clock_mode_terminates() {
        let m = model();
        let target = forward_kinematics(&m, &[2.0, -1.0], "tip").unwrap();
        let tasks = TaskSet::single("tip", target);
        let cfg = SolverConfig::<f64>::default();
        let r = solve(
            &m,
            &tasks,
            &[0.0, 0.0],
            &cfg,
            &mut SolverState::new(),
            Variant::Samd,
        )
        .unwrap();
        assert_eq!(r.status, SolveStatus::Deadline);
        assert!(r.iterations > 0);
    }
}
