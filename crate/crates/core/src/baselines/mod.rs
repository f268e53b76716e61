//! Clamped Jacobian-transpose and Levenberg–Marquardt solvers, sharing the
//! mirror-descent loop (fixed initial Jacobian, same stopping rules) so that
//! only the update rule differs.

use crate::kinematics::RobotModel;
use crate::linalg::{cholesky_solve, FactorError, Matrix};
use crate::num::Real;
use crate::solver::{
    gradient, Problem, SolveResult, SolveStatus, SolverConfig, SolverError, TaskSet,
};

/// How LM chooses its damping each iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LmDamping {
    /// `λ = E(q) + λ_min`.
    ErrorAdaptive,
    /// `λ = λ_min`.
    Constant,
}

impl LmDamping {
    pub fn as_str(self) -> &'static str {
        match self {
            LmDamping::ErrorAdaptive => "adaptive",
            LmDamping::Constant => "constant",
        }
    }
}

impl std::str::FromStr for LmDamping {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "adaptive" => Ok(Self::ErrorAdaptive),
            "constant" => Ok(Self::Constant),
            _ => Err(format!(
                "unknown damping `{s}` (expected adaptive|constant)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmConfig<T> {
    pub solver: SolverConfig<T>,
    /// Damping floor λ_min.
    pub lambda_min: T,
    pub damping: LmDamping,
}

impl<T: Real> Default for LmConfig<T> {
    fn default() -> Self {
        Self::new(SolverConfig::default())
    }
}

impl<T: Real> LmConfig<T> {
    pub fn new(solver: SolverConfig<T>) -> Self {
        Self {
            solver,
            lambda_min: T::lit(1e-3),
            damping: LmDamping::ErrorAdaptive,
        }
    }

    /// Damping used at objective value `e`.
    pub fn damping_at(&self, e: T) -> T {
        match self.damping {
            LmDamping::ErrorAdaptive => e + self.lambda_min,
            LmDamping::Constant => self.lambda_min,
        }
    }
}

/// Clamped Jacobian transpose: `q ← clamp(q - α·g)`.
pub fn jt_solve<T: Real>(
    model: &RobotModel<T>,
    tasks: &TaskSet<T>,
    q_obs: &[T],
    config: &SolverConfig<T>,
) -> Result<SolveResult<T>, SolverError> {
    let problem = Problem::new(model, tasks, q_obs, config)?;
    let bounds = &problem.bounds;
    Ok(
        problem.iterate(config, problem.q_obs.clone(), |q, e, _, jacobian| {
            let g = gradient(jacobian, problem.weights, e);
            for (qi, gi) in q.iter_mut().zip(g) {
                *qi -= config.alpha * gi;
            }
            bounds.clamp_in_place(q);
            Ok(())
        }),
    )
}

/// Clamped Levenberg–Marquardt: solves `(JᵀWJ + λI)·Δq = JᵀWe` and sets
/// `q ← clamp(q + Δq)`. A failed factorization stops the loop with
/// [`SolveStatus::LinearSolveFailed`] and returns the current iterate.
pub fn lm_solve<T: Real>(
    model: &RobotModel<T>,
    tasks: &TaskSet<T>,
    q_obs: &[T],
    config: &LmConfig<T>,
) -> Result<SolveResult<T>, SolverError> {
    if !(config.lambda_min > T::zero()) {
        return Err(SolverError::InvalidConfig("lambda_min must be > 0".into()));
    }
    let cfg = &config.solver;
    let problem = Problem::new(model, tasks, q_obs, cfg)?;
    let bounds = &problem.bounds;
    let mut gram: Option<Matrix<T>> = None;
    Ok(
        problem.iterate(cfg, problem.q_obs.clone(), |q, e, value, jacobian| {
            if cfg.refresh_jacobian || gram.is_none() {
                gram = Some(jacobian.weighted_gram(problem.weights));
            }
            let mut a = gram.clone().expect("gram computed");
            let lambda = config.damping_at(value);
            for i in 0..a.rows() {
                a[(i, i)] += lambda;
            }
            let rhs: Vec<T> = gradient(jacobian, problem.weights, e)
                .into_iter()
                .map(|g| -g)
                .collect();
            let dq = solve_damped_system(&a, &rhs).map_err(|_| SolveStatus::LinearSolveFailed)?;
            for (qi, d) in q.iter_mut().zip(dq) {
                *qi += d;
            }
            bounds.clamp_in_place(q);
            Ok(())
        }),
    )
}

/// Dense symmetric positive-definite solve for the damped normal equations.
pub fn solve_damped_system<T: Real>(a: &Matrix<T>, b: &[T]) -> Result<Vec<T>, FactorError> {
    cholesky_solve(a, b)
}
