use crate::num::Real;

use super::SolverError;

/// How the per-tick time limit is enforced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DeadlineMode {
    /// Stop once `zeta * dt` seconds of wall-clock time have elapsed.
    WallClock,
    /// Stop after `max_iters` iterations; fully deterministic.
    IterationCount,
}

impl DeadlineMode {
    pub fn as_str(self) -> &'static str {
        match self {
            DeadlineMode::WallClock => "wall",
            DeadlineMode::IterationCount => "iters",
        }
    }
}

impl std::str::FromStr for DeadlineMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "wall" | "wall_clock" => Ok(Self::WallClock),
            "iters" | "iteration_count" => Ok(Self::IterationCount),
            _ => Err(format!("unknown deadline mode `{s}` (expected wall|iters)")),
        }
    }
}

/// Mirror-descent variant run by [`solve`](super::solve).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Plain mirror descent with ε-clamping.
    Md,
    /// Accelerated, state reset to the observation on every call.
    Amd,
    /// Accelerated with the smooth reset carried across calls.
    Samd,
}

/// Hyperparameters of the mirror-descent loop. Defaults are the reference values
/// (α = 1, δ = 1e-10, ε = 1e-2, r = 5, γ = 2, η = 0.5) with a 5 ms control
/// period and ζ = 0.2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig<T> {
    /// Step size α.
    pub alpha: T,
    /// Convergence threshold δ on the objective.
    pub delta: T,
    /// Control period in seconds.
    pub dt: T,
    /// Fraction of `dt` available to one solve.
    pub zeta: T,
    /// Sigmoid threshold and clamping margin ε.
    pub epsilon: T,
    /// Smoothness of the switch between projected gradient and mirror descent.
    pub r: T,
    /// Reduction of the projected-gradient step size.
    pub gamma: T,
    /// Smooth-reset ratio η.
    pub eta: T,
    /// Iteration cap. Required in [`DeadlineMode::IterationCount`].
    pub max_iters: Option<usize>,
    pub deadline_mode: DeadlineMode,
    /// Re-evaluate the Jacobian every iteration instead of holding the
    /// initial one. Off by default.
    pub refresh_jacobian: bool,
}

impl<T: Real> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            alpha: T::one(),
            delta: T::lit(1e-10),
            dt: T::lit(5e-3),
            zeta: T::lit(0.2),
            epsilon: T::lit(1e-2),
            r: T::lit(5.0),
            gamma: T::lit(2.0),
            eta: T::lit(0.5),
            max_iters: None,
            deadline_mode: DeadlineMode::WallClock,
            refresh_jacobian: false,
        }
    }
}

impl<T: Real> SolverConfig<T> {
    /// Deterministic configuration capped at `max_iters` iterations.
    pub fn iteration_capped(max_iters: usize) -> Self {
        Self {
            max_iters: Some(max_iters),
            deadline_mode: DeadlineMode::IterationCount,
            ..Self::default()
        }
    }

    /// Wall-clock budget of one solve in seconds.
    pub fn time_budget(&self) -> T {
        self.zeta * self.dt
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |what: &str| Err(SolverError::InvalidConfig(what.to_owned()));
        let (zero, one) = (T::zero(), T::one());
        if !(self.alpha > zero) {
            return bad("alpha must be > 0");
        }
        if !(self.delta > zero) {
            return bad("delta must be > 0");
        }
        if !(self.dt > zero) {
            return bad("dt must be > 0");
        }
        if !(self.zeta > zero && self.zeta < one) {
            return bad("zeta must lie in (0, 1)");
        }
        if !(self.epsilon > zero && self.epsilon < T::half()) {
            return bad("epsilon must lie in (0, 0.5)");
        }
        if !(self.r > zero) {
            return bad("r must be > 0");
        }
        if !(self.gamma > zero) {
            return bad("gamma must be > 0");
        }
        if !(self.eta >= zero && self.eta <= one) {
            return bad("eta must lie in [0, 1]");
        }
        if self.deadline_mode == DeadlineMode::IterationCount && self.max_iters.is_none() {
            return bad("iteration-count deadline needs max_iters");
        }
        Ok(())
    }
}

/// Accelerator state carried between control ticks.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolverState<T> {
    /// Projected-gradient companion iterate.
    pub z: Vec<T>,
    /// Iteration counter; real-valued because the smooth reset scales it.
    pub k: T,
    pub initialized: bool,
}

impl<T: Real> SolverState<T> {
    pub fn new() -> Self {
        Self {
            z: Vec::new(),
            k: T::zero(),
            initialized: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolveStatus {
    Converged,
    /// Wall-clock budget exhausted.
    Deadline,
    /// Iteration cap reached.
    IterCap,
    /// The damped linear system could not be solved (LM only).
    LinearSolveFailed,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Converged => "converged",
            SolveStatus::Deadline => "deadline",
            SolveStatus::IterCap => "iter_cap",
            SolveStatus::LinearSolveFailed => "linear_solve_failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult<T> {
    pub q_ref: Vec<T>,
    /// Objective at `q_ref`.
    pub objective: T,
    pub iterations: usize,
    /// Wall-clock seconds spent in the loop.
    pub elapsed: f64,
    pub converged: bool,
    pub status: SolveStatus,
    /// The observation was outside the hardware limits and got clamped.
    pub observation_clamped: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_reference_values() {
        let c = SolverConfig::<f64>::default();
        assert_eq!(c.alpha, 1.0);
        assert_eq!(c.delta, 1e-10);
        assert_eq!(c.epsilon, 1e-2);
        assert_eq!(c.r, 5.0);
        assert_eq!(c.gamma, 2.0);
        assert_eq!(c.eta, 0.5);
        assert!((c.time_budget() - 1e-3).abs() < 1e-18);
        c.validate().unwrap();
    }

    #[test]
    fn validation_rejects_out_of_range() {
        let d = SolverConfig::<f64>::default();
        let bad = [
            SolverConfig { epsilon: 0.5, ..d },
            SolverConfig { zeta: 1.0, ..d },
            SolverConfig {
                deadline_mode: DeadlineMode::IterationCount,
                ..d
            },
            SolverConfig { eta: -0.1, ..d },
        ];
        for c in bad {
            assert!(c.validate().is_err());
        }
    }
}
