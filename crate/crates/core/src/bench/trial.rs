//! Closed-loop tracking trials under ideal kinematic execution: the joint
//! observation of each tick is the command from the previous tick.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::baselines::{jt_solve, lm_solve, LmConfig};
use crate::linalg::norm;
use crate::solver::{
    compute_box_checked, solve, task_error, SolveStatus, SolverConfig, SolverState, TaskSet,
    Variant,
};
use crate::Model;

use super::trajectory::{gen_reference, ReachEnvelope, TrajectorySampler, TrialSetup};
use super::BenchError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SolverId {
    Jt,
    Lm,
    Md,
    Amd,
    Samd,
}

impl SolverId {
    pub const ALL: [SolverId; 5] = [
        SolverId::Jt,
        SolverId::Lm,
        SolverId::Md,
        SolverId::Amd,
        SolverId::Samd,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SolverId::Jt => "jt",
            SolverId::Lm => "lm",
            SolverId::Md => "md",
            SolverId::Amd => "amd",
            SolverId::Samd => "samd",
        }
    }

    /// Mirror-descent family: iterates keep the ε margin.
    pub fn keeps_margin(self) -> bool {
        matches!(self, SolverId::Md | SolverId::Amd | SolverId::Samd)
    }
}

impl std::fmt::Display for SolverId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SolverId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "jt" => Ok(SolverId::Jt),
            "lm" => Ok(SolverId::Lm),
            "md" => Ok(SolverId::Md),
            "amd" => Ok(SolverId::Amd),
            "samd" => Ok(SolverId::Samd),
            _ => Err(format!("unknown solver `{s}` (expected jt|lm|md|amd|samd)")),
        }
    }
}

/// Solver settings shared by all trials. The LM damping floor and toggle
/// are taken from `lm`; every other field from `config`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialSettings {
    pub config: SolverConfig<f64>,
    pub lm: LmConfig<f64>,
}

impl TrialSettings {
    pub fn new(config: SolverConfig<f64>) -> Self {
        Self {
            config,
            lm: LmConfig::new(config),
        }
    }

    fn lm_config(&self) -> LmConfig<f64> {
        LmConfig {
            solver: self.config,
            ..self.lm
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TickRecord {
    pub time: f64,
    pub objective: f64,
    pub error_norm: f64,
    pub q_ref: Vec<f64>,
    pub iterations: usize,
    pub solve_time: f64,
    pub status: SolveStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub trial: usize,
    pub solver: SolverId,
    pub dt: f64,
    pub q_init: Vec<f64>,
    pub ticks: Vec<TickRecord>,
}

impl TrialResult {
    /// Joint observations seen by each tick: the start configuration, then
    /// the previous command.
    pub fn observations(&self) -> impl Iterator<Item = &[f64]> + '_ {
        std::iter::once(self.q_init.as_slice())
            .chain(self.ticks.iter().map(|t| t.q_ref.as_slice()))
            .take(self.ticks.len())
    }

    /// Start configuration followed by every command.
    pub fn joint_trajectory(&self) -> Vec<Vec<f64>> {
        std::iter::once(self.q_init.clone())
            .chain(self.ticks.iter().map(|t| t.q_ref.clone()))
            .collect()
    }
}

/// Runs one trial with `solver`. Only SAMD carries its state across ticks.
pub fn run_trial(
    model: &Model,
    solver: SolverId,
    setup: &TrialSetup,
    settings: &TrialSettings,
) -> Result<TrialResult, BenchError> {
    setup.spec.validate()?;
    let spec = &setup.spec;
    let n_ticks = spec.tick_count();
    let mut tasks = TaskSet::single(setup.frame.clone(), spec.center);
    let mut config = settings.config;
    config.dt = spec.dt;
    let lm = LmConfig {
        solver: config,
        ..settings.lm_config()
    };

    let mut q_obs = setup.q_init.clone();
    let mut state = SolverState::new();
    let mut ticks = Vec::with_capacity(n_ticks);
    for tick in 0..n_ticks {
        let time = tick as f64 * spec.dt;
        tasks.targets_mut()[0] = gen_reference(spec, time);
        let at = |source| BenchError::Solver { tick, source };
        let result = match solver {
            SolverId::Jt => jt_solve(model, &tasks, &q_obs, &config),
            SolverId::Lm => lm_solve(model, &tasks, &q_obs, &lm),
            SolverId::Md => solve(model, &tasks, &q_obs, &config, &mut state, Variant::Md),
            SolverId::Amd => solve(model, &tasks, &q_obs, &config, &mut state, Variant::Amd),
            SolverId::Samd => solve(model, &tasks, &q_obs, &config, &mut state, Variant::Samd),
        }
        .map_err(at)?;
        let e = task_error(model, &result.q_ref, &tasks).map_err(at)?;
        ticks.push(TickRecord {
            time,
            objective: result.objective,
            error_norm: norm(&e),
            q_ref: result.q_ref.clone(),
            iterations: result.iterations,
            solve_time: result.elapsed,
            status: result.status,
        });
        q_obs = result.q_ref;
    }
    Ok(TrialResult {
        trial: setup.trial,
        solver,
        dt: spec.dt,
        q_init: setup.q_init.clone(),
        ticks,
    })
}

/// Deterministic trial setups: trial `i` draws from stream `i` of a
/// ChaCha generator seeded with `seed`, so every solver sees the same
/// trajectory.
pub fn sample_setups(
    model: &Model,
    frame: &str,
    sampler: &TrajectorySampler,
    trials: usize,
    seed: u64,
) -> Result<Vec<TrialSetup>, BenchError> {
    let mut env_rng = ChaCha8Rng::seed_from_u64(seed);
    env_rng.set_stream(u64::MAX);
    let envelope = ReachEnvelope::estimate(model, frame, 2000, &mut env_rng)?;
    (0..trials)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            sampler.sample(model, frame, &envelope, i, &mut rng)
        })
        .collect()
}

/// Runs every `(setup, solver)` pair in parallel on the current rayon pool.
/// Results are ordered by trial, then by the order of `solvers`.
pub fn run_paired(
    model: &Model,
    solvers: &[SolverId],
    setups: &[TrialSetup],
    settings: &TrialSettings,
) -> Result<Vec<TrialResult>, BenchError> {
    let jobs: Vec<(&TrialSetup, SolverId)> = setups
        .iter()
        .flat_map(|s| solvers.iter().map(move |&id| (s, id)))
        .collect();
    jobs.into_par_iter()
        .map(|(setup, id)| run_trial(model, id, setup, settings))
        .collect()
}

/// Largest amount by which any command left the box built from its
/// tick's observation (ε-shrunk for the mirror-descent family). Recomputed
/// from the model, independently of the solvers.
pub fn feasibility_violation(model: &Model, result: &TrialResult, epsilon: f64) -> f64 {
    result
        .observations()
        .zip(&result.ticks)
        .map(|(q_obs, tick)| {
            let (b, _) = compute_box_checked(model, q_obs, result.dt).expect("dimension checked");
            let b = if result.solver.keeps_margin() {
                b.shrunk(epsilon)
            } else {
                b
            };
            b.violation(&tick.q_ref)
        })
        .fold(0.0, f64::max)
}

/// Fraction of ticks whose command touches a face of its box on some joint.
pub fn boundary_hit_fraction(model: &Model, result: &TrialResult) -> f64 {
    if result.ticks.is_empty() {
        return 0.0;
    }
    let hits = result
        .observations()
        .zip(&result.ticks)
        .filter(|(q_obs, tick)| {
            let (b, _) = compute_box_checked(model, q_obs, result.dt).expect("dimension checked");
            tick.q_ref
                .iter()
                .enumerate()
                .any(|(i, &q)| !b.is_degenerate(i) && (q <= b.lower[i] || q >= b.upper[i]))
        })
        .count();
    hits as f64 / result.ticks.len() as f64
}
