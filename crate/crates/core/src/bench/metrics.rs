//! Per-trial metrics and their aggregation across trials.

use super::trial::{SolverId, TrialResult};
use super::BenchError;

/// Smoothness proxy used by [`joint_fluctuation`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fluctuation {
    /// Mean of `‖q[t+1] - 2q[t] + q[t-1]‖`.
    #[default]
    SecondDifference,
    /// Mean of `‖q[t+1] - q[t]‖`.
    FirstDifference,
}

/// Mean second-difference norm of a joint trajectory.
pub fn joint_fluctuation(qs: &[Vec<f64>]) -> Result<f64, BenchError> {
    joint_fluctuation_with(qs, Fluctuation::SecondDifference)
}

pub fn joint_fluctuation_with(qs: &[Vec<f64>], kind: Fluctuation) -> Result<f64, BenchError> {
    if qs.len() < 3 {
        return Err(BenchError::TooFewSamples(qs.len()));
    }
    let norms: Vec<f64> = match kind {
        Fluctuation::SecondDifference => qs
            .windows(3)
            .map(|w| {
                w[0].iter()
                    .zip(&w[1])
                    .zip(&w[2])
                    .map(|((a, b), c)| (c - 2.0 * b + a).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .collect(),
        Fluctuation::FirstDifference => qs
            .windows(2)
            .map(|w| {
                w[0].iter()
                    .zip(&w[1])
                    .map(|(a, b)| (b - a).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .collect(),
    };
    Ok(norms.iter().sum::<f64>() / norms.len() as f64)
}

/// Linear-interpolation quantile of unsorted data; NaN for empty input.
pub fn quantile(values: &[f64], p: f64) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = p.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let (i, frac) = (pos.floor() as usize, pos.fract());
    if i + 1 < v.len() {
        v[i] + frac * (v[i + 1] - v[i])
    } else {
        v[i]
    }
}

pub fn median(values: &[f64]) -> f64 {
    quantile(values, 0.5)
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Scalar summary of one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialMetrics {
    pub trial: usize,
    pub solver: SolverId,
    pub mean_error_norm: f64,
    pub joint_fluctuation: f64,
    pub mean_solve_time: f64,
    pub p99_solve_time: f64,
    pub deadline_miss_rate: f64,
}

impl TrialMetrics {
    /// `budget` is the per-tick solve budget in seconds; a tick whose solve
    /// took longer counts as a miss.
    pub fn from_result(result: &TrialResult, budget: f64, kind: Fluctuation) -> Self {
        let errors: Vec<f64> = result.ticks.iter().map(|t| t.error_norm).collect();
        let times: Vec<f64> = result.ticks.iter().map(|t| t.solve_time).collect();
        let misses = times.iter().filter(|&&t| t > budget).count();
        let n = result.ticks.len().max(1) as f64;
        Self {
            trial: result.trial,
            solver: result.solver,
            mean_error_norm: mean(&errors),
            joint_fluctuation: joint_fluctuation_with(&result.joint_trajectory(), kind)
                .unwrap_or(0.0),
            mean_solve_time: mean(&times),
            p99_solve_time: quantile(&times, 0.99),
            deadline_miss_rate: misses as f64 / n,
        }
    }
}

/// Aggregated metrics of one solver over the kept trials.
#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    pub solver: SolverId,
    pub trials: usize,
    pub mean_error_norm: f64,
    pub median_error_norm: f64,
    pub error_norm_std: f64,
    pub joint_fluctuation: f64,
    pub median_joint_fluctuation: f64,
    pub mean_solve_time: f64,
    pub p99_solve_time: f64,
    pub deadline_miss_rate: f64,
    pub excluded_trials: usize,
}

/// Which trials are dropped as too hard to follow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exclusion {
    /// Drop trials where every solver's mean error exceeds this quantile of
    /// all per-(trial, solver) mean errors.
    Quantile(f64),
    /// Same rule with an absolute threshold.
    Threshold(f64),
    None,
}

impl Default for Exclusion {
    fn default() -> Self {
        Exclusion::Quantile(0.95)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AggregateOptions {
    pub exclusion: Exclusion,
    pub fluctuation: Fluctuation,
    /// Per-tick solve budget for the miss rate, seconds.
    pub budget: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    /// In order of first appearance.
    pub solvers: Vec<Metrics>,
    pub per_trial: Vec<TrialMetrics>,
    pub excluded: Vec<usize>,
    pub threshold: f64,
}

impl Summary {
    pub fn get(&self, solver: SolverId) -> Option<&Metrics> {
        self.solvers.iter().find(|m| m.solver == solver)
    }

    pub fn kept_trials(&self, solver: SolverId) -> impl Iterator<Item = &TrialMetrics> + '_ {
        self.per_trial
            .iter()
            .filter(move |m| m.solver == solver && !self.excluded.contains(&m.trial))
    }
}

pub fn aggregate(
    results: &[TrialResult],
    options: &AggregateOptions,
) -> Result<Summary, BenchError> {
    if results.is_empty() {
        return Err(BenchError::NoResults);
    }
    let per_trial: Vec<TrialMetrics> = results
        .iter()
        .map(|r| TrialMetrics::from_result(r, options.budget, options.fluctuation))
        .collect();

    let errors: Vec<f64> = per_trial.iter().map(|m| m.mean_error_norm).collect();
    let threshold = match options.exclusion {
        Exclusion::Quantile(p) => quantile(&errors, p),
        Exclusion::Threshold(t) => t,
        Exclusion::None => f64::INFINITY,
    };
    let mut trials: Vec<usize> = per_trial.iter().map(|m| m.trial).collect();
    trials.sort_unstable();
    trials.dedup();
    let excluded: Vec<usize> = trials
        .into_iter()
        .filter(|&t| {
            per_trial
                .iter()
                .filter(|m| m.trial == t)
                .all(|m| m.mean_error_norm > threshold)
        })
        .collect();

    let mut order: Vec<SolverId> = Vec::new();
    for m in &per_trial {
        if !order.contains(&m.solver) {
            order.push(m.solver);
        }
    }

    let solvers = order
        .into_iter()
        .map(|solver| {
            let kept: Vec<&TrialMetrics> = per_trial
                .iter()
                .filter(|m| m.solver == solver && !excluded.contains(&m.trial))
                .collect();
            let err: Vec<f64> = kept.iter().map(|m| m.mean_error_norm).collect();
            let fl: Vec<f64> = kept.iter().map(|m| m.joint_fluctuation).collect();
            let times: Vec<f64> = results
                .iter()
                .filter(|r| r.solver == solver && !excluded.contains(&r.trial))
                .flat_map(|r| r.ticks.iter().map(|t| t.solve_time))
                .collect();
            let misses = times.iter().filter(|&&t| t > options.budget).count();
            let mu = mean(&err);
            let var = if err.is_empty() {
                f64::NAN
            } else {
                err.iter().map(|e| (e - mu).powi(2)).sum::<f64>() / err.len() as f64
            };
            Metrics {
                solver,
                trials: kept.len(),
                mean_error_norm: mu,
                median_error_norm: median(&err),
                error_norm_std: var.sqrt(),
                joint_fluctuation: mean(&fl),
                median_joint_fluctuation: median(&fl),
                mean_solve_time: mean(&times),
                p99_solve_time: quantile(&times, 0.99),
                deadline_miss_rate: if times.is_empty() {
                    0.0
                } else {
                    misses as f64 / times.len() as f64
                },
                excluded_trials: excluded.len(),
            }
        })
        .collect();

    Ok(Summary {
        solvers,
        per_trial,
        excluded,
        threshold,
    })
}
