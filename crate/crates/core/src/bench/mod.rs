//! Tracking benchmark: synthetic reference trajectories, closed-loop
//! trials, metrics and CSV reports.

mod metrics;
mod report;
mod trajectory;
mod trial;

use std::path::PathBuf;

pub use metrics::{
    aggregate, joint_fluctuation, joint_fluctuation_with, median, quantile, AggregateOptions,
    Exclusion, Fluctuation, Metrics, Summary, TrialMetrics,
};
pub use report::{summary_path, write_csv, write_report, write_summary_csv, ReportOptions};
pub use trajectory::{
    gen_reference, tick_count, ReachEnvelope, TrajectorySampler, TrajectorySpec, TrialSetup,
    MAX_FREQUENCY_HZ,
};
pub use trial::{
    boundary_hit_fraction, feasibility_violation, run_paired, run_trial, sample_setups, SolverId,
    TickRecord, TrialResult, TrialSettings,
};

use crate::kinematics::KinematicsError;
use crate::solver::SolverError;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("invalid trajectory: {0}")]
    InvalidTrajectory(String),
    #[error("solver failed at tick {tick}: {source}")]
    Solver {
        tick: usize,
        #[source]
        source: SolverError,
    },
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
    #[error("need at least 3 joint samples, got {0}")]
    TooFewSamples(usize),
    #[error("no trial results to aggregate")]
    NoResults,
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {message}", path.display())]
    Csv { path: PathBuf, message: String },
}
