//! Command-line front end: model inspection, one-shot solves and tracking
//! benchmarks.

// `!(x > 0)` deliberately rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use mdik::baselines::{jt_solve, lm_solve, LmConfig};
use mdik::bench::{
    aggregate, run_paired, sample_setups, write_report, AggregateOptions, ReportOptions, SolverId,
    Summary, TrajectorySampler, TrialSettings,
};
use mdik::kinematics::{forward_kinematics, parse_model};
use mdik::solver::{solve, DeadlineMode, SolveResult, SolverConfig, SolverState, Variant};
use mdik::{Model, Pose, Quaternion, Vector3};

/// Exit code of a solve that stopped before converging.
pub const EXIT_NOT_CONVERGED: i32 = 2;
/// Exit code of usage and input errors.
pub const EXIT_USAGE: i32 = 1;

/// Iteration cap used by `track` in iteration-count mode unless given.
pub const DEFAULT_TRACK_ITERS: usize = 40;

/// Quaternions further than this from unit norm are rejected.
pub const QUAT_NORM_TOL: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(name = "mdik", version, about = "Mirror-descent inverse kinematics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print joints, limits, frames and the pose at the zero configuration.
    Info { model: PathBuf },
    /// Solve one IK problem.
    Solve(SolveArgs),
    /// Run the tracking benchmark.
    Track(TrackArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub model: PathBuf,
    /// End-effector frame; defaults to the outermost frame.
    #[arg(long)]
    pub frame: Option<String>,
    /// Target pose "x y z qw qx qy qz".
    #[arg(long, allow_hyphen_values = true)]
    pub target: String,
    #[arg(long, default_value = "samd")]
    pub solver: SolverId,
    /// Start configuration, space- or comma-separated; zeros by default.
    #[arg(long, allow_hyphen_values = true)]
    pub q0: Option<String>,
    /// Config override `key=value`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Debug, Args)]
pub struct TrackArgs {
    pub model: PathBuf,
    #[arg(long)]
    pub frame: Option<String>,
    #[arg(long, value_delimiter = ',', default_value = "jt,lm,md,amd,samd")]
    pub solvers: Vec<SolverId>,
    #[arg(long, default_value_t = 500)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.005)]
    pub dt: f64,
    #[arg(long, default_value_t = 0.2)]
    pub zeta: f64,
    #[arg(long, default_value_t = 12.5)]
    pub duration: f64,
    #[arg(long, default_value = "wall")]
    pub deadline_mode: DeadlineMode,
    /// Iteration cap; 40 by default in iteration-count mode.
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Directory for `track.csv` and `track_summary.csv`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; all cores by default.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Info { model } => cmd_info(&model, out),
        Command::Solve(args) => cmd_solve(&args, out),
        Command::Track(args) => cmd_track(&args, out),
    }
}

pub fn load_model(path: &Path) -> Result<Model> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_model(&text).with_context(|| format!("parsing {}", path.display()))
}

fn resolve_frame(model: &Model, frame: Option<&str>) -> Result<String> {
    match frame {
        Some(f) if model.frame_index(f).is_some() => Ok(f.to_owned()),
        Some(f) => {
            let known: Vec<&str> = model.frame_names().collect();
            bail!("unknown frame `{f}` (model has: {})", known.join(", "))
        }
        None => model
            .primary_frame()
            .map(str::to_owned)
            .ok_or_else(|| anyhow!("model has no end-effector frames")),
    }
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
    format!("[{}]", parts.join(", "))
}

fn fmt_pose(p: &Pose) -> String {
    let [w, x, y, z] = p.orientation.coords();
    format!(
        "position {} orientation (w x y z) {}",
        fmt_vec(&p.position.to_array()),
        fmt_vec(&[w, x, y, z])
    )
}

pub fn cmd_info(path: &Path, out: &mut dyn Write) -> Result<i32> {
    let model = load_model(path)?;
    writeln!(out, "model: {}", model.name())?;
    writeln!(out, "dof: {}", model.dof())?;
    if model.dof() == 0 {
        writeln!(
            out,
            "warning: model has no active joints; nothing to solve for"
        )?;
    }
    for j in model.active_joints() {
        let l = j.limits.expect("active joints carry limits");
        writeln!(
            out,
            "  {:<16} {:<9} [{:.4}, {:.4}]  vmax {:.4}",
            j.name,
            j.kind.as_str(),
            l.lower,
            l.upper,
            l.max_velocity
        )?;
    }
    let zero = vec![0.0; model.dof()];
    writeln!(out, "frames at zero configuration:")?;
    for frame in model.frame_names() {
        let pose = forward_kinematics(&model, &zero, frame)?;
        writeln!(out, "  {frame}: {}", fmt_pose(&pose))?;
    }
    Ok(0)
}

fn parse_numbers(text: &str, what: &str) -> Result<Vec<f64>> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| anyhow!("{what}: `{s}` is not a finite number"))
        })
        .collect()
}

/// Parses "x y z qw qx qy qz". Quaternions within [`QUAT_NORM_TOL`] of
/// unit norm are renormalized; others are rejected.
pub fn parse_pose(text: &str) -> Result<Pose> {
    let v = parse_numbers(text, "target")?;
    if v.len() != 7 {
        bail!(
            "target needs 7 numbers (x y z qw qx qy qz), got {}",
            v.len()
        );
    }
    let norm = v[3..].iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > QUAT_NORM_TOL {
        bail!("target quaternion has norm {norm}, expected 1 within {QUAT_NORM_TOL}");
    }
    Ok(Pose::new(
        Vector3::new(v[0], v[1], v[2]),
        Quaternion::new_normalize(v[3], v[4], v[5], v[6]),
    ))
}

/// Applies one `key=value` override.
pub fn apply_override(lm: &mut LmConfig<f64>, assignment: &str) -> Result<()> {
    let (key, value) = assignment
        .split_once('=')
        .ok_or_else(|| anyhow!("override `{assignment}` is not key=value"))?;
    let (key, value) = (key.trim(), value.trim());
    let num = || -> Result<f64> {
        value
            .parse::<f64>()
            .map_err(|_| anyhow!("override {key}: `{value}` is not a number"))
    };
    let cfg = &mut lm.solver;
    match key {
        "alpha" => cfg.alpha = num()?,
        "delta" => cfg.delta = num()?,
        "dt" => cfg.dt = num()?,
        "zeta" => cfg.zeta = num()?,
        "epsilon" => cfg.epsilon = num()?,
        "r" => cfg.r = num()?,
        "gamma" => cfg.gamma = num()?,
        "eta" => cfg.eta = num()?,
        "max_iters" => {
            cfg.max_iters = match value {
                "none" => None,
                v => Some(
                    v.parse()
                        .map_err(|_| anyhow!("override max_iters: `{v}` is not a count"))?,
                ),
            }
        }
        "deadline_mode" => cfg.deadline_mode = value.parse().map_err(|e: String| anyhow!(e))?,
        "refresh_jacobian" => {
            cfg.refresh_jacobian = value
                .parse()
                .map_err(|_| anyhow!("override refresh_jacobian: expected true|false"))?
        }
        "lambda_min" => lm.lambda_min = num()?,
        "lm_damping" => lm.damping = value.parse().map_err(|e: String| anyhow!(e))?,
        _ => bail!(
            "unknown override `{key}` (known: alpha, delta, dt, zeta, epsilon, r, gamma, eta, \
             max_iters, deadline_mode, refresh_jacobian, lambda_min, lm_damping)"
        ),
    }
    Ok(())
}

fn validate(lm: &LmConfig<f64>) -> Result<()> {
    lm.solver.validate()?;
    if !(lm.lambda_min > 0.0) {
        bail!("lambda_min must be > 0");
    }
    Ok(())
}

/// Shortest round-trip form, in exponent notation for very small or large
/// magnitudes.
fn num(v: f64) -> String {
    if v != 0.0 && !(1e-3..1e6).contains(&v.abs()) {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}

/// One-line echo of every effective setting.
pub fn describe_config(lm: &LmConfig<f64>) -> String {
    let c = &lm.solver;
    format!(
        "alpha={} delta={} dt={} zeta={} epsilon={} r={} gamma={} eta={} max_iters={} \
         deadline_mode={} refresh_jacobian={} lambda_min={} lm_damping={} budget_ms={}",
        num(c.alpha),
        num(c.delta),
        num(c.dt),
        num(c.zeta),
        num(c.epsilon),
        num(c.r),
        num(c.gamma),
        num(c.eta),
        c.max_iters.map_or("none".to_owned(), |n| n.to_string()),
        c.deadline_mode.as_str(),
        c.refresh_jacobian,
        num(lm.lambda_min),
        lm.damping.as_str(),
        num(c.time_budget() * 1e3),
    )
}

fn solve_with(
    model: &Model,
    solver: SolverId,
    tasks: &mdik::Tasks,
    q0: &[f64],
    lm: &LmConfig<f64>,
) -> Result<SolveResult<f64>> {
    let cfg = &lm.solver;
    let mut state = SolverState::new();
    let r = match solver {
        SolverId::Jt => jt_solve(model, tasks, q0, cfg),
        SolverId::Lm => lm_solve(model, tasks, q0, lm),
        SolverId::Md => solve(model, tasks, q0, cfg, &mut state, Variant::Md),
        SolverId::Amd => solve(model, tasks, q0, cfg, &mut state, Variant::Amd),
        SolverId::Samd => solve(model, tasks, q0, cfg, &mut state, Variant::Samd),
    }?;
    Ok(r)
}

pub fn cmd_solve(args: &SolveArgs, out: &mut dyn Write) -> Result<i32> {
    let model = load_model(&args.model)?;
    let frame = resolve_frame(&model, args.frame.as_deref())?;
    let target = parse_pose(&args.target)?;
    let q0 = match &args.q0 {
        Some(text) => {
            let q = parse_numbers(text, "q0")?;
            if q.len() != model.dof() {
                bail!(
                    "q0 has {} entries, model has {} degrees of freedom",
                    q.len(),
                    model.dof()
                );
            }
            q
        }
        None => vec![0.0; model.dof()],
    };
    let mut lm = LmConfig::new(SolverConfig::default());
    for o in &args.overrides {
        apply_override(&mut lm, o)?;
    }
    validate(&lm)?;

    writeln!(out, "config: {}", describe_config(&lm))?;
    writeln!(out, "solver: {}  frame: {frame}", args.solver)?;
    let tasks = mdik::Tasks::single(frame.clone(), target);
    let r = solve_with(&model, args.solver, &tasks, &q0, &lm)?;
    if r.observation_clamped {
        writeln!(
            out,
            "warning: q0 was outside the joint limits and was clamped"
        )?;
    }
    writeln!(out, "q_ref: {}", fmt_vec(&r.q_ref))?;
    writeln!(out, "objective: {:e}", r.objective)?;
    writeln!(out, "iterations: {}", r.iterations)?;
    writeln!(out, "status: {}", r.status.as_str())?;
    writeln!(
        out,
        "pose: {}",
        fmt_pose(&forward_kinematics(&model, &r.q_ref, &frame)?)
    )?;
    Ok(if r.converged { 0 } else { EXIT_NOT_CONVERGED })
}

fn print_summary(summary: &Summary, out: &mut dyn Write, timing: bool) -> Result<()> {
    writeln!(
        out,
        "{:<6} {:>6} {:>12} {:>12} {:>12} {:>12} {:>12} {:>9}",
        "solver",
        "trials",
        "mean_err",
        "median_err",
        "fluctuation",
        "mean_t_us",
        "p99_t_us",
        "miss_rate"
    )?;
    for m in &summary.solvers {
        let t = |v: f64| {
            if timing {
                format!("{:.2}", v * 1e6)
            } else {
                "-".to_owned()
            }
        };
        writeln!(
            out,
            "{:<6} {:>6} {:>12.4e} {:>12.4e} {:>12.4e} {:>12} {:>12} {:>9}",
            m.solver.as_str(),
            m.trials,
            m.mean_error_norm,
            m.median_error_norm,
            m.joint_fluctuation,
            t(m.mean_solve_time),
            t(m.p99_solve_time),
            if timing {
                format!("{:.4}", m.deadline_miss_rate)
            } else {
                "-".to_owned()
            },
        )?;
    }
    writeln!(
        out,
        "excluded trials: {} (mean error above {:.4e} for every solver)",
        summary.excluded.len(),
        summary.threshold
    )?;
    Ok(())
}

pub fn cmd_track(args: &TrackArgs, out: &mut dyn Write) -> Result<i32> {
    let model = load_model(&args.model)?;
    if model.dof() == 0 {
        bail!("model has no active joints");
    }
    let frame = resolve_frame(&model, args.frame.as_deref())?;
    if args.solvers.is_empty() {
        bail!("no solvers selected");
    }

    let config = SolverConfig {
        dt: args.dt,
        zeta: args.zeta,
        deadline_mode: args.deadline_mode,
        max_iters: match (args.max_iters, args.deadline_mode) {
            (Some(n), _) => Some(n),
            (None, DeadlineMode::IterationCount) => Some(DEFAULT_TRACK_ITERS),
            (None, DeadlineMode::WallClock) => None,
        },
        ..SolverConfig::default()
    };
    let mut lm = LmConfig::new(config);
    for o in &args.overrides {
        apply_override(&mut lm, o)?;
    }
    validate(&lm)?;
    let config = lm.solver;
    let sampler = TrajectorySampler {
        duration: args.duration,
        dt: config.dt,
        ..Default::default()
    };

    writeln!(out, "config: {}", describe_config(&lm))?;
    writeln!(
        out,
        "model: {}  frame: {frame}  trials: {}  seed: {}  duration: {} s  dt={} zeta={}",
        model.name(),
        args.trials,
        args.seed,
        args.duration,
        config.dt,
        config.zeta
    )?;

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = args.jobs {
        pool = pool.num_threads(j.max(1));
    }
    let pool = pool.build().context("building worker pool")?;
    let settings = TrialSettings { config, lm };
    let results = pool.install(|| -> Result<_> {
        let setups = sample_setups(&model, &frame, &sampler, args.trials, args.seed)?;
        Ok(run_paired(&model, &args.solvers, &setups, &settings)?)
    })?;

    let timing = config.deadline_mode == DeadlineMode::WallClock;
    let summary = aggregate(
        &results,
        &AggregateOptions {
            budget: config.time_budget(),
            ..Default::default()
        },
    )?;
    print_summary(&summary, out, timing)?;
    if !timing {
        // timing is still measured, but kept out of the files
        let line: Vec<String> = summary
            .solvers
            .iter()
            .map(|m| format!("{}={:.2}us", m.solver, m.mean_solve_time * 1e6))
            .collect();
        writeln!(
            out,
            "mean solve time (not written to CSV): {}",
            line.join(" ")
        )?;
    }

    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let path = dir.join("track.csv");
        let summary_path = write_report(
            &results,
            &summary,
            &path,
            ReportOptions {
                omit_timing: !timing,
            },
        )?;
        writeln!(
            out,
            "wrote {} and {}",
            path.display(),
            summary_path.display()
        )?;
    }
    Ok(0)
}
