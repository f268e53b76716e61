//! CSV output of tracking runs.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use super::metrics::Summary;
use super::trial::TrialResult;
use super::BenchError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ReportOptions {
    /// Leave timing columns empty so the files only depend on the seed.
    pub omit_timing: bool,
}

/// `<dir>/<stem>_summary.csv` next to a per-tick file.
pub fn summary_path(per_tick: &Path) -> PathBuf {
    let stem = per_tick
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "results".to_owned());
    per_tick.with_file_name(format!("{stem}_summary.csv"))
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> BenchError + '_ {
    move |source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> BenchError + '_ {
    move |e| BenchError::Csv {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

fn writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>, BenchError> {
    let file = File::create(path).map_err(io_err(path))?;
    Ok(csv::Writer::from_writer(BufWriter::new(file)))
}

fn opt(value: f64, omit: bool) -> String {
    if omit {
        String::new()
    } else {
        value.to_string()
    }
}

/// One row per tick. The joint columns `q_0..` follow the degrees of
/// freedom of the first result.
pub fn write_csv(
    results: &[TrialResult],
    path: &Path,
    options: ReportOptions,
) -> Result<(), BenchError> {
    let dof = results.first().map_or(0, |r| r.q_init.len());
    let mut w = writer(path)?;
    let mut header: Vec<String> = [
        "trial",
        "solver",
        "tick",
        "time_s",
        "error_norm",
        "objective",
        "iterations",
        "solve_time_s",
        "status",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    header.extend((0..dof).map(|i| format!("q_{i}")));
    w.write_record(&header).map_err(csv_err(path))?;
    for r in results {
        for (i, t) in r.ticks.iter().enumerate() {
            let mut row = vec![
                r.trial.to_string(),
                r.solver.to_string(),
                i.to_string(),
                t.time.to_string(),
                t.error_norm.to_string(),
                t.objective.to_string(),
                t.iterations.to_string(),
                opt(t.solve_time, options.omit_timing),
                t.status.as_str().to_owned(),
            ];
            row.extend(t.q_ref.iter().map(|q| q.to_string()));
            w.write_record(&row).map_err(csv_err(path))?;
        }
    }
    w.flush().map_err(io_err(path))
}

pub fn write_summary_csv(
    summary: &Summary,
    path: &Path,
    options: ReportOptions,
) -> Result<(), BenchError> {
    let mut w = writer(path)?;
    w.write_record([
        "solver",
        "trials",
        "mean_error_norm",
        "median_error_norm",
        "joint_fluctuation",
        "mean_solve_time_s",
        "p99_solve_time_s",
        "deadline_miss_rate",
        "excluded_trials",
    ])
    .map_err(csv_err(path))?;
    let omit = options.omit_timing;
    for m in &summary.solvers {
        w.write_record([
            m.solver.to_string(),
            m.trials.to_string(),
            m.mean_error_norm.to_string(),
            m.median_error_norm.to_string(),
            m.joint_fluctuation.to_string(),
            opt(m.mean_solve_time, omit),
            opt(m.p99_solve_time, omit),
            opt(m.deadline_miss_rate, omit),
            m.excluded_trials.to_string(),
        ])
        .map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Writes the per-tick file at `path` and the summary next to it.
/// Returns the summary path.
pub fn write_report(
    results: &[TrialResult],
    summary: &Summary,
    path: &Path,
    options: ReportOptions,
) -> Result<PathBuf, BenchError> {
    write_csv(results, path, options)?;
    let s = summary_path(path);
    write_summary_csv(summary, &s, options)?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::trial::{SolverId, TickRecord};
    use crate::solver::SolveStatus;

    fn sample(ticks: usize) -> TrialResult {
        TrialResult {
            trial: 7,
            solver: SolverId::Amd,
            dt: 0.005,
            q_init: vec![0.0, 0.1],
            ticks: (0..ticks)
                .map(|i| TickRecord {
                    time: i as f64 * 0.005,
                    objective: 1.0 / 3.0,
                    error_norm: 0.1 + i as f64,
                    q_ref: vec![0.2, -std::f64::consts::PI],
                    iterations: 4,
                    solve_time: 1.5e-5,
                    status: SolveStatus::Deadline,
                })
                .collect(),
        }
    }

    #[test]
    fn one_row_per_tick_plus_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.csv");
        write_csv(&[sample(2500)], &path, ReportOptions::default()).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 2501);
        assert!(text.starts_with("trial,solver,tick,time_s,error_norm,objective,iterations,solve_time_s,status,q_0,q_1\n"));
    }

    #[test]
    fn values_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.csv");
        let r = sample(3);
        write_csv(std::slice::from_ref(&r), &path, ReportOptions::default()).unwrap();
        let mut rdr = csv::Reader::from_path(&path).unwrap();
        for (rec, tick) in rdr.records().zip(&r.ticks) {
            let rec = rec.unwrap();
            assert_eq!(&rec[1], "amd");
            assert_eq!(rec[5].parse::<f64>().unwrap(), tick.objective);
            assert_eq!(rec[7].parse::<f64>().unwrap(), tick.solve_time);
            assert_eq!(&rec[8], "deadline");
            assert_eq!(rec[10].parse::<f64>().unwrap(), tick.q_ref[1]);
        }
    }

    #[test]
    fn timing_can_be_omitted() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.csv");
        write_csv(&[sample(1)], &path, ReportOptions { omit_timing: true }).unwrap();
        let mut rdr = csv::Reader::from_path(&path).unwrap();
        let rec = rdr.records().next().unwrap().unwrap();
        assert_eq!(&rec[7], "");
    }

    #[test]
    fn empty_results_give_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.csv");
        write_csv(&[], &path, ReportOptions::default()).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 1);
    }

    #[test]
    fn io_error_names_path() {
        let path = Path::new("/nonexistent-dir/x.csv");
        let err = write_csv(&[], path, ReportOptions::default()).unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/x.csv"));
    }

    #[test]
    fn summary_lives_next_to_per_tick_file() {
        assert_eq!(
            summary_path(Path::new("out/track.csv")),
            PathBuf::from("out/track_summary.csv")
        );
    }
}
