use std::fs::File;
use std::path::Path;

use serde::Deserialize;

use crate::solvers::{Method, Status};

use super::{BenchError, FrontierEntry, RunSummary, SolverChoice, SweepResult};

pub const RUNS_HEADER: [&str; 10] = [
    "case",
    "method",
    "depth",
    "ra",
    "iteration",
    "bnorm_residual",
    "grad_u",
    "grad_T",
    "wall_ms",
    "status",
];
pub const FRONTIER_HEADER: [&str; 4] = ["case", "method", "depth", "max_ra_converged"];

/// 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn io_err(path: &Path) -> impl Fn(csv::Error) -> BenchError + '_ {
    move |e| BenchError::Csv {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

/// One row per iteration of every run.
pub fn write_runs_csv(case: &str, runs: &[RunSummary], path: &Path) -> Result<(), BenchError> {
    let err = io_err(path);
    let mut w = csv::Writer::from_path(path).map_err(&err)?;
    w.write_record(RUNS_HEADER).map_err(&err)?;
    for run in runs {
        for r in &run.history.records {
            w.write_record([
                case.to_string(),
                run.choice.method.to_string(),
                run.choice.depth.to_string(),
                fmt_f64(run.ra),
                r.iteration.to_string(),
                fmt_f64(r.residual),
                fmt_f64(r.grad_u),
                fmt_f64(r.grad_t),
                fmt_f64(r.wall_ms),
                r.status.to_string(),
            ])
            .map_err(&err)?;
        }
    }
    w.flush().map_err(|e| err(e.into()))
}

pub fn write_frontier_csv(case: &str, frontier: &[FrontierEntry], path: &Path) -> Result<(), BenchError> {
    let err = io_err(path);
    let mut w = csv::Writer::from_path(path).map_err(&err)?;
    w.write_record(FRONTIER_HEADER).map_err(&err)?;
    for f in frontier {
        w.write_record([
            case.to_string(),
            f.choice.method.to_string(),
            f.choice.depth.to_string(),
            f.max_ra_converged.map(fmt_f64).unwrap_or_default(),
        ])
        .map_err(&err)?;
    }
    w.flush().map_err(|e| err(e.into()))
}

/// Writes `runs.csv` and `frontier.csv` into `dir`.
pub fn write_csv(result: &SweepResult, dir: &Path) -> Result<(), BenchError> {
    std::fs::create_dir_all(dir).map_err(|source| BenchError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    write_runs_csv(&result.case, &result.runs, &dir.join("runs.csv"))?;
    write_frontier_csv(&result.case, &result.frontier, &dir.join("frontier.csv"))
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct RunRow {
    pub case: String,
    pub method: String,
    pub depth: usize,
    pub ra: f64,
    pub iteration: usize,
    pub bnorm_residual: f64,
    pub grad_u: f64,
    #[serde(rename = "grad_T")]
    pub grad_t: f64,
    pub wall_ms: f64,
    pub status: String,
}

pub fn read_runs_csv(path: &Path) -> Result<Vec<RunRow>, BenchError> {
    let err = io_err(path);
    let file = File::open(path).map_err(|source| BenchError::Io {
        path: path.display().to_string(),
        source,
    })?;
    csv::Reader::from_reader(file)
        .deserialize()
        .collect::<Result<Vec<RunRow>, _>>()
        .map_err(err)
}

/// Frontier recomputed from parsed rows: the final row of each run gives its
/// status.
pub fn frontier_from_rows(rows: &[RunRow]) -> Result<Vec<FrontierEntry>, BenchError> {
    let mut last: Vec<(SolverChoice, f64, Status)> = Vec::new();
    for row in rows {
        let method: Method = row.method.parse().map_err(BenchError::Invalid)?;
        let status: Status = row.status.parse().map_err(BenchError::Invalid)?;
        let choice = SolverChoice { method, depth: row.depth };
        match last.iter_mut().find(|(c, ra, _)| *c == choice && *ra == row.ra) {
            Some(entry) => entry.2 = status,
            None => last.push((choice, row.ra, status)),
        }
    }
    let mut choices: Vec<SolverChoice> = last.iter().map(|e| e.0).collect();
    choices.sort();
    choices.dedup();
    Ok(choices
        .into_iter()
        .map(|choice| FrontierEntry {
            choice,
            max_ra_converged: last
                .iter()
                .filter(|(c, _, s)| *c == choice && *s == Status::Converged)
                .map(|e| e.1)
                .reduce(f64::max),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::{IterationHistory, IterationRecord};

    fn run(method: Method, depth: usize, ra: f64, statuses: &[Status]) -> RunSummary {
        RunSummary {
            choice: SolverChoice::new(method, depth),
            ra,
            divergence: 0.0,
            history: IterationHistory {
                records: statuses
                    .iter()
                    .enumerate()
                    .map(|(k, &status)| IterationRecord {
                        iteration: k + 1,
                        residual: 0.1f64.powi(k as i32) / 3.0,
                        grad_u: 1.0 / 7.0,
                        grad_t: 2.0f64.sqrt(),
                        wall_ms: 12.5,
                        status,
                        failure: None,
                    })
                    .collect(),
            },
        }
    }

    #[test]
    fn empty_sweep_is_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let result = SweepResult { case: "cavity".into(), runs: vec![], frontier: vec![] };
        write_csv(&result, dir.path()).unwrap();
        let text = std::fs::read_to_string(dir.path().join("runs.csv")).unwrap();
        assert_eq!(text, format!("{}\n", RUNS_HEADER.join(",")));
        let text = std::fs::read_to_string(dir.path().join("frontier.csv")).unwrap();
        assert_eq!(text, format!("{}\n", FRONTIER_HEADER.join(",")));
    }

    #[test]
    fn three_iteration_run() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("runs.csv");
        let r = run(Method::Newton, 0, 1e3, &[Status::Running, Status::Running, Status::Converged]);
        write_runs_csv("cavity", &[r], &path).unwrap();
        let rows = read_runs_csv(&path).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[2].status, "converged");
        assert_eq!(rows[1].grad_u, 1.0 / 7.0);
        assert_eq!(rows[2].bnorm_residual, 0.1f64.powi(2) / 3.0);
    }

    #[test]
    fn seventeen_significant_digits() {
        let s = fmt_f64(1.0 / 3.0);
        let mantissa = s.split('e').next().unwrap().replace(['.', '-'], "");
        assert_eq!(mantissa.len(), 17);
        for v in [1.0 / 3.0, 1e-300, 123456.789, f64::MAX, 0.0, -2.5e-17] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn frontier_parse_back() {
        let dir = tempfile::tempdir().unwrap();
        let c = Status::Converged;
        let d = Status::Diverged;
        let runs = vec![
            run(Method::Picard, 0, 1e3, &[Status::Running, c]),
            run(Method::Picard, 0, 1e4, &[Status::Running, Status::MaxIters]),
            run(Method::AaPicardNewton, 1, 1e3, &[c]),
            run(Method::AaPicardNewton, 1, 1e4, &[d]),
            run(Method::AaPicardNewton, 1, 1e5, &[Status::Running, c]),
            run(Method::AaPicardNewton, 3, 1e3, &[d]),
        ];
        let frontier = compute_frontier_for_test(&runs);
        let result = SweepResult { case: "cavity".into(), runs, frontier: frontier.clone() };
        write_csv(&result, dir.path()).unwrap();
        let rows = read_runs_csv(&dir.path().join("runs.csv")).unwrap();
        assert_eq!(frontier_from_rows(&rows).unwrap(), frontier);
        // non-monotone pattern is kept: m=1 converges at 1e5 despite failing at 1e4
        assert_eq!(result.frontier_of(SolverChoice::new(Method::AaPicardNewton, 1)), Some(1e5));
        assert_eq!(result.frontier_of(SolverChoice::new(Method::AaPicardNewton, 3)), None);
        let text = std::fs::read_to_string(dir.path().join("frontier.csv")).unwrap();
        assert!(text.contains("cavity,aa-picard-newton,3,\n"));
    }

    fn compute_frontier_for_test(runs: &[RunSummary]) -> Vec<FrontierEntry> {
        super::super::compute_frontier(runs)
    }
}
