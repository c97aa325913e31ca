use rayon::prelude::*;

use crate::solvers::{iterate, IterationHistory, Method, SolverConfig, Status};

use super::{BenchError, BenchmarkCase};

/// One solver configuration of a sweep. `depth` only matters for
/// Anderson-accelerated runs and is recorded as 0 otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SolverChoice {
    pub method: Method,
    pub depth: usize,
}

impl SolverChoice {
    pub fn new(method: Method, depth: usize) -> Self {
        let depth = if method == Method::AaPicardNewton { depth } else { 0 };
        Self { method, depth }
    }

    /// Every method, with Anderson runs at each of `depths`.
    pub fn expand(methods: &[Method], depths: &[usize]) -> Vec<Self> {
        let mut out = Vec::new();
        for &m in methods {
            if m == Method::AaPicardNewton {
                out.extend(depths.iter().map(|&d| Self::new(m, d)));
            } else {
                out.push(Self::new(m, 0));
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub choice: SolverChoice,
    pub ra: f64,
    pub history: IterationHistory,
    /// ‖∇·u‖ of the final iterate.
    pub divergence: f64,
}

impl RunSummary {
    pub fn status(&self) -> Status {
        self.history.status()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrontierEntry {
    pub choice: SolverChoice,
    /// Largest tested Ra that converged, if any did.
    pub max_ra_converged: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub case: String,
    pub runs: Vec<RunSummary>,
    pub frontier: Vec<FrontierEntry>,
}

impl SweepResult {
    pub fn frontier_of(&self, choice: SolverChoice) -> Option<f64> {
        self.frontier
            .iter()
            .find(|f| f.choice == choice)
            .and_then(|f| f.max_ra_converged)
    }

    pub fn run(&self, choice: SolverChoice, ra: f64) -> Option<&RunSummary> {
        self.runs.iter().find(|r| r.choice == choice && r.ra == ra)
    }
}

/// Runs a single configuration of a case at one Rayleigh number.
pub fn run_case(case: &BenchmarkCase, choice: SolverChoice, ra: f64, base: &SolverConfig) -> RunSummary {
    let disc = case.discretization(ra);
    let config = SolverConfig {
        method: choice.method,
        depth: choice.depth,
        ..*base
    };
    let out = iterate(&disc, &config);
    RunSummary {
        choice,
        ra,
        divergence: case.space().divergence_norm(&out.state.u),
        history: out.history,
    }
}

/// Largest converged Ra per solver choice, sorted by choice. Gaps are kept
/// as measured: a failure below a converged Ra does not lower the frontier.
pub fn compute_frontier(runs: &[RunSummary]) -> Vec<FrontierEntry> {
    let mut choices: Vec<SolverChoice> = runs.iter().map(|r| r.choice).collect();
    choices.sort();
    choices.dedup();
    choices
        .into_iter()
        .map(|choice| FrontierEntry {
            choice,
            max_ra_converged: runs
                .iter()
                .filter(|r| r.choice == choice && r.status() == Status::Converged)
                .map(|r| r.ra)
                .fold(None, |acc: Option<f64>, ra| Some(acc.map_or(ra, |a| a.max(ra)))),
        })
        .collect()
}

fn check_ra_list(ra_list: &[f64]) -> Result<(), BenchError> {
    if ra_list.is_empty() {
        return Err(BenchError::Invalid("Ra list is empty".into()));
    }
    if let Some(bad) = ra_list.iter().find(|r| !(r.is_finite() && **r >= 0.0)) {
        return Err(BenchError::Invalid(format!("Ra must be finite and >= 0, got {bad}")));
    }
    if ra_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(BenchError::Invalid("Ra list must be strictly ascending".into()));
    }
    Ok(())
}

/// Runs every (choice, Ra) combination on a pool of `jobs` threads. Results
/// are sorted by (method, depth, Ra), so the output does not depend on the
/// scheduling.
pub fn sweep(
    case: &BenchmarkCase,
    choices: &[SolverChoice],
    ra_list: &[f64],
    base: &SolverConfig,
    jobs: usize,
) -> Result<SweepResult, BenchError> {
    check_ra_list(ra_list)?;
    base.validate().map_err(BenchError::Invalid)?;
    let tasks: Vec<(SolverChoice, f64)> = choices
        .iter()
        .flat_map(|&c| ra_list.iter().map(move |&ra| (c, ra)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| BenchError::Invalid(format!("thread pool: {e}")))?;
    let mut runs: Vec<RunSummary> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(c, ra)| run_case(case, c, ra, base))
            .collect()
    });
    runs.sort_by(|a, b| a.choice.cmp(&b.choice).then(a.ra.total_cmp(&b.ra)));
    let frontier = compute_frontier(&runs);
    Ok(SweepResult {
        case: case.name.clone(),
        runs,
        frontier,
    })
}

/// Bisects between a converged Ra and a failed Ra down to `quantum`,
/// returning the largest Ra found to converge (a multiple of `quantum`
/// unless it is `converged` itself).
pub fn refine_frontier(
    case: &BenchmarkCase,
    choice: SolverChoice,
    base: &SolverConfig,
    mut converged: f64,
    mut failed: f64,
    quantum: f64,
) -> f64 {
    assert!(quantum > 0.0 && converged < failed);
    loop {
        let mid = ((converged + failed) / 2.0 / quantum).round() * quantum;
        if mid <= converged || mid >= failed {
            return converged;
        }
        if run_case(case, choice, mid, base).status() == Status::Converged {
            converged = mid;
        } else {
            failed = mid;
        }
    }
}
