//! Benchmark cases, Rayleigh-number sweeps with their convergence
//! frontiers, manufactured-solution studies and CSV output.

mod cases;
mod csv_io;
mod mms;
mod sweep;

use thiserror::Error;

use crate::fem::FemError;
use crate::mesh::MeshError;

pub use cases::{
    cavity_bcs, complex_bcs, complex_cavity_case, file_cavity_case, heated_cavity_case, mms_bcs,
    mms_case, mms_ra, ra_from_ri, ri_from_ra, BenchmarkCase, ComplexSource, Manufactured,
    MeshRecipe, CAVITY_NOTE, COMPLEX_LENGTH, COMPLEX_NOTE, COMPLEX_NX, COMPLEX_NY, KAPPA, MMS_RI,
    NU,
};
pub use csv_io::{
    fmt_f64, frontier_from_rows, read_runs_csv, write_csv, write_frontier_csv, write_runs_csv,
    RunRow, FRONTIER_HEADER, RUNS_HEADER,
};
pub use mms::{fit_order, mms_study, MmsLevel, MmsOrders, MmsReport};
pub use sweep::{
    compute_frontier, refine_frontier, run_case, sweep, FrontierEntry, RunSummary, SolverChoice,
    SweepResult,
};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    NotConverged(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Csv { path: String, message: String },
}

/// Geometric grid `start, start·ratio, …` with `count` entries.
pub fn geometric_grid(start: f64, ratio: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| start * ratio.powi(k as i32)).collect()
}
