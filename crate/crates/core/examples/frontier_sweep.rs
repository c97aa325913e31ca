//! Coarse Rayleigh sweep with the resulting convergence frontier, written
//! as runs.csv and frontier.csv.
//!
//!     cargo run --release --example frontier_sweep -- [out_dir]

use std::path::PathBuf;

use boussinesq::bench::{geometric_grid, heated_cavity_case, sweep, write_csv, SolverChoice};
use boussinesq::solvers::{Method, SolverConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out/frontier_sweep".into()));
    // n=8 keeps this to about a minute
    let case = heated_cavity_case(8, true)?;
    let choices = SolverChoice::expand(&Method::ALL, &[1]);
    let grid = geometric_grid(2.5e3, 4.0, 5);
    let jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
    let result = sweep(&case, &choices, &grid, &SolverConfig::new(Method::Picard), jobs)?;
    for run in &result.runs {
        println!(
            "{:<18} m={} Ra={:<9} {} ({} iterations)",
            run.choice.method.name(),
            run.choice.depth,
            run.ra,
            run.status(),
            run.history.iterations()
        );
    }
    for f in &result.frontier {
        let ra = f.max_ra_converged.map_or("none".into(), |r| format!("{r}"));
        println!("frontier {:<18} m={}: {ra}", f.choice.method.name(), f.choice.depth);
    }
    write_csv(&result, &out)?;
    println!("wrote {}", out.display());
    Ok(())
}
