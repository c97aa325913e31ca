//! Effect of the Anderson depth on AA-Picard-Newton at a high Rayleigh
//! number. Depth 0 is plain Picard-Newton.
//!
//!     cargo run --release --example anderson_depth -- [Ra]

use boussinesq::bench::{heated_cavity_case, run_case, SolverChoice};
use boussinesq::solvers::{Method, SolverConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ra: f64 = std::env::args().nth(1).map_or(Ok(3.2e5), |s| s.parse())?;
    let case = heated_cavity_case(16, true)?;
    let method = Method::AaPicardNewton;
    for depth in [0, 1, 2, 3] {
        let cfg = SolverConfig::new(method).with_depth(depth);
        let run = run_case(&case, SolverChoice::new(method, depth), ra, &cfg);
        let peak = run.history.records.iter().map(|r| r.grad_u).fold(0.0, f64::max);
        println!(
            "m={depth}: {} after {} iterations, max |grad u| {peak:.3e}",
            run.status(),
            run.history.iterations()
        );
    }
    Ok(())
}
