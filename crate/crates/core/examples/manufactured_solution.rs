//! Convergence study against the smooth manufactured solution.
//!
//!     cargo run --release --example manufactured_solution

use boussinesq::bench::mms_study;
use boussinesq::solvers::{Method, SolverConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let report = mms_study(&[4, 8, 16], &SolverConfig::new(Method::Newton))?;
    println!("{:>4} {:>11} {:>11} {:>11} {:>11} {:>11} {:>9}", "n", "u H1", "u L2", "T H1", "T L2", "p L2", "div");
    for l in &report.levels {
        let e = &l.errors;
        println!(
            "{:>4} {:>11.3e} {:>11.3e} {:>11.3e} {:>11.3e} {:>11.3e} {:>9.1e}",
            l.n, e.velocity_h1, e.velocity_l2, e.temperature_h1, e.temperature_l2, e.pressure_l2, l.divergence
        );
    }
    let o = report.orders;
    println!(
        "orders {:>11.2} {:>11.2} {:>11.2} {:>11.2} {:>11.2}",
        o.velocity_h1, o.velocity_l2, o.temperature_h1, o.temperature_l2, o.pressure_l2
    );
    Ok(())
}
