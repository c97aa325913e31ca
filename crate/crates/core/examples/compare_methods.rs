//! All four iterations on the same cavity problem.
//!
//!     cargo run --release --example compare_methods -- [Ra]

use boussinesq::bench::{heated_cavity_case, run_case, SolverChoice};
use boussinesq::solvers::{estimate_order, Method, SolverConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ra: f64 = std::env::args().nth(1).map_or(Ok(1e4), |s| s.parse())?;
    let case = heated_cavity_case(16, true)?;
    println!("{:<18} {:>10} {:>6} {:>12} {:>8}", "method", "status", "iters", "residual", "order");
    for method in Method::ALL {
        let depth = if method == Method::AaPicardNewton { 1 } else { 0 };
        let choice = SolverChoice::new(method, depth);
        let run = run_case(&case, choice, ra, &SolverConfig::new(method));
        let residuals = run.history.residuals();
        // a linear rate needs a longer window than a quadratic one
        let window = if method == Method::Picard { 10 } else { 4 };
        let order = estimate_order(&residuals, window).map_or("-".into(), |e| format!("{:.2}", e.slope));
        println!(
            "{:<18} {:>10} {:>6} {:>12.3e} {:>8}",
            method.name(),
            run.status().name(),
            run.history.iterations(),
            run.history.final_residual().unwrap_or(f64::NAN),
            order
        );
    }
    Ok(())
}
