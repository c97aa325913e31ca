//! Differentially heated cavity solved with Picard-Newton.
//!
//!     cargo run --release --example heated_cavity -- [n] [Ra]

use boussinesq::bench::heated_cavity_case;
use boussinesq::solvers::{estimate_order, iterate, Method, SolverConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(Ok(16), |s| s.parse())?;
    let ra: f64 = args.next().map_or(Ok(1e5), |s| s.parse())?;

    let case = heated_cavity_case(n, true)?;
    let dofs = case.space().dofs();
    println!(
        "cavity n={n}: {} velocity, {} pressure, {} temperature dofs",
        dofs.n_velocity(),
        dofs.n_pressure(),
        dofs.n_temperature()
    );

    let disc = case.discretization(ra);
    let out = iterate(&disc, &SolverConfig::new(Method::PicardNewton));
    for r in &out.history.records {
        println!(
            "{:3}  residual {:.3e}  |grad u| {:.3e}  |grad T| {:.3e}",
            r.iteration, r.residual, r.grad_u, r.grad_t
        );
    }
    println!("status {} after {} iterations", out.status(), out.history.iterations());
    if let Some(e) = estimate_order(&out.history.residuals(), 4) {
        println!("observed order {:.2}", e.slope);
    }
    println!("|div u| = {:.2e}", case.space().divergence_norm(&out.state.u));
    Ok(())
}
