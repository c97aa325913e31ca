//! The long 7×1 cavity heated from below with a linear wall profile, or any
//! mesh file using the same boundary tags.
//!
//!     cargo run --release --example complex_domain -- [Ra] [mesh.txt]

use boussinesq::bench::{complex_cavity_case, run_case, ComplexSource, SolverChoice};
use boussinesq::solvers::{Method, SolverConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let ra: f64 = args.next().map_or(Ok(5e3), |s| s.parse())?;
    let source = match args.next() {
        Some(path) => ComplexSource::File { path: path.into(), refine: true },
        None => ComplexSource::Builtin { nx: 28, ny: 4, refine: true },
    };
    let case = complex_cavity_case(source)?;
    println!("{}", case.note);
    let stats = case.mesh().stats();
    println!("{} triangles, area {:.6}", stats.triangles, stats.area);
    for (method, depth) in [(Method::PicardNewton, 0), (Method::AaPicardNewton, 1)] {
        let cfg = SolverConfig::new(method).with_depth(depth);
        let run = run_case(&case, SolverChoice::new(method, depth), ra, &cfg);
        println!(
            "{} m={depth}: {} after {} iterations, |div u| {:.1e}",
            method.name(),
            run.status(),
            run.history.iterations(),
            run.divergence
        );
    }
    Ok(())
}
