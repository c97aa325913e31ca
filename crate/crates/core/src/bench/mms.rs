use serde::Serialize;

use crate::fem::FieldErrors;
use crate::solvers::{iterate, IterationHistory, Method, SolverConfig, Status};

use super::{mms_case, mms_ra, BenchError};

#[derive(Debug, Clone, Serialize)]
pub struct MmsLevel {
    pub n: usize,
    /// Grid spacing 1/n of the mesh before barycentric refinement.
    pub h: f64,
    pub iterations: usize,
    pub status: Status,
    pub errors: FieldErrors,
    pub divergence: f64,
    #[serde(skip)]
    pub history: IterationHistory,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MmsOrders {
    pub velocity_h1: f64,
    pub velocity_l2: f64,
    pub temperature_h1: f64,
    pub temperature_l2: f64,
    pub pressure_l2: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MmsReport {
    pub levels: Vec<MmsLevel>,
    pub orders: MmsOrders,
}

/// Least-squares slope of log e against log h.
pub fn fit_order(h: &[f64], e: &[f64]) -> f64 {
    assert_eq!(h.len(), e.len());
    assert!(h.len() >= 2);
    let m = h.len() as f64;
    let xs: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = e.iter().map(|v| v.ln()).collect();
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Solves the manufactured problem on each level and fits observed orders.
/// Newton is used since the data are small and it converges in a few steps.
pub fn mms_study(levels: &[usize], config: &SolverConfig) -> Result<MmsReport, BenchError> {
    if levels.len() < 2 {
        return Err(BenchError::Invalid("a convergence study needs at least two levels".into()));
    }
    let mut out = Vec::with_capacity(levels.len());
    for &n in levels {
        let case = mms_case(n)?;
        let disc = case.discretization(mms_ra());
        let cfg = SolverConfig {
            method: Method::Newton,
            ..*config
        };
        let run = iterate(&disc, &cfg);
        if run.status() != Status::Converged {
            return Err(BenchError::NotConverged(format!(
                "manufactured solve on n = {n} ended with status {}",
                run.status()
            )));
        }
        let exact = case.exact().expect("manufactured case has an exact solution");
        out.push(MmsLevel {
            n,
            h: 1.0 / n as f64,
            iterations: run.history.iterations(),
            status: run.status(),
            errors: case.space().errors_against(&run.state, exact),
            divergence: case.space().divergence_norm(&run.state.u),
            history: run.history,
        });
    }
    let h: Vec<f64> = out.iter().map(|l| l.h).collect();
    let order = |f: fn(&FieldErrors) -> f64| {
        let e: Vec<f64> = out.iter().map(|l| f(&l.errors)).collect();
        fit_order(&h, &e)
    };
    let orders = MmsOrders {
        velocity_h1: order(|e| e.velocity_h1),
        velocity_l2: order(|e| e.velocity_l2),
        temperature_h1: order(|e| e.temperature_h1),
        temperature_l2: order(|e| e.temperature_l2),
        pressure_l2: order(|e| e.pressure_l2),
    };
    Ok(MmsReport { levels: out, orders })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_of_exact_power_law() {
        let h = [0.5, 0.25, 0.125];
        let e: Vec<f64> = h.iter().map(|v: &f64| 3.0 * v.powi(3)).collect();
        assert!((fit_order(&h, &e) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn coarse_study_runs() {
        let r = mms_study(&[2, 4], &SolverConfig::new(Method::Newton)).unwrap();
        assert_eq!(r.levels.len(), 2);
        assert!(r.levels.iter().all(|l| l.divergence < 1e-9));
        assert!(r.orders.velocity_h1 > 1.0);
        assert!(mms_study(&[4], &SolverConfig::new(Method::Newton)).is_err());
    }
}
