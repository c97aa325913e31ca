//! Anderson acceleration as a standalone tool: a slowly contracting linear
//! fixed-point map x ↦ Dx + 1 in R^20 with contraction factors up to 0.98.

use boussinesq::linsolve::{anderson_mix, AndersonHistory, Euclidean};

const DIM: usize = 20;

fn g(x: &[f64]) -> Vec<f64> {
    x.iter()
        .enumerate()
        .map(|(i, v)| (0.5 + 0.48 * i as f64 / (DIM - 1) as f64) * v + 1.0)
        .collect()
}

fn solve(depth: usize) -> usize {
    let mut hist = AndersonHistory::new(depth);
    let mut x = vec![0.0; DIM];
    for k in 1..=5000 {
        let gx = g(&x);
        let change = x.iter().zip(&gx).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        if change < 1e-12 {
            return k;
        }
        hist.push(x, gx);
        x = anderson_mix(&hist, &Euclidean).0;
    }
    5000
}

fn main() {
    for depth in [0, 1, 3, 5] {
        println!("depth {depth}: {} iterations to 1e-12", solve(depth));
    }
}
