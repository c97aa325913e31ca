/// Least-squares fit of `log r_{k+1} = slope · log r_k + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderEstimate {
    pub slope: f64,
    pub intercept: f64,
    /// Geometric mean of r_{k+1}/r_k over the fitted pairs.
    pub mean_ratio: f64,
    pub pairs: usize,
}

const MIN_USABLE: usize = 4;

/// Convergence order from the last `window` residuals. Residuals at or
/// below 100·ε (or non-finite) are discarded; fewer than four usable
/// residuals give `None`.
pub fn estimate_order(residuals: &[f64], window: usize) -> Option<OrderEstimate> {
    let start = residuals.len().saturating_sub(window);
    let floor = 100.0 * f64::EPSILON;
    let usable = |r: f64| r.is_finite() && r > floor;
    let tail = &residuals[start..];
    if tail.iter().filter(|&&r| usable(r)).count() < MIN_USABLE {
        return None;
    }
    let pts: Vec<(f64, f64)> = tail
        .windows(2)
        .filter(|w| usable(w[0]) && usable(w[1]))
        .map(|w| (w[0].ln(), w[1].ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if !(sxx > 0.0) {
        return None;
    }
    let slope = sxy / sxx;
    Some(OrderEstimate {
        slope,
        intercept: my - slope * mx,
        mean_ratio: (my - mx).exp(),
        pairs: pts.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_sequence() {
        let r: Vec<f64> = (0..5).map(|k| 10f64.powi(-(1 << k))).collect();
        let e = estimate_order(&r, 10).unwrap();
        assert!((e.slope - 2.0).abs() < 0.01);
        // 1e-16 is below the floor and is dropped
        assert_eq!(e.pairs, 3);
    }

    #[test]
    fn linear_sequence() {
        let r: Vec<f64> = (0..12).map(|k| 0.5f64.powi(k)).collect();
        let e = estimate_order(&r, 6).unwrap();
        assert!((e.slope - 1.0).abs() < 0.01);
        assert!((e.mean_ratio - 0.5).abs() < 1e-12);
        assert_eq!(e.pairs, 5);
    }

    #[test]
    fn too_few_usable_residuals() {
        assert!(estimate_order(&[1e-1, 1e-2, 1e-4], 10).is_none());
        assert!(estimate_order(&[1e-1, 1e-2, 1e-20, 1e-30, 1e-40], 10).is_none());
        assert!(estimate_order(&[1.0, 1.0, 1.0, 1.0], 4).is_none());
    }
}
