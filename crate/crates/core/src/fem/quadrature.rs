//! Triangle quadrature on the reference element (0,0), (1,0), (0,1).
//!
//! Points are stored as barycentric coordinates; weights sum to the reference
//! area 1/2.

#[derive(Debug, Clone)]
pub struct TriangleRule {
    /// Barycentric coordinates (λ0, λ1, λ2) of each point.
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    /// Highest polynomial degree integrated exactly.
    pub degree: usize,
}

impl TriangleRule {
    /// Symmetric 7-point rule exact for degree 5 (Radon / Dunavant).
    pub fn degree5() -> Self {
        let sqrt15 = 15f64.sqrt();
        let a1 = (6.0 - sqrt15) / 21.0;
        let b1 = (9.0 + 2.0 * sqrt15) / 21.0;
        let a2 = (6.0 + sqrt15) / 21.0;
        let b2 = (9.0 - 2.0 * sqrt15) / 21.0;
        let w0 = 9.0 / 80.0;
        let w1 = (155.0 - sqrt15) / 2400.0;
        let w2 = (155.0 + sqrt15) / 2400.0;
        let third = 1.0 / 3.0;
        let points = vec![
            [third, third, third],
            [b1, a1, a1],
            [a1, b1, a1],
            [a1, a1, b1],
            [b2, a2, a2],
            [a2, b2, a2],
            [a2, a2, b2],
        ];
        let weights = vec![w0, w1, w1, w1, w2, w2, w2];
        Self {
            points,
            weights,
            degree: 5,
        }
    }

    /// Collapsed Gauss-Legendre product rule (Duffy transform) with `n`
    /// points per direction; exact for degree `2n - 2`.
    pub fn collapsed_gauss(n: usize) -> Self {
        let (xs, ws) = gauss_legendre(n);
        let mut points = Vec::with_capacity(n * n);
        let mut weights = Vec::with_capacity(n * n);
        for (i, &s) in xs.iter().enumerate() {
            // map [-1,1] -> [0,1]
            let u = 0.5 * (s + 1.0);
            for (j, &t) in xs.iter().enumerate() {
                let v = 0.5 * (t + 1.0);
                let x = u;
                let y = v * (1.0 - u);
                points.push([1.0 - x - y, x, y]);
                weights.push(0.25 * ws[i] * ws[j] * (1.0 - u));
            }
        }
        Self {
            points,
            weights,
            degree: 2 * n - 2,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1] via Newton on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let pk = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = pk;
            }
            // p1 = P_n(z), p0 = P_{n-1}(z)
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// ∫_ref x^a y^b = a! b! / (a+b+2)!
    fn monomial_exact(a: u32, b: u32) -> f64 {
        let fact = |k: u32| (1..=k).map(f64::from).product::<f64>();
        fact(a) * fact(b) / fact(a + b + 2)
    }

    fn integrate(rule: &TriangleRule, a: u32, b: u32) -> f64 {
        rule.points
            .iter()
            .zip(&rule.weights)
            .map(|(p, w)| w * p[1].powi(a as i32) * p[2].powi(b as i32))
            .sum()
    }

    #[test]
    fn degree5_exact_on_monomials() {
        let rule = TriangleRule::degree5();
        assert!((rule.weights.iter().sum::<f64>() - 0.5).abs() < 1e-15);
        for a in 0..=5 {
            for b in 0..=(5 - a) {
                let err = (integrate(&rule, a, b) - monomial_exact(a, b)).abs();
                assert!(err < 1e-15, "x^{a} y^{b}: {err}");
            }
        }
        // not exact at degree 6
        let miss = (integrate(&rule, 6, 0) - monomial_exact(6, 0)).abs();
        assert!(miss > 1e-8);
    }

    #[test]
    fn collapsed_gauss_exact() {
        let rule = TriangleRule::collapsed_gauss(6);
        for a in 0..=10 {
            for b in 0..=(10 - a) {
                let err = (integrate(&rule, a, b) - monomial_exact(a, b)).abs();
                assert!(err < 1e-15, "x^{a} y^{b}: {err}");
            }
        }
    }

    #[test]
    fn gauss_legendre_small() {
        let (x, w) = gauss_legendre(2);
        assert!((x[1] - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((w[0] - 1.0).abs() < 1e-15);
        let (x, w) = gauss_legendre(1);
        assert_eq!(x, vec![0.0]);
        assert!((w[0] - 2.0).abs() < 1e-15);
    }
}
