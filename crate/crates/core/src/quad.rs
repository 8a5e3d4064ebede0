//! Gauss–Legendre nodes and weights, computed by Newton iteration on the
//! Legendre recurrence. Exact for polynomials of degree ≤ 2n−1.

use std::f64::consts::PI;

/// A Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "quadrature order must be positive");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let (_, dp) = legendre(n, x);
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped to [a, b].
    pub fn scaled(&self, a: f64, b: f64) -> Vec<(f64, f64)> {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| (mid + half * x, half * w))
            .collect()
    }
}

/// P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0f64;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn integrates_polynomials_exactly() {
        let rule = GaussLegendre::new(8);
        // Degree-15 polynomial: x^15 over [0, 1] integrates to 1/16.
        let got: f64 = rule.scaled(0.0, 1.0).iter().map(|(x, w)| w * x.powi(15)).sum();
        assert_relative_eq!(got, 1.0 / 16.0, max_relative = 1e-13);
    }

    #[test]
    fn integrates_smooth_transcendental() {
        let rule = GaussLegendre::new(32);
        let got: f64 = rule.scaled(0.0, PI).iter().map(|(x, w)| w * x.sin()).sum();
        assert_relative_eq!(got, 2.0, max_relative = 1e-13);
    }

    #[test]
    fn weights_sum_to_interval_length() {
        for n in [1usize, 2, 5, 48, 64, 128] {
            let rule = GaussLegendre::new(n);
            let total: f64 = rule.scaled(-3.0, 7.0).iter().map(|(_, w)| w).sum();
            assert_relative_eq!(total, 10.0, max_relative = 1e-12);
        }
    }
}
