//! Gauss–Legendre rules on [-1, 1] and straight-segment complex integration.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;

/// Nodes and weights of an n-point Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the rule by Newton iteration on P_n from Chebyshev initial guesses.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    let (_, d) = legendre_with_derivative(n, x);
                    dp = d;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Shared, lazily built rule for `n` nodes.
    pub fn cached(n: usize) -> Arc<GaussLegendre> {
        static CACHE: OnceLock<RwLock<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
        if let Some(rule) = cache.read().expect("quadrature cache poisoned").get(&n) {
            return Arc::clone(rule);
        }
        let rule = Arc::new(GaussLegendre::new(n));
        cache
            .write()
            .expect("quadrature cache poisoned")
            .entry(n)
            .or_insert(rule)
            .clone()
    }

    /// ∫_a^b f(ζ) dζ along the straight segment from `a` to `b`.
    pub fn integrate_segment<E, F>(&self, a: Complex64, b: Complex64, mut f: F) -> Result<Complex64, E>
    where
        F: FnMut(Complex64) -> Result<Complex64, E>,
    {
        let half = (b - a) * 0.5;
        let mid = (a + b) * 0.5;
        let mut acc = Complex64::new(0.0, 0.0);
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc += f(mid + half * x)? * w;
        }
        Ok(acc * half)
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        for n in [2, 3, 7, 16, 64, 128] {
            let rule = GaussLegendre::new(n);
            let s: f64 = rule.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n = {n}: {s}");
        }
    }

    #[test]
    fn exact_for_degree_2n_minus_1() {
        let rule = GaussLegendre::new(5);
        // ∫_{-1}^{1} x^8 = 2/9
        let s: f64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(x, w)| w * x.powi(8))
            .sum();
        assert!((s - 2.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn nodes_are_symmetric_and_sorted() {
        let rule = GaussLegendre::new(64);
        for i in 0..64 {
            assert_eq!(rule.nodes[i], -rule.nodes[63 - i]);
        }
        assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
    }
}
