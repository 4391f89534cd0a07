use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Gauss–Legendre rule on `(0, 1)` with nodes in increasing order.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureSet {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureSet {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }
}

/// Legendre polynomial `P_n(x)` and its derivative by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    let dp = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// `n`-point Gauss–Legendre rule mapped from `(-1, 1)` onto `(0, 1)`.
///
/// Roots are found by Newton iteration from Chebyshev-like initial guesses.
pub fn gauss_legendre(n: usize) -> Result<QuadratureSet> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "Gauss-Legendre order must be at least 1".into(),
        ));
    }
    if n == 1 {
        return Ok(QuadratureSet {
            nodes: vec![0.5],
            weights: vec![1.0],
        });
    }

    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = (n + 1) / 2;
    for i in 0..half {
        // i-th largest root on (-1, 1)
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-15 * x.abs().max(1e-300) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // x > 0 maps above 1/2; mirror image below
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        nodes[i] = 0.5 * (1.0 - x);
        weights[n - 1 - i] = 0.5 * w;
        weights[i] = 0.5 * w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.5;
    }
    Ok(QuadratureSet { nodes, weights })
}
