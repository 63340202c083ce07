use crate::error::{Error, Result};

/// Gauss–Legendre rule mapped to `[0, 1]`, nodes ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Default for QuadratureRule {
    fn default() -> Self {
        Self::gauss_legendre(Self::DEFAULT_NODES).expect("default node count is valid")
    }
}

impl QuadratureRule {
    pub const DEFAULT_NODES: usize = 64;
    const MAX_NODES: usize = 4096;

    /// Nodes are roots of the Legendre polynomial `P_n`, found by Newton
    /// iteration from the Tricomi initial guess.
    pub fn gauss_legendre(node_count: usize) -> Result<Self> {
        if node_count == 0 || node_count > Self::MAX_NODES {
            return Err(Error::InvalidArgument(format!(
                "quadrature node count must be in 1..={}, got {node_count}",
                Self::MAX_NODES
            )));
        }
        let n = node_count;
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for i in 1..=n {
            let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            let mut derivative = 0.0;
            for _ in 0..100 {
                let (p, dp) = legendre_with_derivative(n, x);
                derivative = dp;
                let dx = p / dp;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(n, x);
            if dp.is_finite() {
                derivative = dp;
            }
            let w = 2.0 / ((1.0 - x * x) * derivative * derivative);
            nodes.push(0.5 * (1.0 + x));
            weights.push(0.5 * w);
        }
        // cos guesses run from +1 down to -1
        nodes.reverse();
        weights.reverse();
        Ok(Self { nodes, weights })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&u, &w)| w * f(u))
            .sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 2..=n {
        let kf = k as f64;
        let next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
        p_prev = p;
        p = next;
    }
    if n == 1 {
        p_prev = 1.0;
    }
    let dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}
