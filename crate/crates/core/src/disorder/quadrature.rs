use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Gauss–Hermite rule for the standard Gaussian: `E f(g) ≈ Σ_i w_i f(x_i)`.
///
/// Nodes come from Newton iteration on orthonormal Hermite functions (weight
/// `e^{−x²}`), then rescaled by `√2` with weights divided by `√π`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussHermite>>>> = OnceLock::new();

impl GaussHermite {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Hermite order must be positive");
        let (x, w) = physicists_rule(order);
        let nodes = x.iter().map(|x| x * std::f64::consts::SQRT_2).collect();
        let weights = w.iter().map(|w| w / std::f64::consts::PI.sqrt()).collect();
        GaussHermite { nodes, weights }
    }

    /// Shared rule for `order`, computed once per process.
    pub fn cached(order: usize) -> Arc<GaussHermite> {
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("quadrature cache poisoned");
        guard.entry(order).or_insert_with(|| Arc::new(GaussHermite::new(order))).clone()
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn expect<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(*x)).sum()
    }

    /// `E f(g1, g2)` for standard Gaussians with correlation `t`, using the
    /// product rule and `g2 = t·g1 + √(1−t²)·w`.
    pub fn expect_correlated<F: Fn(f64, f64) -> f64>(&self, t: f64, f: F) -> f64 {
        let s = (1.0 - t * t).max(0.0).sqrt();
        let mut acc = 0.0;
        for (x, wx) in self.nodes.iter().zip(&self.weights) {
            for (y, wy) in self.nodes.iter().zip(&self.weights) {
                acc += wx * wy * f(*x, t * x + s * y);
            }
        }
        acc
    }
}

fn physicists_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    const PIM4: f64 = 0.751_125_544_464_942_5;
    const EPS: f64 = 1e-15;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    let m = n.div_ceil(2);
    let mut z = 0.0f64;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-0.16667),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let (mut p1, mut p2) = (PIM4, 0.0f64);
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= EPS * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}
