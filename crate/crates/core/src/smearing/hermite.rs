use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::oracle::SymTridiagonal;

/// Gauss-Hermite rule for `int exp(-t^2) f(t) dt`, nodes ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Cached rule with `n` nodes.
pub fn gauss_hermite_rule(n: usize) -> Arc<HermiteRule> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<HermiteRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(rule) = cache.lock().expect("rule cache").get(&n) {
        return Arc::clone(rule);
    }
    let rule = Arc::new(compute(n));
    cache.lock().expect("rule cache").insert(n, Arc::clone(&rule));
    rule
}

/// Nodes are the eigenvalues of the Jacobi matrix, polished by Newton steps
/// on the orthonormal Hermite recurrence, which also yields the weights.
fn compute(n: usize) -> HermiteRule {
    assert!(n >= 1);
    let jacobi = SymTridiagonal::new(vec![0.0; n], (1..n).map(|k| (0.5 * k as f64).sqrt()).collect());
    let mut nodes = jacobi.lowest_eigenvalues(n);
    let mut weights = vec![0.0; n];
    for (z, w) in nodes.iter_mut().zip(weights.iter_mut()) {
        for _ in 0..3 {
            let (p, dp) = orthonormal_hermite(n, *z);
            let step = p / dp;
            *z -= step;
            if step.abs() <= 1e-16 * z.abs().max(1.0) {
                break;
            }
        }
        let (_, dp) = orthonormal_hermite(n, *z);
        *w = 2.0 / (dp * dp);
    }
    // exact symmetry
    for i in 0..n / 2 {
        let z = 0.5 * (nodes[n - 1 - i] - nodes[i]);
        let w = 0.5 * (weights[i] + weights[n - 1 - i]);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    HermiteRule { nodes, weights }
}

/// Orthonormal Hermite polynomial of degree `n` at `z` and its derivative.
fn orthonormal_hermite(n: usize, z: f64) -> (f64, f64) {
    const PIM4: f64 = 0.751_125_544_464_942_5; // pi^{-1/4}
    let mut p1 = PIM4;
    let mut p2 = 0.0;
    for j in 0..n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
    }
    (p1, (2.0 * n as f64).sqrt() * p2)
}
