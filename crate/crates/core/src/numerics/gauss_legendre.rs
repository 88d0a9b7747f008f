//! Gauss–Legendre rules on `[0, 1]`.
//!
//! A `k`-point rule integrates polynomials of degree `2k - 1` exactly. Rules
//! up to [`CACHED`] points are built on first use and shared.

use std::sync::OnceLock;

const CACHED: usize = 2048;

/// Nodes and weights of a rule on `[0, 1]`.
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

static TABLE: [OnceLock<Rule>; CACHED] = [const { OnceLock::new() }; CACHED];

/// The `k`-point rule (`k ≥ 1`).
pub fn rule(k: usize) -> std::borrow::Cow<'static, Rule> {
    let k = k.max(1);
    if k <= CACHED {
        std::borrow::Cow::Borrowed(TABLE[k - 1].get_or_init(|| build(k)))
    } else {
        std::borrow::Cow::Owned(build(k))
    }
}

/// Smallest rule exact for degree `degree`.
pub fn points_for_degree(degree: usize) -> usize {
    degree / 2 + 1
}

fn build(k: usize) -> Rule {
    let mut nodes = vec![0.0; k];
    let mut weights = vec![0.0; k];
    let n = k as f64;
    for i in 0..(k + 1) / 2 {
        // Tricomi initial guess, then Newton on P_k.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(k, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(k, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // Map [-1, 1] to [0, 1].
        nodes[i] = 0.5 * (1.0 - x);
        nodes[k - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[k - 1 - i] = 0.5 * w;
    }
    Rule { nodes, weights }
}

fn legendre(k: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if k == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=k {
        let j = j as f64;
        let p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
    }
    let d = k as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
