//! Brute-force reference computations, written directly from the model
//! definition (uniform prior on the ordered slice-end values times the
//! Bernoulli likelihood) with composite Simpson rules. Nothing here calls
//! into the library's posterior code.

#![allow(dead_code)]

/// A configuration in plain numbers.
#[derive(Debug, Clone)]
pub struct Config {
    pub s: u32,
    pub t: u32,
    pub alpha: f64,
    pub rho_l: f64,
    pub rho_u: f64,
    pub data: Vec<(f64, u8)>,
}

impl Config {
    pub fn v0(&self) -> f64 {
        (self.t - 1) as f64 / self.s as f64
    }
    pub fn v1(&self) -> f64 {
        self.t as f64 / self.s as f64
    }
    pub fn theta0(&self) -> f64 {
        ((self.rho_u - self.alpha) * self.v0() + (self.alpha - self.rho_l) * self.v1())
            / (self.rho_u - self.rho_l)
    }
}

pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    let n = if n % 2 == 1 { n + 1 } else { n };
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + h * i as f64);
    }
    acc * h / 3.0
}

fn bernoulli_lik(p: f64, y: u8) -> f64 {
    if y == 1 {
        p
    } else {
        1.0 - p
    }
}

/// Joint (θ, β̃) prior × likelihood, unnormalized. The prior indicator is
/// checked through the slice-end values themselves.
pub fn joint_theta_beta(c: &Config, theta: f64, beta: f64) -> f64 {
    let s = c.s as f64;
    let f = |x: f64| c.alpha + s * beta * (x - theta);
    let r0 = f(c.v0());
    let r1 = f(c.v1());
    if !(beta > 0.0 && c.rho_l < r0 && r0 < r1 && r1 < c.rho_u) {
        return 0.0;
    }
    let mut v = beta;
    for &(x, y) in &c.data {
        v *= bernoulli_lik(f(x), y);
    }
    v
}

/// Largest β̃ allowed at θ, found from the prior constraints.
fn beta_limit(c: &Config, theta: f64) -> f64 {
    let s = c.s as f64;
    let up = if c.v1() > theta { (c.rho_u - c.alpha) / (s * (c.v1() - theta)) } else { f64::INFINITY };
    let dn = if theta > c.v0() { (c.alpha - c.rho_l) / (s * (theta - c.v0())) } else { f64::INFINITY };
    up.min(dn)
}

const INNER: usize = 600;
const OUTER: usize = 3000;

/// Simpson over the open interval: the density is defined on an open set
/// and the indicator is false on its closure.
fn open_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let eps = 1e-12 * (b - a);
    simpson(f, a + eps, b - eps, n)
}

fn normalized<F: Fn(f64) -> f64>(f: F, pieces: &[f64], points: &[f64]) -> Vec<f64> {
    let z: f64 = pieces.windows(2).map(|w| open_simpson(&f, w[0], w[1], OUTER)).sum();
    points.iter().map(|&x| f(x) / z).collect()
}

/// Posterior density of θ on (0,1) at `points`.
pub fn theta_pdf(c: &Config, points: &[f64]) -> Vec<f64> {
    let f = |theta: f64| {
        let lim = beta_limit(c, theta);
        open_simpson(|b| joint_theta_beta(c, theta, b), 0.0, lim, INNER)
    };
    normalized(f, &[0.0, c.v0().max(0.0), c.theta0(), c.v1(), 1.0], points)
}

/// Posterior mean of θ.
pub fn theta_mean(c: &Config) -> f64 {
    let f = |theta: f64| {
        let lim = beta_limit(c, theta);
        open_simpson(|b| joint_theta_beta(c, theta, b), 0.0, lim, INNER)
    };
    let pieces = [0.0, c.v0(), c.theta0(), c.v1(), 1.0];
    let z: f64 = pieces.windows(2).map(|w| simpson(&f, w[0], w[1], OUTER)).sum();
    let m: f64 = pieces.windows(2).map(|w| simpson(|t| t * f(t), w[0], w[1], OUTER)).sum();
    m / z
}

/// Posterior CDF of θ at `x`.
pub fn theta_cdf(c: &Config, x: f64) -> f64 {
    let f = |theta: f64| {
        let lim = beta_limit(c, theta);
        open_simpson(|b| joint_theta_beta(c, theta, b), 0.0, lim, INNER)
    };
    let pieces = [0.0, c.v0(), c.theta0(), c.v1(), 1.0];
    let z: f64 = pieces.windows(2).map(|w| simpson(&f, w[0], w[1], OUTER)).sum();
    let below: f64 = pieces
        .windows(2)
        .map(|w| simpson(&f, w[0].min(x), w[1].min(x), OUTER))
        .sum();
    below / z
}

/// Prior × likelihood in the slice-end parametrization.
pub fn joint_rho(c: &Config, r0: f64, r1: f64) -> f64 {
    if !(c.rho_l < r0 && r0 < r1 && r1 < c.rho_u) {
        return 0.0;
    }
    let mut v = 1.0;
    for &(x, y) in &c.data {
        let q = (c.v1() - x) / (c.v1() - c.v0());
        v *= bernoulli_lik(q * r0 + (1.0 - q) * r1, y);
    }
    v
}

fn inside(c: &Config, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    // Integrate strictly inside the open triangle edge.
    let eps = 1e-13 * (c.rho_u - c.rho_l);
    simpson(f, a + eps, b - eps, INNER)
}

pub fn rho0_pdf(c: &Config, points: &[f64]) -> Vec<f64> {
    let f = |r0: f64| inside(c, r0, c.rho_u, |r1| joint_rho(c, r0, r1));
    normalized(f, &[c.rho_l, c.rho_u], points)
}

pub fn rho1_pdf(c: &Config, points: &[f64]) -> Vec<f64> {
    let f = |r1: f64| inside(c, c.rho_l, r1, |r0| joint_rho(c, r0, r1));
    normalized(f, &[c.rho_l, c.rho_u], points)
}

pub fn rho_means(c: &Config) -> (f64, f64) {
    let f0 = |r0: f64| inside(c, r0, c.rho_u, |r1| joint_rho(c, r0, r1));
    let f1 = |r1: f64| inside(c, c.rho_l, r1, |r0| joint_rho(c, r0, r1));
    let z0 = open_simpson(f0, c.rho_l, c.rho_u, OUTER);
    let z1 = open_simpson(f1, c.rho_l, c.rho_u, OUTER);
    (
        open_simpson(|r| r * f0(r), c.rho_l, c.rho_u, OUTER) / z0,
        open_simpson(|r| r * f1(r), c.rho_l, c.rho_u, OUTER) / z1,
    )
}

/// Support of β̃ after restricting θ to (0,1) for every β̃.
pub fn beta_support(c: &Config) -> (f64, f64) {
    let s = c.s as f64;
    let lo = ((c.rho_u - c.alpha) / (s * c.v1())).max((c.alpha - c.rho_l) / (s * (1.0 - c.v0())));
    (lo, c.rho_u - c.rho_l)
}

pub fn beta_pdf(c: &Config, points: &[f64]) -> Vec<f64> {
    let s = c.s as f64;
    let f = |b: f64| {
        let l = c.v1() - (c.rho_u - c.alpha) / (s * b);
        let u = c.v0() + (c.alpha - c.rho_l) / (s * b);
        let eps = 1e-13;
        simpson(|t| joint_theta_beta(c, t, b), l + eps, u - eps, INNER)
    };
    let (lo, hi) = beta_support(c);
    normalized(f, &[lo, hi], points)
}

/// Expanded coefficient sum over all subsets, for the recursion check.
pub fn d_bruteforce(pairs: &[(f64, f64)]) -> Vec<f64> {
    let m = pairs.len();
    let mut d = vec![0.0; m + 1];
    for mask in 0u32..(1u32 << m) {
        let mut prod = 1.0;
        for (i, &(a, b)) in pairs.iter().enumerate() {
            prod *= if mask & (1 << i) != 0 { b } else { a };
        }
        d[mask.count_ones() as usize] += prod;
    }
    d
}

/// Evaluation points strictly inside `(lo, hi)`.
pub fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * (i as f64 + 0.5) / n as f64).collect()
}
