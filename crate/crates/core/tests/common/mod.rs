#![allow(dead_code)]

pub mod oracle;

use bsa::local::{LocalPosterior, Observation, PriorBounds, Subinterval};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use oracle::Config;

/// Random slice, bounds and data with `m ≤ max_m` members.
pub fn random_config(rng: &mut ChaCha8Rng, max_m: usize) -> Config {
    let s: u32 = rng.random_range(1..=20);
    let t: u32 = rng.random_range(1..=s);
    let alpha: f64 = rng.random_range(0.05..0.95);
    let rho_l = if rng.random_bool(0.5) { 0.0 } else { rng.random_range(0.0..alpha * 0.9) };
    let rho_u = if rng.random_bool(0.5) { 1.0 } else { rng.random_range(alpha + (1.0 - alpha) * 0.1..1.0) };
    let m = rng.random_range(0..=max_m);
    let (v0, v1) = ((t - 1) as f64 / s as f64, t as f64 / s as f64);
    let data = (0..m)
        .map(|_| {
            let x = v0 + (v1 - v0) * rng.random_range(0.02..0.98);
            (x, u8::from(rng.random_bool(alpha)))
        })
        .collect();
    Config { s, t, alpha, rho_l, rho_u, data }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn to_model(c: &Config) -> LocalPosterior {
    LocalPosterior::new(
        Subinterval::new(c.s, c.t).unwrap(),
        PriorBounds::new(c.rho_l, c.rho_u, c.alpha).unwrap(),
        c.data.iter().map(|&(x, y)| Observation::new(x, y).unwrap()).collect(),
    )
    .unwrap()
}

pub fn sup_norm(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
