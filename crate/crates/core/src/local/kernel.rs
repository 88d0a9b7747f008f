//! Log-scale integral of a product of non-negative affine factors.
//!
//! Every posterior in this crate has the form
//! `∫_lo^hi z^p ∏_i (a_i + b_i z) dz` for some inner variable `z`. The
//! integrand is a polynomial of degree `m + p`, so a Gauss–Legendre rule
//! with `(m + p)/2 + 1` nodes is exact. Evaluating the product at the nodes
//! keeps every term non-negative, unlike summing the expanded coefficients,
//! whose signs alternate.

use crate::numerics::gauss_legendre::{points_for_degree, rule};

const LN_2: f64 = std::f64::consts::LN_2;
const TINY: f64 = 1e-250;

/// `ln ∫_lo^hi z^power ∏_{i<m} factor(i, z) dz`; `-∞` for an empty range or
/// a vanishing integrand. Factors are clamped at zero.
pub(crate) fn ln_product_integral<F>(m: usize, factor: F, lo: f64, hi: f64, power: u32) -> f64
where
    F: Fn(usize, f64) -> f64,
{
    if !(hi > lo) {
        return f64::NEG_INFINITY;
    }
    let width = hi - lo;
    let r = rule(points_for_degree(m + power as usize));
    let mut acc = ScaledSum::default();
    for (&t, &w) in r.nodes.iter().zip(&r.weights) {
        let z = lo + width * t;
        let mut p = w * z.powi(power as i32);
        let mut e: i32 = 0;
        for i in 0..m {
            let f = factor(i, z);
            if f <= 0.0 {
                p = 0.0;
                break;
            }
            p *= f;
            if p < TINY {
                let (frac, ex) = libm::frexp(p);
                p = frac;
                e += ex;
            }
        }
        acc.add(p, e);
    }
    acc.ln() + width.ln()
}

/// Sum of `mantissa · 2^exponent` terms without underflow.
#[derive(Default)]
struct ScaledSum {
    mant: f64,
    exp: i32,
}

impl ScaledSum {
    fn add(&mut self, m: f64, e: i32) {
        if m <= 0.0 {
            return;
        }
        if self.mant == 0.0 {
            self.mant = m;
            self.exp = e;
        } else if e > self.exp {
            self.mant = libm::ldexp(self.mant, self.exp - e) + m;
            self.exp = e;
        } else {
            self.mant += libm::ldexp(m, e - self.exp);
        }
    }

    fn ln(&self) -> f64 {
        if self.mant > 0.0 {
            self.mant.ln() + self.exp as f64 * LN_2
        } else {
            f64::NEG_INFINITY
        }
    }
}
