//! Posterior curves that are polynomials in a chart variable.
//!
//! After the substitution `t = 1/(v1 − θ)` left of `θ0` (and
//! `t = 1/(θ − v0)` right of it) the density of `θ` times `dθ/dt` is a
//! polynomial in `t` of degree `m`; the marginal densities of `ρ0` and `ρ1`
//! are polynomials of degree `m + 1` in their own variable. Each piece is
//! held by its values at Chebyshev–Lobatto points and evaluated by
//! barycentric interpolation, so normalization, distribution function and
//! mean are exact Gauss–Legendre sums rather than adaptive quadrature.

use crate::error::{Error, Result};
use crate::numerics::gauss_legendre::{points_for_degree, rule};
use crate::numerics::optimize::scan_maximize;

use super::curve::{Curve1d, DEFAULT_MODE_SCAN, KINK_TIE};

/// Map between the curve variable `x` and the polynomial variable `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Chart {
    /// `x = t`.
    Linear,
    /// `x = v − 1/t`, increasing in `t`.
    BelowPole { v: f64 },
    /// `x = v + 1/t`, decreasing in `t`.
    AbovePole { v: f64 },
}

impl Chart {
    fn t(&self, x: f64) -> f64 {
        match *self {
            Chart::Linear => x,
            Chart::BelowPole { v } => 1.0 / (v - x),
            Chart::AbovePole { v } => 1.0 / (x - v),
        }
    }

    /// `|dt/dx|` at `t`.
    fn jacobian(&self, t: f64) -> f64 {
        match self {
            Chart::Linear => 1.0,
            _ => t * t,
        }
    }
}

/// A polynomial on `[lo, hi]` through its values at Chebyshev–Lobatto
/// points.
#[derive(Debug, Clone)]
pub(crate) struct ChebPoly {
    nodes: Vec<f64>,
    values: Vec<f64>,
}

impl ChebPoly {
    /// Abscissae for a polynomial of degree `degree` on `[lo, hi]`.
    pub(crate) fn nodes(lo: f64, hi: f64, degree: usize) -> Vec<f64> {
        if degree == 0 {
            return vec![0.5 * (lo + hi)];
        }
        let (c, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        (0..=degree)
            .map(|j| {
                // Ordered from lo to hi; the ends are exact.
                match j {
                    0 => lo,
                    _ if j == degree => hi,
                    _ => c - h * (std::f64::consts::PI * j as f64 / degree as f64).cos(),
                }
            })
            .collect()
    }

    fn eval(&self, t: f64) -> f64 {
        let n = self.nodes.len();
        if n == 1 {
            return self.values[0];
        }
        let (mut num, mut den) = (0.0, 0.0);
        for j in 0..n {
            let d = t - self.nodes[j];
            if d == 0.0 {
                return self.values[j];
            }
            let mut w = if j % 2 == 0 { 1.0 } else { -1.0 };
            if j == 0 || j == n - 1 {
                w *= 0.5;
            }
            let q = w / d;
            num += q * self.values[j];
            den += q;
        }
        num / den
    }

    fn degree(&self) -> usize {
        self.nodes.len() - 1
    }

    /// `∫_a^b g(t) P(t) dt` with an `extra`-degree allowance for `g`.
    fn integrate_with<G: Fn(f64) -> f64>(&self, a: f64, b: f64, extra: usize, g: G) -> f64 {
        if b <= a {
            return 0.0;
        }
        let r = rule(points_for_degree(self.degree() + extra));
        let w = b - a;
        r.nodes
            .iter()
            .zip(&r.weights)
            .map(|(&u, &wt)| {
                let t = a + w * u;
                wt * g(t) * self.eval(t)
            })
            .sum::<f64>()
            * w
    }

    fn integral(&self, a: f64, b: f64) -> f64 {
        self.integrate_with(a, b, 0, |_| 1.0)
    }

    /// `∫_a^b P(t)/t dt` for `0 < a`, on dyadic panels so that every panel
    /// sits at least one width away from the pole.
    fn integral_over_t(&self, a: f64, b: f64) -> f64 {
        let mut acc = 0.0;
        let mut lo = a;
        while lo < b {
            let hi = (2.0 * lo).min(b);
            acc += self.integrate_with(lo, hi, 26, |t| 1.0 / t);
            lo = hi;
        }
        acc
    }
}

/// One smooth piece `[x0, x1]` of a curve.
#[derive(Debug, Clone)]
struct Piece {
    x0: f64,
    x1: f64,
    chart: Chart,
    poly: ChebPoly,
    mass: f64,
}

impl Piece {
    fn t_range(&self, a: f64, b: f64) -> (f64, f64) {
        let (ta, tb) = (self.chart.t(a), self.chart.t(b));
        if ta <= tb {
            (ta, tb)
        } else {
            (tb, ta)
        }
    }

    fn density(&self, x: f64) -> f64 {
        let t = self.chart.t(x);
        (self.poly.eval(t) * self.chart.jacobian(t)).max(0.0)
    }

    fn mass_between(&self, a: f64, b: f64) -> f64 {
        let (ta, tb) = self.t_range(a, b);
        self.poly.integral(ta, tb)
    }

    fn first_moment(&self) -> f64 {
        let (ta, tb) = self.t_range(self.x0, self.x1);
        match self.chart {
            Chart::Linear => self.poly.integrate_with(ta, tb, 1, |t| t),
            Chart::BelowPole { v } => v * self.mass - self.poly.integral_over_t(ta, tb),
            Chart::AbovePole { v } => v * self.mass + self.poly.integral_over_t(ta, tb),
        }
    }
}

/// Description of one piece handed to [`PolyCurve::new`]: the curve range,
/// chart, polynomial degree and the log of `P(t)` at any `t`.
pub(crate) struct PieceSpec<'a> {
    pub x0: f64,
    pub x1: f64,
    pub chart: Chart,
    pub degree: usize,
    pub ln_value: &'a dyn Fn(f64) -> f64,
}

/// A normalized piecewise-polynomial posterior.
#[derive(Debug, Clone)]
pub struct PolyCurve {
    lo: f64,
    hi: f64,
    kinks: Vec<f64>,
    pieces: Vec<Piece>,
    shift: f64,
    norm: f64,
    mean: f64,
}

impl PolyCurve {
    /// Pieces must be contiguous and ordered; interior joins are kinks.
    pub(crate) fn new(specs: &[PieceSpec<'_>]) -> Result<Self> {
        let (lo, hi) = match (specs.first(), specs.last()) {
            (Some(a), Some(b)) => (a.x0, b.x1),
            _ => return Err(Error::DegeneratePosterior("no pieces".into())),
        };
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::DegeneratePosterior(format!("empty support ({lo}, {hi})")));
        }
        let mut raw = Vec::with_capacity(specs.len());
        let mut shift = f64::NEG_INFINITY;
        for sp in specs {
            let (ta, tb) = {
                let (a, b) = (sp.chart.t(sp.x0), sp.chart.t(sp.x1));
                if a <= b {
                    (a, b)
                } else {
                    (b, a)
                }
            };
            let nodes = ChebPoly::nodes(ta, tb, sp.degree);
            let lv: Vec<f64> = nodes.iter().map(|&t| (sp.ln_value)(t)).collect();
            shift = lv.iter().copied().fold(shift, f64::max);
            raw.push((sp, ta, tb, nodes, lv));
        }
        if !shift.is_finite() {
            return Err(Error::DegeneratePosterior("density vanishes on its support".into()));
        }
        let pieces: Vec<Piece> = raw
            .into_iter()
            .map(|(sp, ta, tb, nodes, lv)| {
                let poly = ChebPoly {
                    nodes,
                    values: lv.iter().map(|v| (v - shift).exp()).collect(),
                };
                let mass = poly.integral(ta, tb).max(0.0);
                Piece {
                    x0: sp.x0,
                    x1: sp.x1,
                    chart: sp.chart,
                    poly,
                    mass,
                }
            })
            .collect();
        let norm: f64 = pieces.iter().map(|p| p.mass).sum();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::DegeneratePosterior(format!(
                "normalization constant {norm:e} (log shift {shift}) is unusable"
            )));
        }
        let mean = pieces.iter().map(Piece::first_moment).sum::<f64>() / norm;
        let kinks = pieces.iter().skip(1).map(|p| p.x0).collect();
        Ok(Self {
            lo,
            hi,
            kinks,
            pieces,
            shift,
            norm,
            mean: mean.clamp(lo, hi),
        })
    }

    fn piece_at(&self, x: f64) -> &Piece {
        self.pieces
            .iter()
            .find(|p| x <= p.x1)
            .unwrap_or_else(|| self.pieces.last().expect("at least one piece"))
    }

    /// Unnormalized density scaled by `exp(-shift)`.
    fn raw(&self, x: f64) -> f64 {
        self.piece_at(x).density(x)
    }

    /// Maximizer with a `scan`-point grid split across pieces, golden-section
    /// refinement on each piece and the kink tie rule.
    pub fn mode_with_scan(&self, scan: usize) -> f64 {
        let per_piece = (scan / self.pieces.len()).max(8);
        let mut best = (self.lo, f64::NEG_INFINITY);
        for p in &self.pieces {
            let c = scan_maximize(|x| p.density(x).ln(), p.x0, p.x1, per_piece);
            if c.1 > best.1 {
                best = c;
            }
        }
        for w in self.pieces.windows(2) {
            let k = w[1].x0;
            let v = w[0].density(k).max(w[1].density(k)).ln();
            if v >= best.1 - KINK_TIE {
                return k;
            }
        }
        best.0
    }
}

impl Curve1d for PolyCurve {
    fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    fn kinks(&self) -> &[f64] {
        &self.kinks
    }

    fn ln_normalization(&self) -> f64 {
        self.norm.ln() + self.shift
    }

    fn pdf(&self, x: f64) -> f64 {
        if x < self.lo || x > self.hi {
            return 0.0;
        }
        self.raw(x) / self.norm
    }

    fn mean(&self) -> f64 {
        self.mean
    }

    fn mode(&self) -> f64 {
        self.mode_with_scan(DEFAULT_MODE_SCAN)
    }

    fn cdf(&self, x: f64) -> Result<f64> {
        if x <= self.lo {
            return Ok(0.0);
        }
        if x >= self.hi {
            return Ok(1.0);
        }
        let mut acc = 0.0;
        for p in &self.pieces {
            if x >= p.x1 {
                acc += p.mass;
            } else {
                acc += p.mass_between(p.x0, x);
                break;
            }
        }
        Ok((acc / self.norm).clamp(0.0, 1.0))
    }
}
