//! Normalized one-dimensional posterior curves.

use crate::error::{Error, Result};
use crate::numerics::optimize::scan_maximize;
use crate::numerics::Quadrature;

/// An unnormalized log density on a bounded support.
pub trait Density1d {
    /// Closed support `(lo, hi)`.
    fn support(&self) -> (f64, f64);

    /// Interior points where the density is not differentiable.
    fn kinks(&self) -> Vec<f64> {
        Vec::new()
    }

    /// Extra interior quadrature breakpoints (kinks are always included).
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    /// Log of the unnormalized density; `-∞` where it vanishes.
    fn ln_density(&self, x: f64) -> f64;
}

/// Default scan size for the mode search, split across smooth pieces.
pub const DEFAULT_MODE_SCAN: usize = 512;

/// Relative density gap under which a kink wins the mode comparison.
pub(crate) const KINK_TIE: f64 = 1e-12;

/// A normalized univariate posterior.
pub trait Curve1d {
    fn support(&self) -> (f64, f64);

    /// Interior points where the density is not differentiable.
    fn kinks(&self) -> &[f64];

    /// Log of the normalizing constant of the unnormalized density.
    fn ln_normalization(&self) -> f64;

    /// Normalized density; zero outside the support.
    fn pdf(&self, x: f64) -> f64;

    fn mean(&self) -> f64;

    /// Maximizer of the density.
    fn mode(&self) -> f64;

    /// `P(X ≤ x)`.
    fn cdf(&self, x: f64) -> Result<f64>;

    /// Inverse distribution function by safeguarded Newton iteration.
    fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid("p", format!("must lie in [0, 1], got {p}")));
        }
        let (lo, hi) = self.support();
        if p == 0.0 {
            return Ok(lo);
        }
        if p == 1.0 {
            return Ok(hi);
        }
        let (mut a, mut b) = (lo, hi);
        let mut x = self.mean().clamp(a, b);
        for _ in 0..100 {
            let g = self.cdf(x)? - p;
            if g.abs() < 1e-14 {
                return Ok(x);
            }
            if g < 0.0 {
                a = x;
            } else {
                b = x;
            }
            let d = self.pdf(x);
            let mut next = if d > 0.0 { x - g / d } else { f64::NAN };
            if !(next > a && next < b) {
                next = 0.5 * (a + b);
            }
            if (next - x).abs() <= 1e-14 * (1.0 + x.abs()) || b - a <= 1e-14 * (1.0 + x.abs()) {
                return Ok(next);
            }
            x = next;
        }
        Ok(x)
    }

    /// Equal-tail credible interval with coverage `level`.
    fn credible_interval(&self, level: f64) -> Result<(f64, f64)> {
        if !(level > 0.0 && level < 1.0) {
            return Err(Error::invalid("level", format!("must lie in (0, 1), got {level}")));
        }
        let tail = 0.5 * (1.0 - level);
        Ok((self.quantile(tail)?, self.quantile(1.0 - tail)?))
    }

    /// `points` equally spaced abscissae strictly inside the support, with
    /// density values.
    fn sample(&self, points: usize) -> Vec<(f64, f64)> {
        let (lo, hi) = self.support();
        let h = (hi - lo) / points as f64;
        (0..points)
            .map(|i| {
                let x = lo + h * (i as f64 + 0.5);
                (x, self.pdf(x))
            })
            .collect()
    }
}

const SHIFT_SCAN: usize = 16;

/// A normalized density with mean, mode, distribution function and
/// quantiles. Internally the density is held as `exp(ln_density - shift)`
/// so that highly concentrated posteriors neither overflow nor underflow.
#[derive(Debug, Clone)]
pub struct PosteriorCurve<D> {
    density: D,
    lo: f64,
    hi: f64,
    kinks: Vec<f64>,
    breaks: Vec<f64>,
    shift: f64,
    norm: f64,
    mean: f64,
    quad: Quadrature,
}

impl<D: Density1d> PosteriorCurve<D> {
    pub fn new(density: D) -> Result<Self> {
        let (lo, hi) = density.support();
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::DegeneratePosterior(format!("empty support ({lo}, {hi})")));
        }
        let mut kinks: Vec<f64> = density
            .kinks()
            .into_iter()
            .filter(|&k| k > lo && k < hi)
            .collect();
        kinks.sort_by(f64::total_cmp);
        kinks.dedup();

        let mut pieces = vec![lo];
        pieces.extend(kinks.iter().copied());
        pieces.extend(density.breakpoints().into_iter().filter(|&k| k > lo && k < hi));
        pieces.push(hi);
        pieces.sort_by(f64::total_cmp);
        pieces.dedup();

        let (mut shift, mut arg) = (f64::NEG_INFINITY, lo);
        for w in pieces.windows(2) {
            for j in 0..=SHIFT_SCAN {
                let x = w[0] + (w[1] - w[0]) * j as f64 / SHIFT_SCAN as f64;
                let v = density.ln_density(x);
                if v > shift {
                    shift = v;
                    arg = x;
                }
            }
        }
        if !shift.is_finite() {
            return Err(Error::DegeneratePosterior(
                "density vanishes on its support".into(),
            ));
        }
        let mut breaks = pieces;
        if !breaks.contains(&arg) {
            breaks.push(arg);
            breaks.sort_by(f64::total_cmp);
        }

        let quad = Quadrature {
            abs_tol: 1e-12,
            rel_tol: 1e-11,
            max_depth: 40,
        };
        let [norm, first] = quad.integrate_vec_with_breaks(
            |x| {
                let f = (density.ln_density(x) - shift).exp();
                [f, x * f]
            },
            &breaks,
        )?;
        if !(norm.is_finite() && norm > 0.0) || norm.ln() + shift < (1e-300f64).ln() {
            return Err(Error::DegeneratePosterior(format!(
                "normalization constant {norm:e} (log shift {shift}) is unusable"
            )));
        }
        Ok(Self {
            density,
            lo,
            hi,
            kinks,
            breaks,
            shift,
            norm,
            mean: first / norm,
            quad,
        })
    }

    pub fn density(&self) -> &D {
        &self.density
    }

    /// Maximizer found piecewise between kinks: `scan` grid points in
    /// total, golden-section refinement on each piece, then comparison. A
    /// kink whose density is within a relative `1e-12` of the best value
    /// is returned in preference to a smooth-piece maximum.
    pub fn mode_with_scan(&self, scan: usize) -> f64 {
        let f = |x: f64| self.density.ln_density(x);
        let mut ends = vec![self.lo];
        ends.extend(self.kinks.iter().copied());
        ends.push(self.hi);
        let per_piece = (scan / (ends.len() - 1)).max(8);

        let mut best = (self.lo, f64::NEG_INFINITY);
        for w in ends.windows(2) {
            let c = scan_maximize(f, w[0], w[1], per_piece);
            if c.1 > best.1 {
                best = c;
            }
        }
        for &k in &self.kinks {
            if f(k) >= best.1 - KINK_TIE {
                return k;
            }
        }
        best.0
    }
}

impl<D: Density1d> Curve1d for PosteriorCurve<D> {
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
        (self.density.ln_density(x) - self.shift).exp() / self.norm
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
        let mut pts: Vec<f64> = self.breaks.iter().copied().filter(|&b| b < x).collect();
        pts.push(x);
        let v = self
            .quad
            .integrate_with_breaks(|t| (self.density.ln_density(t) - self.shift).exp(), &pts)?;
        Ok((v / self.norm).clamp(0.0, 1.0))
    }
}
