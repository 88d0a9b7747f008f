//! Adaptive Gauss–Kronrod (7/15) quadrature with user breakpoints.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Adaptive quadrature settings.
///
/// A panel is accepted when its Gauss/Kronrod discrepancy is below
/// `max(abs_tol · width/total_width, rel_tol · |panel estimate|)` or at the
/// floating-point roundoff floor. Bisection stops at `max_depth`, which is
/// reported as [`Error::NoConvergence`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-12,
            max_depth: 40,
        }
    }
}

struct Panel<const N: usize> {
    estimate: [f64; N],
    error: [f64; N],
    abs: [f64; N],
}

impl Quadrature {
    pub fn new(abs_tol: f64, max_depth: u32) -> Result<Self> {
        if !(abs_tol > 0.0) {
            return Err(Error::invalid("abs_tol", "must be positive"));
        }
        if max_depth < 1 {
            return Err(Error::invalid("max_depth", "must be at least 1"));
        }
        Ok(Self {
            abs_tol,
            max_depth,
            ..Self::default()
        })
    }

    /// `∫_a^b f`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<f64> {
        self.integrate_vec(|x| [f(x)], a, b).map(|v| v[0])
    }

    /// Integral over consecutive intervals of the sorted `points`
    /// (first and last are the limits). Use this to split at kinks.
    pub fn integrate_with_breaks<F: Fn(f64) -> f64>(&self, f: F, points: &[f64]) -> Result<f64> {
        self.integrate_vec_with_breaks(|x| [f(x)], points).map(|v| v[0])
    }

    pub fn integrate_vec_with_breaks<const N: usize, F: Fn(f64) -> [f64; N]>(
        &self,
        f: F,
        points: &[f64],
    ) -> Result<[f64; N]> {
        if points.len() < 2 {
            return Err(Error::invalid("points", "need at least two points"));
        }
        let total = points[points.len() - 1] - points[0];
        let mut acc = [0.0; N];
        for w in points.windows(2) {
            if w[1] < w[0] {
                return Err(Error::invalid("points", "breakpoints must be sorted"));
            }
            if w[1] == w[0] {
                continue;
            }
            let share = if total > 0.0 { (w[1] - w[0]) / total } else { 1.0 };
            let part = self.adapt(&f, w[0], w[1], self.abs_tol * share, 0)?;
            for k in 0..N {
                acc[k] += part[k];
            }
        }
        Ok(acc)
    }

    /// Componentwise integral of a vector-valued integrand; every component
    /// must meet the tolerance.
    pub fn integrate_vec<const N: usize, F: Fn(f64) -> [f64; N]>(
        &self,
        f: F,
        a: f64,
        b: f64,
    ) -> Result<[f64; N]> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::invalid("limits", format!("non-finite limits [{a}, {b}]")));
        }
        if a == b {
            return Ok([0.0; N]);
        }
        if a > b {
            let v = self.adapt(&f, b, a, self.abs_tol, 0)?;
            return Ok(v.map(|x| -x));
        }
        self.adapt(&f, a, b, self.abs_tol, 0)
    }

    fn adapt<const N: usize, F: Fn(f64) -> [f64; N]>(
        &self,
        f: &F,
        a: f64,
        b: f64,
        tol: f64,
        depth: u32,
    ) -> Result<[f64; N]> {
        let whole = gk15(f, a, b)?;
        self.refine(f, a, b, whole, tol, depth)
    }

    fn refine<const N: usize, F: Fn(f64) -> [f64; N]>(
        &self,
        f: &F,
        a: f64,
        b: f64,
        panel: Panel<N>,
        tol: f64,
        depth: u32,
    ) -> Result<[f64; N]> {
        let accepted = (0..N).all(|k| {
            let floor = 50.0 * f64::EPSILON * panel.abs[k];
            panel.error[k] <= tol.max(self.rel_tol * panel.estimate[k].abs()).max(floor)
        });
        if accepted {
            return Ok(panel.estimate);
        }
        let mid = 0.5 * (a + b);
        if depth >= self.max_depth || mid <= a || mid >= b {
            let worst = (0..N)
                .max_by(|&i, &j| panel.error[i].partial_cmp(&panel.error[j]).unwrap())
                .unwrap_or(0);
            return Err(Error::NoConvergence {
                a,
                b,
                estimate: panel.estimate[worst],
                error: panel.error[worst],
            });
        }
        let left = self.adapt(f, a, mid, 0.5 * tol, depth + 1)?;
        let right = self.adapt(f, mid, b, 0.5 * tol, depth + 1)?;
        let mut out = [0.0; N];
        for k in 0..N {
            out[k] = left[k] + right[k];
        }
        Ok(out)
    }
}

fn gk15<const N: usize, F: Fn(f64) -> [f64; N]>(f: &F, a: f64, b: f64) -> Result<Panel<N>> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kronrod = [0.0; N];
    let mut gauss = [0.0; N];
    let mut abs = [0.0; N];

    let fc = f(center);
    for k in 0..N {
        kronrod[k] = fc[k] * WGK[7];
        gauss[k] = fc[k] * WG[3];
        abs[k] = fc[k].abs() * WGK[7];
    }
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        for k in 0..N {
            let s = f1[k] + f2[k];
            kronrod[k] += WGK[j] * s;
            abs[k] += WGK[j] * (f1[k].abs() + f2[k].abs());
            if j % 2 == 1 {
                gauss[k] += WG[j / 2] * s;
            }
        }
    }
    let mut panel = Panel {
        estimate: [0.0; N],
        error: [0.0; N],
        abs: [0.0; N],
    };
    for k in 0..N {
        if !kronrod[k].is_finite() {
            return Err(Error::NoConvergence {
                a,
                b,
                estimate: kronrod[k],
                error: f64::INFINITY,
            });
        }
        panel.estimate[k] = kronrod[k] * half;
        panel.error[k] = ((kronrod[k] - gauss[k]) * half).abs();
        panel.abs[k] = abs[k] * half.abs();
    }
    Ok(panel)
}
