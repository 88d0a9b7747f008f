//! The local linear Bayesian model on one subinterval.
//!
//! On a slice `(v0, v1)` of width `1/s` the response curve is approximated
//! by the line `F(x) = α + s·β̃·(x − θ)`. The values `ρ0 = F(v0)` and
//! `ρ1 = F(v1)` carry a uniform prior on `ρL < ρ0 < ρ1 < ρU`, and each
//! binary observation inside the slice contributes the factor
//! `F(x)^y (1 − F(x))^(1−y)`, which is affine in `β̃` for fixed `θ`, in
//! `θ` for fixed `β̃`, and in `(ρ0, ρ1)` jointly. The posteriors of `θ`,
//! `ρ0`, `ρ1` and `β̃` are one-dimensional integrals of that product.

mod curve;
mod kernel;
mod poly;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use curve::{Curve1d, Density1d, PosteriorCurve, DEFAULT_MODE_SCAN};
pub use poly::PolyCurve;
pub(crate) use poly::{Chart, PieceSpec};
pub(crate) use kernel::ln_product_integral;

/// One slice `((t−1)/s, t/s]` of the unit interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subinterval {
    pub s: u32,
    pub index: u32,
}

impl Subinterval {
    pub fn new(s: u32, index: u32) -> Result<Self> {
        if s == 0 {
            return Err(Error::invalid("s", "slice count must be at least 1"));
        }
        if index == 0 || index > s {
            return Err(Error::invalid("index", format!("must lie in 1..={s}, got {index}")));
        }
        Ok(Self { s, index })
    }

    /// Slice containing `x ∈ (0, 1]`: `t = ⌈x·s⌉`.
    pub fn locate(x: f64, s: u32) -> Result<Self> {
        if !(x > 0.0 && x <= 1.0) {
            return Err(Error::invalid("x", format!("must lie in (0, 1], got {x}")));
        }
        let t = (x * s as f64).ceil().clamp(1.0, s as f64) as u32;
        Self::new(s, t)
    }

    pub fn v0(&self) -> f64 {
        (self.index - 1) as f64 / self.s as f64
    }

    pub fn v1(&self) -> f64 {
        self.index as f64 / self.s as f64
    }

    pub fn width(&self) -> f64 {
        1.0 / self.s as f64
    }

    /// `v0 < x < v1`.
    pub fn contains_strictly(&self, x: f64) -> bool {
        x > self.v0() && x < self.v1()
    }
}

/// Prior range `(ρL, ρU)` of the slice-end values and the target level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorBounds {
    pub rho_l: f64,
    pub rho_u: f64,
    pub alpha: f64,
}

impl PriorBounds {
    pub fn new(rho_l: f64, rho_u: f64, alpha: f64) -> Result<Self> {
        if !(0.0 <= rho_l && rho_l < alpha && alpha < rho_u && rho_u <= 1.0) {
            return Err(Error::invalid(
                "bounds",
                format!("need 0 ≤ ρL < α < ρU ≤ 1, got ρL={rho_l}, α={alpha}, ρU={rho_u}"),
            ));
        }
        Ok(Self { rho_l, rho_u, alpha })
    }

    /// The non-informative range `(0, 1)`.
    pub fn noninformative(alpha: f64) -> Result<Self> {
        Self::new(0.0, 1.0, alpha)
    }

    pub fn range(&self) -> f64 {
        self.rho_u - self.rho_l
    }
}

/// A design point with its binary response.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub x: f64,
    pub y: u8,
}

impl Observation {
    pub fn new(x: f64, y: u8) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::invalid("x", "must be finite"));
        }
        if y > 1 {
            return Err(Error::invalid("y", format!("must be 0 or 1, got {y}")));
        }
        Ok(Self { x, y })
    }

    fn sign(&self) -> f64 {
        2.0 * self.y as f64 - 1.0
    }
}

/// Breakpoint `θ0` of `η`.
pub fn theta0(bounds: &PriorBounds, sub: &Subinterval) -> f64 {
    ((bounds.rho_u - bounds.alpha) * sub.v0() + (bounds.alpha - bounds.rho_l) * sub.v1())
        / bounds.range()
}

/// Upper limit `η(θ)` of `β̃` compatible with the prior range.
pub fn eta(theta: f64, bounds: &PriorBounds, sub: &Subinterval) -> Result<f64> {
    if !theta.is_finite() {
        return Err(Error::invalid("theta", "must be finite"));
    }
    let t0 = theta0(bounds, sub);
    let den = if theta <= t0 { sub.v1() - theta } else { theta - sub.v0() };
    if den == 0.0 {
        return Err(Error::invalid("theta", "η denominator vanishes"));
    }
    Ok(eta_at(theta, t0, bounds, sub))
}

#[inline]
fn eta_at(theta: f64, t0: f64, b: &PriorBounds, sub: &Subinterval) -> f64 {
    let s = sub.s as f64;
    if theta <= t0 {
        (b.rho_u - b.alpha) / (s * (sub.v1() - theta))
    } else {
        (b.alpha - b.rho_l) / (s * (theta - sub.v0()))
    }
}

/// `(a_i, b_i(θ))` with `L_i = a_i + b_i β̃`.
pub fn likelihood_coeffs(obs: &Observation, theta: f64, sub: &Subinterval, alpha: f64) -> (f64, f64) {
    let sg = obs.sign();
    (1.0 - obs.y as f64 + sg * alpha, sub.s as f64 * sg * (obs.x - theta))
}

/// Coefficients of `∏ (a_i + b_i z)` in powers of `z`, built one factor at
/// a time: `d_{m,r} = d_{m−1,r} a_m + d_{m−1,r−1} b_m`, `d_{0,0} = 1`.
pub fn d_recursion<I: IntoIterator<Item = (f64, f64)>>(pairs: I) -> Vec<f64> {
    let mut d = vec![1.0];
    for (a, b) in pairs {
        d.push(0.0);
        for r in (0..d.len()).rev() {
            let lower = if r > 0 { d[r - 1] } else { 0.0 };
            d[r] = d[r] * a + lower * b;
        }
    }
    d
}

/// `d_{m,r}(θ)` for the observations, `r = 0..=m`.
pub fn d_coefficients(obs: &[Observation], theta: f64, sub: &Subinterval, alpha: f64) -> Vec<f64> {
    d_recursion(obs.iter().map(|o| likelihood_coeffs(o, theta, sub, alpha)))
}

/// The one-step posterior mode of `θ` after `(x1, y1)` with `ρL = 0`,
/// `ρU = 1`, as a closed form. Returns both algebraic forms of the active
/// branch (they coincide).
pub fn x2_oracle_forms(x1: f64, y1: u8, alpha: f64, sub: &Subinterval) -> Result<(f64, f64)> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid("alpha", format!("must lie in (0, 1), got {alpha}")));
    }
    if y1 > 1 {
        return Err(Error::invalid("y1", "must be 0 or 1"));
    }
    let (v0, v1) = (sub.v0(), sub.v1());
    let th0 = (1.0 - alpha) * v0 + alpha * v1;
    let t0 = (2.0 + alpha) * v0 / 3.0 + (1.0 - alpha) * v1 / 3.0;
    let t1 = alpha * v0 / 3.0 + (1.0 - alpha / 3.0) * v1;
    Ok(if x1 < t0 && y1 == 1 {
        (
            x1 - (1.0 - 4.0 * alpha) / (2.0 + alpha) * (v1 - x1),
            th0 - 3.0 * (1.0 - alpha) / (2.0 + alpha) * (t0 - x1),
        )
    } else if x1 > t1 && y1 == 0 {
        (
            x1 + (4.0 * alpha - 3.0) / (3.0 - alpha) * (x1 - v0),
            th0 + 3.0 * alpha / (3.0 - alpha) * (x1 - t1),
        )
    } else {
        (th0, th0)
    })
}

/// [`x2_oracle_forms`], first form.
pub fn x2_oracle(x1: f64, y1: u8, alpha: f64, sub: &Subinterval) -> Result<f64> {
    x2_oracle_forms(x1, y1, alpha, sub).map(|f| f.0)
}

/// Prior bounds, slice and member observations: everything the slice
/// posteriors depend on. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalPosterior {
    sub: Subinterval,
    bounds: PriorBounds,
    members: Vec<Observation>,
    // Members in a canonical order, so densities are bitwise invariant
    // under permutation of the input.
    canon: Vec<Observation>,
    theta0: f64,
}

impl LocalPosterior {
    /// Every member must lie strictly inside the slice.
    pub fn new(sub: Subinterval, bounds: PriorBounds, members: Vec<Observation>) -> Result<Self> {
        PriorBounds::new(bounds.rho_l, bounds.rho_u, bounds.alpha)?;
        if let Some(o) = members.iter().find(|o| !sub.contains_strictly(o.x) || o.y > 1) {
            return Err(Error::invalid(
                "members",
                format!("observation ({}, {}) is not a member of ({}, {})", o.x, o.y, sub.v0(), sub.v1()),
            ));
        }
        let mut canon = members.clone();
        canon.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.cmp(&b.y)));
        Ok(Self {
            theta0: theta0(&bounds, &sub),
            sub,
            bounds,
            members,
            canon,
        })
    }

    /// Member set drawn from a full history, preserving order.
    pub fn from_history(sub: Subinterval, bounds: PriorBounds, history: &[Observation]) -> Result<Self> {
        let members = history.iter().filter(|o| sub.contains_strictly(o.x)).copied().collect();
        Self::new(sub, bounds, members)
    }

    pub fn subinterval(&self) -> Subinterval {
        self.sub
    }

    pub fn bounds(&self) -> PriorBounds {
        self.bounds
    }

    pub fn members(&self) -> &[Observation] {
        &self.members
    }

    pub fn m(&self) -> usize {
        self.members.len()
    }

    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    pub fn eta(&self, theta: f64) -> f64 {
        eta_at(theta, self.theta0, &self.bounds, &self.sub)
    }

    /// `ln Σ_r d_{m,r}(θ) η^{r+2}/(r+2)`, i.e. `ln ∫_0^η β̃ ∏ L_i dβ̃`.
    pub fn ln_theta_kernel(&self, theta: f64) -> f64 {
        let eta = self.eta(theta);
        let s = self.sub.s as f64;
        let alpha = self.bounds.alpha;
        let ms = &self.canon;
        ln_product_integral(
            ms.len(),
            |i, z| {
                let o = &ms[i];
                let sg = o.sign();
                1.0 - o.y as f64 + sg * (alpha + s * (o.x - theta) * z)
            },
            0.0,
            eta,
            1,
        )
    }

    /// `c_m h_m(θ)` summed from the d-coefficients.
    pub fn theta_density_d_form(&self, theta: f64) -> f64 {
        let eta = self.eta(theta);
        let d = d_coefficients(&self.members, theta, &self.sub, self.bounds.alpha);
        let sum: f64 = d
            .iter()
            .enumerate()
            .map(|(r, dr)| dr * eta.powi(r as i32 + 2) / (r as f64 + 2.0))
            .sum();
        2.0 * self.sub.s as f64 / self.bounds.range().powi(2) * sum
    }

    /// `c_m h_m(θ)` by the multiplicative update
    /// `c_j h_j = c_{j−1} h_{j−1} (a_j + b_j η R_{j−1})` from `c_0 h_0`.
    pub fn theta_density_recursive_form(&self, theta: f64) -> f64 {
        let eta = self.eta(theta);
        let s = self.sub.s as f64;
        let mut value = s * eta * eta / self.bounds.range().powi(2);
        let mut d = vec![1.0];
        for o in &self.members {
            let (num, den) = d.iter().enumerate().fold((0.0, 0.0), |(n, q), (r, dr)| {
                let e = dr * eta.powi(r as i32);
                (n + e / (r as f64 + 3.0), q + e / (r as f64 + 2.0))
            });
            let (a, b) = likelihood_coeffs(o, theta, &self.sub, self.bounds.alpha);
            value *= a + b * eta * (num / den);
            d = d_recursion_step(&d, a, b);
        }
        value
    }

    /// `q_i = (v1 − x_i)/(v1 − v0)`.
    fn q(&self, o: &Observation) -> f64 {
        (self.sub.v1() - o.x) * self.sub.s as f64
    }

    /// `ln ∫_{ρ0}^{ρU} ∏ L_i(ρ0, ρ1) dρ1`.
    pub fn ln_rho0_kernel(&self, rho0: f64) -> f64 {
        let ms = &self.canon;
        ln_product_integral(
            ms.len(),
            |i, z| {
                let o = &ms[i];
                let q = self.q(o);
                1.0 - o.y as f64 + o.sign() * (q * rho0 + (1.0 - q) * z)
            },
            rho0,
            self.bounds.rho_u,
            0,
        )
    }

    /// `ln ∫_{ρL}^{ρ1} ∏ L_i(ρ0, ρ1) dρ0`.
    pub fn ln_rho1_kernel(&self, rho1: f64) -> f64 {
        let ms = &self.canon;
        ln_product_integral(
            ms.len(),
            |i, z| {
                let o = &ms[i];
                let q = self.q(o);
                1.0 - o.y as f64 + o.sign() * (q * z + (1.0 - q) * rho1)
            },
            self.bounds.rho_l,
            rho1,
            0,
        )
    }

    /// `Σ_r d_{m,r}(ρ0)(ρU^{r+1} − ρ0^{r+1})/(r+1)`.
    pub fn rho0_density_d_form(&self, rho0: f64) -> f64 {
        let d = d_recursion(self.members.iter().map(|o| {
            let q = self.q(o);
            (1.0 - o.y as f64 + o.sign() * q * rho0, o.sign() * (1.0 - q))
        }));
        let u = self.bounds.rho_u;
        d.iter()
            .enumerate()
            .map(|(r, dr)| dr * (u.powi(r as i32 + 1) - rho0.powi(r as i32 + 1)) / (r as f64 + 1.0))
            .sum()
    }

    /// `Σ_r d_{m,r}(ρ1)(ρ1^{r+1} − ρL^{r+1})/(r+1)`.
    pub fn rho1_density_d_form(&self, rho1: f64) -> f64 {
        let d = d_recursion(self.members.iter().map(|o| {
            let q = self.q(o);
            (1.0 - o.y as f64 + o.sign() * (1.0 - q) * rho1, o.sign() * q)
        }));
        let l = self.bounds.rho_l;
        d.iter()
            .enumerate()
            .map(|(r, dr)| dr * (rho1.powi(r as i32 + 1) - l.powi(r as i32 + 1)) / (r as f64 + 1.0))
            .sum()
    }

    /// Lower end `β̃0` of the support of `β̃`.
    pub fn beta_tilde0(&self) -> f64 {
        let b = &self.bounds;
        let s = self.sub.s as f64;
        ((b.rho_u - b.alpha) / (s * self.sub.v1())).max((b.alpha - b.rho_l) / (s * (1.0 - self.sub.v0())))
    }

    /// `(ℓ(β̃), u(β̃))`, the range of `θ` given `β̃`.
    pub fn theta_range(&self, beta: f64) -> (f64, f64) {
        let b = &self.bounds;
        let s = self.sub.s as f64;
        (
            self.sub.v1() - (b.rho_u - b.alpha) / (s * beta),
            self.sub.v0() + (b.alpha - b.rho_l) / (s * beta),
        )
    }

    /// `ln β̃ + ln ∫_ℓ^u ∏ L_i dθ`.
    pub fn ln_beta_kernel(&self, beta: f64) -> f64 {
        if !(beta > 0.0) {
            return f64::NEG_INFINITY;
        }
        let (l, u) = self.theta_range(beta);
        let s = self.sub.s as f64;
        let alpha = self.bounds.alpha;
        let ms = &self.canon;
        beta.ln()
            + ln_product_integral(
                ms.len(),
                |i, z| {
                    let o = &ms[i];
                    1.0 - o.y as f64 + o.sign() * (alpha + s * beta * (o.x - z))
                },
                l,
                u,
                0,
            )
    }

    /// `β̃ Σ_r d_{m,r}(β̃)(u^{r+1} − ℓ^{r+1})/(r+1)`.
    pub fn beta_density_d_form(&self, beta: f64) -> f64 {
        let s = self.sub.s as f64;
        let alpha = self.bounds.alpha;
        let d = d_recursion(self.members.iter().map(|o| {
            let sg = o.sign();
            (1.0 - o.y as f64 + sg * (alpha + s * beta * o.x), -sg * s * beta)
        }));
        let (l, u) = self.theta_range(beta);
        beta * d
            .iter()
            .enumerate()
            .map(|(r, dr)| dr * (u.powi(r as i32 + 1) - l.powi(r as i32 + 1)) / (r as f64 + 1.0))
            .sum::<f64>()
    }

    /// Posterior of the root, truncated to `(0, 1)`.
    pub fn posterior_theta(&self) -> Result<PolyCurve> {
        let b = &self.bounds;
        let factors: Vec<LineFactor> = self
            .canon
            .iter()
            .map(|o| LineFactor { x: o.x, sign: o.sign(), a: 1.0 - o.y as f64 + o.sign() * b.alpha })
            .collect();
        theta_curve(&self.sub, b.rho_u - b.alpha, b.alpha - b.rho_l, self.theta0, &factors)
    }

    /// Marginal posterior of `ρ0 = F(v0)` on `(ρL, ρU)`.
    pub fn posterior_rho0(&self) -> Result<PolyCurve> {
        let f = |r: f64| self.ln_rho0_kernel(r);
        PolyCurve::new(&[PieceSpec {
            x0: self.bounds.rho_l,
            x1: self.bounds.rho_u,
            chart: Chart::Linear,
            degree: self.m() + 1,
            ln_value: &f,
        }])
    }

    /// Marginal posterior of `ρ1 = F(v1)` on `(ρL, ρU)`.
    pub fn posterior_rho1(&self) -> Result<PolyCurve> {
        let f = |r: f64| self.ln_rho1_kernel(r);
        PolyCurve::new(&[PieceSpec {
            x0: self.bounds.rho_l,
            x1: self.bounds.rho_u,
            chart: Chart::Linear,
            degree: self.m() + 1,
            ln_value: &f,
        }])
    }

    /// Marginal posterior of `β̃` on `(β̃0, ρU − ρL)`.
    pub fn posterior_betatilde(&self) -> Result<PosteriorCurve<BetaDensity>> {
        let lo = self.beta_tilde0();
        if lo >= self.bounds.range() {
            return Err(Error::DegeneratePosterior(format!(
                "β̃ support is empty: β̃0 = {lo} ≥ ρU − ρL = {}",
                self.bounds.range()
            )));
        }
        PosteriorCurve::new(BetaDensity(self.clone()))
    }
}

/// One likelihood factor `a + sign·s·β̃·(x − θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct LineFactor {
    pub x: f64,
    pub sign: f64,
    pub a: f64,
}

/// Posterior of the root on `(0, 1)` for a slice whose `η` has numerators
/// `ku` (left of `th0`) and `kl` (right of it).
///
/// With `β̃ = η u`, the kernel left of `th0` is `η² ∫_0^1 u ∏(a_i +
/// b_i η u) du`, and `b_i η` is affine in `t = 1/(v1 − θ)`; right of
/// `th0` the same holds for `t = 1/(θ − v0)`.
pub(crate) fn theta_curve(sub: &Subinterval, ku: f64, kl: f64, th0: f64, fs: &[LineFactor]) -> Result<PolyCurve> {
    let (v0, v1) = (sub.v0(), sub.v1());
    let s = sub.s as f64;
    let m = fs.len();
    let left = |t: f64| {
        2.0 * (ku / s).ln()
            + ln_product_integral(m, |i, u| fs[i].a + fs[i].sign * ku * (1.0 - (v1 - fs[i].x) * t) * u, 0.0, 1.0, 1)
    };
    let right = |t: f64| {
        2.0 * (kl / s).ln()
            + ln_product_integral(m, |i, u| fs[i].a + fs[i].sign * kl * ((fs[i].x - v0) * t - 1.0) * u, 0.0, 1.0, 1)
    };
    PolyCurve::new(&[
        PieceSpec { x0: 0.0, x1: th0, chart: Chart::BelowPole { v: v1 }, degree: m, ln_value: &left },
        PieceSpec { x0: th0, x1: 1.0, chart: Chart::AbovePole { v: v0 }, degree: m, ln_value: &right },
    ])
}

fn d_recursion_step(d: &[f64], a: f64, b: f64) -> Vec<f64> {
    let mut out = vec![0.0; d.len() + 1];
    for (r, dr) in d.iter().enumerate() {
        out[r] += dr * a;
        out[r + 1] += dr * b;
    }
    out
}

/// Density of `θ` for [`PosteriorCurve`].
#[derive(Debug, Clone)]
pub struct ThetaDensity(pub LocalPosterior);

impl Density1d for ThetaDensity {
    fn support(&self) -> (f64, f64) {
        (0.0, 1.0)
    }
    fn kinks(&self) -> Vec<f64> {
        vec![self.0.theta0]
    }
    fn breakpoints(&self) -> Vec<f64> {
        vec![self.0.sub.v0(), self.0.sub.v1()]
    }
    fn ln_density(&self, x: f64) -> f64 {
        self.0.ln_theta_kernel(x)
    }
}

/// Density of `ρ0` for [`PosteriorCurve`].
#[derive(Debug, Clone)]
pub struct Rho0Density(pub LocalPosterior);

impl Density1d for Rho0Density {
    fn support(&self) -> (f64, f64) {
        (self.0.bounds.rho_l, self.0.bounds.rho_u)
    }
    fn ln_density(&self, x: f64) -> f64 {
        self.0.ln_rho0_kernel(x)
    }
}

/// Density of `ρ1` for [`PosteriorCurve`].
#[derive(Debug, Clone)]
pub struct Rho1Density(pub LocalPosterior);

impl Density1d for Rho1Density {
    fn support(&self) -> (f64, f64) {
        (self.0.bounds.rho_l, self.0.bounds.rho_u)
    }
    fn ln_density(&self, x: f64) -> f64 {
        self.0.ln_rho1_kernel(x)
    }
}

/// Density of `β̃` for [`PosteriorCurve`].
#[derive(Debug, Clone)]
pub struct BetaDensity(pub LocalPosterior);

impl Density1d for BetaDensity {
    fn support(&self) -> (f64, f64) {
        (self.0.beta_tilde0(), self.0.bounds.range())
    }
    fn ln_density(&self, x: f64) -> f64 {
        self.0.ln_beta_kernel(x)
    }
}
