//! Reference procedures: Robbins–Monro, the efficient Robbins–Monro
//! variant (RMJ), trajectory averaging (RPJ) and a Bayesian logit MAP
//! design (Wu-MAP). They run in whatever coordinates the caller uses.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::normal::{phi, phi_inv};
use crate::numerics::optimize::nelder_mead;
use crate::numerics::std_normal_pdf;

/// Smallest variance carried by [`RmjState`].
pub const TAU2_FLOOR: f64 = 1e-12;

/// Smallest scale returned by the Wu-MAP fit.
pub const SIGMA_MIN: f64 = 1e-3;

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid("alpha", format!("must lie in (0, 1), got {alpha}")))
    }
}

/// Gain sequence `a_n` of a Robbins–Monro recursion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Gain {
    /// `a_n = 1 / (n · slope)`.
    Harmonic { slope: f64 },
    /// `a_n = scale · n^(-exponent)`.
    Power { scale: f64, exponent: f64 },
    /// Explicit values; the last one repeats once exhausted.
    Sequence { values: Vec<f64> },
}

impl Gain {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            Gain::Harmonic { slope } => slope.is_finite() && *slope > 0.0,
            Gain::Power { scale, exponent } => {
                scale.is_finite() && *scale > 0.0 && exponent.is_finite() && *exponent >= 0.0
            }
            Gain::Sequence { values } => {
                !values.is_empty() && values.iter().all(|a| a.is_finite() && *a > 0.0)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid("gain", format!("must be positive and finite, got {self:?}")))
        }
    }

    /// `a_n` for `n ≥ 1`.
    pub fn at(&self, n: u64) -> f64 {
        let n = n.max(1);
        match self {
            Gain::Harmonic { slope } => 1.0 / (n as f64 * slope),
            Gain::Power { scale, exponent } => scale * (n as f64).powf(-exponent),
            Gain::Sequence { values } => values[((n - 1) as usize).min(values.len() - 1)],
        }
    }
}

/// Robbins–Monro recursion `x_{n+1} = x_n − a_n (y_n − α)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RmState {
    pub x: f64,
    /// Number of responses absorbed so far.
    pub n: u64,
    pub gain: Gain,
}

impl RmState {
    pub fn new(x1: f64, gain: Gain) -> Result<Self> {
        if !x1.is_finite() {
            return Err(Error::invalid("x1", "must be finite"));
        }
        gain.validate()?;
        Ok(Self { x: x1, n: 0, gain })
    }

    pub fn step(&self, y: u8, alpha: f64) -> Self {
        let n = self.n + 1;
        let a = self.gain.at(n);
        Self { x: self.x - a * (f64::from(y) - alpha), n, gain: self.gain.clone() }
    }
}

/// Efficient Robbins–Monro state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RmjState {
    pub x: f64,
    pub n: u64,
    pub alpha: f64,
    pub beta: f64,
    pub tau2: f64,
    /// `α_n` and `a_n` used by the most recent step.
    pub alpha_n: Option<f64>,
    pub a_n: Option<f64>,
}

impl RmjState {
    pub fn new(x1: f64, alpha: f64, beta: f64, tau1_sq: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !x1.is_finite() {
            return Err(Error::invalid("x1", "must be finite"));
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::invalid("beta", format!("must be positive, got {beta}")));
        }
        if !(tau1_sq.is_finite() && tau1_sq > 0.0) {
            return Err(Error::invalid("tau1_sq", format!("must be positive, got {tau1_sq}")));
        }
        Ok(Self { x: x1, n: 0, alpha, beta, tau2: tau1_sq, alpha_n: None, a_n: None })
    }

    /// `β = M'(θ) / φ(Φ⁻¹(α))`.
    pub fn optimal_beta(slope: f64, alpha: f64) -> Result<f64> {
        check_alpha(alpha)?;
        Ok(slope / std_normal_pdf(phi_inv(alpha)))
    }

    /// `(α_n, a_n)` at the current variance.
    pub fn constants(&self) -> (f64, f64) {
        let bt2 = self.beta * self.beta * self.tau2;
        let root = (1.0 + bt2).sqrt();
        let z = phi_inv(self.alpha) / root;
        let alpha_n = phi(z);
        let a_n = self.beta * self.tau2 * std_normal_pdf(z) / (alpha_n * (1.0 - alpha_n) * root);
        (alpha_n, a_n)
    }

    pub fn step(&self, y: u8) -> Self {
        let (alpha_n, a_n) = self.constants();
        let tau2 = (self.tau2 - alpha_n * (1.0 - alpha_n) * a_n * a_n).max(TAU2_FLOOR);
        Self {
            x: self.x - a_n * (f64::from(y) - alpha_n),
            n: self.n + 1,
            tau2,
            alpha_n: Some(alpha_n),
            a_n: Some(a_n),
            ..self.clone()
        }
    }
}

/// Robbins–Monro trajectory with gain `n^(-2/3)` and its running mean.
///
/// Designs happen at the trajectory point `rm.x`; the estimate is the mean
/// of the design points used so far.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RpjState {
    pub rm: RmState,
    pub mean: f64,
}

impl RpjState {
    pub fn new(x1: f64) -> Result<Self> {
        Self::with_gain(x1, Gain::Power { scale: 1.0, exponent: 2.0 / 3.0 })
    }

    pub fn with_gain(x1: f64, gain: Gain) -> Result<Self> {
        Ok(Self { rm: RmState::new(x1, gain)?, mean: x1 })
    }

    pub fn step(&self, y: u8, alpha: f64) -> Self {
        let k = (self.rm.n + 1) as f64;
        let mean = self.mean + (self.rm.x - self.mean) / k;
        Self { rm: self.rm.step(y, alpha), mean }
    }

    /// Mean of the design points used so far, or `x₁` before any step.
    pub fn estimate(&self) -> f64 {
        self.mean
    }
}

/// Hyperparameters of the Wu-MAP prior: `μ ~ N(μ₀, τ²)`, `σ ~ Exp` with mean `ξ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WuPrior {
    pub mu0: f64,
    pub tau: f64,
    pub xi: f64,
}

impl Default for WuPrior {
    fn default() -> Self {
        Self { mu0: 0.0, tau: 3.0, xi: 3.0 }
    }
}

impl WuPrior {
    pub fn validate(&self) -> Result<()> {
        if !self.mu0.is_finite() {
            return Err(Error::invalid("mu0", "must be finite"));
        }
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(Error::invalid("tau", format!("must be positive, got {}", self.tau)));
        }
        if !(self.xi.is_finite() && self.xi > 0.0) {
            return Err(Error::invalid("xi", format!("must be positive, got {}", self.xi)));
        }
        Ok(())
    }
}

/// MAP estimate of the logistic location and scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WuFit {
    pub mu: f64,
    pub sigma: f64,
    /// Log posterior (up to a constant) at the estimate.
    pub objective: f64,
    /// Whether the local search that produced the estimate met its
    /// tolerances; otherwise the estimate is its last iterate.
    pub converged: bool,
}

/// `ln(1 + eˣ)` without overflow.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Unnormalized log posterior of `(μ, σ)` under the logistic model
/// `F(x) = 1 / (1 + exp(−(x − μ)/σ))`. `-∞` for `σ ≤ 0`.
pub fn wu_log_posterior(history: &[(f64, u8)], prior: &WuPrior, mu: f64, sigma: f64) -> f64 {
    if !(sigma > 0.0) {
        return f64::NEG_INFINITY;
    }
    let mut ll = 0.0;
    for &(x, y) in history {
        let z = (x - mu) / sigma;
        ll -= if y == 1 { softplus(-z) } else { softplus(z) };
    }
    let d = (mu - prior.mu0) / prior.tau;
    ll - 0.5 * d * d - sigma / prior.xi
}

/// Search box for the Wu-MAP starting grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WuSearch {
    pub lo: f64,
    pub hi: f64,
    /// Grid nodes per axis.
    pub grid: usize,
    /// Local searches started from the best grid nodes.
    pub starts: usize,
}

impl WuSearch {
    pub fn over(lo: f64, hi: f64) -> Self {
        Self { lo, hi, grid: 5, starts: 1 }
    }
}

/// MAP fit of `(μ, σ)` with `σ ≥ SIGMA_MIN`.
///
/// Scores a `grid × grid` lattice over `μ ∈ [lo, hi]` and geometrically
/// spaced `σ ∈ [SIGMA_MIN, hi − lo]`, then runs Nelder–Mead on `(μ, ln σ)`
/// from the best `starts` nodes and from `warm`, if given. An empty
/// history returns the prior mode `(μ₀, SIGMA_MIN)`.
pub fn wu_map_fit(
    history: &[(f64, u8)],
    prior: &WuPrior,
    search: &WuSearch,
    warm: Option<&WuFit>,
) -> Result<WuFit> {
    prior.validate()?;
    if !(search.lo < search.hi) || search.grid < 2 || search.starts == 0 {
        return Err(Error::invalid("search", format!("invalid search box {search:?}")));
    }
    if history.is_empty() {
        let objective = wu_log_posterior(history, prior, prior.mu0, SIGMA_MIN);
        return Ok(WuFit { mu: prior.mu0, sigma: SIGMA_MIN, objective, converged: true });
    }
    let ln_min = SIGMA_MIN.ln();
    let to_sigma = |t: f64| t.exp().max(SIGMA_MIN);
    let neg = |p: &[f64]| -wu_log_posterior(history, prior, p[0], to_sigma(p[1]));

    let g = search.grid;
    let ln_max = (search.hi - search.lo).ln();
    let mut nodes: Vec<(f64, [f64; 2])> = Vec::with_capacity(g * g + 1);
    for i in 0..g {
        let mu = search.lo + (search.hi - search.lo) * i as f64 / (g - 1) as f64;
        for k in 0..g {
            let t = ln_min + (ln_max - ln_min) * k as f64 / (g - 1) as f64;
            nodes.push((neg(&[mu, t]), [mu, t]));
        }
    }
    nodes.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut starts: Vec<[f64; 2]> = nodes.iter().take(search.starts).map(|n| n.1).collect();
    if let Some(w) = warm {
        starts.push([w.mu, w.sigma.max(SIGMA_MIN).ln()]);
    }

    let mut best: Option<(f64, [f64; 2], bool)> = None;
    for s in &starts {
        let r = nelder_mead(neg, s, &[0.25, 0.5], 1e-9, 1e-6, 1000);
        if !r.value.is_finite() {
            continue;
        }
        if best.is_none_or(|b| r.value < b.0) {
            best = Some((r.value, [r.x[0], r.x[1]], r.converged));
        }
    }
    let (v, p, converged) =
        best.ok_or_else(|| Error::Optimizer("no finite Wu-MAP objective".into()))?;
    Ok(WuFit { mu: p[0], sigma: to_sigma(p[1]), objective: -v, converged })
}

/// `μ̂ + σ̂ ln(α / (1 − α))`.
pub fn wu_map_next(fit: &WuFit, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(fit.mu + fit.sigma * (alpha / (1.0 - alpha)).ln())
}

/// Sequential Wu-MAP design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WuMapState {
    pub history: Vec<(f64, u8)>,
    pub prior: WuPrior,
    pub search: WuSearch,
    pub alpha: f64,
    pub fit: WuFit,
    pub x: f64,
}

impl WuMapState {
    pub fn new(x1: f64, alpha: f64, prior: WuPrior, search: WuSearch) -> Result<Self> {
        check_alpha(alpha)?;
        let fit = wu_map_fit(&[], &prior, &search, None)?;
        Ok(Self { history: Vec::new(), prior, search, alpha, fit, x: x1 })
    }

    pub fn step(&self, y: u8) -> Result<Self> {
        let mut history = self.history.clone();
        history.push((self.x, y));
        let warm = if self.history.is_empty() { None } else { Some(&self.fit) };
        let fit = wu_map_fit(&history, &self.prior, &self.search, warm)?;
        let x = wu_map_next(&fit, self.alpha)?;
        Ok(Self { history, fit, x, ..self.clone() })
    }
}
