//! Multivariate quantile search on the unit hypercube.
//!
//! The grid of `s` slices per coordinate splits `(0, 1]^p` into cells. On
//! the cell holding the current point `x_n` the response surface is
//! approximated, separately for each coordinate `j`, by a hyperplane
//! through `(x_n` with its `j`th entry replaced by `θ_j, α)`. Given the
//! remaining slopes `β̃₋ⱼ` the posterior of `θ_j` has the univariate form,
//! with the prior range and level shifted by the other coordinates. The
//! slopes are averaged out over a fixed grid (`p = 2`) or uniform draws
//! (`p > 2`), and a user function `U` picks one of the `p` candidate moves.

use serde::{Deserialize, Serialize};

use crate::driver::{Estimator, Schedule};
use crate::error::{Error, Result};
use crate::local::{theta_curve, Density1d, LineFactor, PolyCurve, PosteriorCurve, PriorBounds, Subinterval};
use crate::numerics::SeededRng;
use crate::testbed::{simulate_response, Model};

/// Version of the serialized multivariate session document.
pub const MV_SCHEMA_VERSION: u32 = 1;

/// Slope nodes per coordinate for `p = 2`: `i·u₋ⱼ/8`, `i = 1..=7`.
pub const GRID_NODES: u32 = 7;

/// Default number of uniform slope draws for `p > 2`.
pub const DEFAULT_DRAWS: usize = 64;

/// Prior bounds of the cell values; the multivariate search keeps them at
/// `(0, 1)` on every cell.
pub type MvPriorBounds = PriorBounds;

/// The cell `∏ ((t_j − 1)/s, t_j/s]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Hypercube {
    pub s: u32,
    pub t: Vec<u32>,
}

impl Hypercube {
    pub fn new(s: u32, t: Vec<u32>) -> Result<Self> {
        if t.is_empty() {
            return Err(Error::invalid("t", "dimension must be at least 1"));
        }
        for &tj in &t {
            Subinterval::new(s, tj)?;
        }
        Ok(Self { s, t })
    }

    /// Cell holding `x ∈ (0, 1]^p`: `t_j = ⌈x_j s⌉`.
    pub fn locate(x: &[f64], s: u32) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::invalid("x", "dimension must be at least 1"));
        }
        let t = x.iter().map(|&xj| Subinterval::locate(xj, s).map(|sub| sub.index)).collect::<Result<_>>()?;
        Self::new(s, t)
    }

    pub fn dimension(&self) -> usize {
        self.t.len()
    }

    /// Slice of coordinate `j`.
    pub fn axis(&self, j: usize) -> Subinterval {
        Subinterval { s: self.s, index: self.t[j] }
    }

    /// Vertex `v_a`, `a = 0..=p`: `v_0 = (t − 1)/s`, `v_a = v_{a−1} + e_a/s`.
    pub fn vertex(&self, a: usize) -> Vec<f64> {
        let s = self.s as f64;
        self.t
            .iter()
            .enumerate()
            .map(|(k, &tk)| if k < a { tk as f64 / s } else { (tk - 1) as f64 / s })
            .collect()
    }

    /// The `p + 1` helix vertices.
    pub fn vertices(&self) -> Vec<Vec<f64>> {
        (0..=self.dimension()).map(|a| self.vertex(a)).collect()
    }

    /// Half-open membership, as in the cell definition.
    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dimension()
            && x.iter().enumerate().all(|(j, &xj)| {
                let ax = self.axis(j);
                xj > ax.v0() && xj <= ax.v1()
            })
    }
}

/// A multivariate design point with its binary response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MvObservation {
    pub x: Vec<f64>,
    pub y: u8,
}

impl MvObservation {
    pub fn new(x: Vec<f64>, y: u8) -> Result<Self> {
        if x.is_empty() || x.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("x", "must be a non-empty finite vector"));
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

/// The model along coordinate `j` on one cell with the other slopes held
/// fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalModel {
    j: usize,
    cube: Hypercube,
    x_n: Vec<f64>,
    bounds: MvPriorBounds,
    members: Vec<MvObservation>,
    beta: Vec<f64>,
    alpha0: f64,
    alpha1: f64,
    theta0: f64,
}

impl ConditionalModel {
    /// `beta` has one entry per coordinate; entry `j` is ignored. Members
    /// must lie in the cell.
    pub fn new(
        j: usize,
        cube: Hypercube,
        x_n: Vec<f64>,
        bounds: MvPriorBounds,
        members: Vec<MvObservation>,
        mut beta: Vec<f64>,
    ) -> Result<Self> {
        let p = cube.dimension();
        PriorBounds::new(bounds.rho_l, bounds.rho_u, bounds.alpha)?;
        if j >= p {
            return Err(Error::invalid("j", format!("coordinate {j} out of range for p = {p}")));
        }
        if beta.len() != p {
            return Err(Error::invalid("beta", format!("need {p} entries, got {}", beta.len())));
        }
        if !cube.contains(&x_n) {
            return Err(Error::invalid("x_n", "current point is not in the cell"));
        }
        if members.iter().any(|o| !cube.contains(&o.x) || o.y > 1) {
            return Err(Error::invalid("members", "every member must lie in the cell"));
        }
        beta[j] = 0.0;
        if beta.iter().enumerate().any(|(a, &b)| a != j && !(b > 0.0 && b.is_finite())) {
            return Err(Error::invalid("beta", "slopes must be positive"));
        }
        let s = cube.s as f64;
        let (v0, vp) = (cube.vertex(0), cube.vertex(p));
        let shift = |v: &[f64]| -> f64 { (0..p).filter(|&a| a != j).map(|a| beta[a] * s * (v[a] - x_n[a])).sum() };
        let alpha0 = bounds.alpha + shift(&v0);
        let alpha1 = bounds.alpha + shift(&vp);
        if !(alpha0 > bounds.rho_l && alpha1 < bounds.rho_u) {
            return Err(Error::invalid("beta", "slopes lie outside the prior simplex"));
        }
        let (ku, kl) = (bounds.rho_u - alpha1, alpha0 - bounds.rho_l);
        let theta0 = (ku * v0[j] + kl * vp[j]) / (ku + kl);
        let mut members = members;
        members.sort_by(|a, b| {
            a.x.iter()
                .zip(&b.x)
                .map(|(u, v)| u.total_cmp(v))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.y.cmp(&b.y))
        });
        Ok(Self { j, cube, x_n, bounds, members, beta, alpha0, alpha1, theta0 })
    }

    /// Members are the history points inside the cell of `x_n`.
    pub fn from_history(
        j: usize,
        cube: Hypercube,
        x_n: Vec<f64>,
        bounds: MvPriorBounds,
        history: &[MvObservation],
        beta: Vec<f64>,
    ) -> Result<Self> {
        let members = history.iter().filter(|o| cube.contains(&o.x)).cloned().collect();
        Self::new(j, cube, x_n, bounds, members, beta)
    }

    pub fn coordinate(&self) -> usize {
        self.j
    }

    pub fn m(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self) -> &[MvObservation] {
        &self.members
    }

    /// `α₀ⱼ`, the hyperplane value at `v_0` when `θ_j` sits at its slice
    /// start.
    pub fn alpha0(&self) -> f64 {
        self.alpha0
    }

    /// `α₁ⱼ`.
    pub fn alpha1(&self) -> f64 {
        self.alpha1
    }

    /// Break `θ₀ⱼ` of `η_j`.
    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    fn s(&self) -> f64 {
        self.cube.s as f64
    }

    fn ku(&self) -> f64 {
        self.bounds.rho_u - self.alpha1
    }

    fn kl(&self) -> f64 {
        self.alpha0 - self.bounds.rho_l
    }

    /// `η_j(θ_j)`, the largest `β̃_j` compatible with the prior range.
    pub fn eta(&self, theta: f64) -> f64 {
        let ax = self.cube.axis(self.j);
        if theta <= self.theta0 {
            self.ku() / (self.s() * (ax.v1() - theta))
        } else {
            self.kl() / (self.s() * (theta - ax.v0()))
        }
    }

    /// `α_i = α + Σ_{a≠j} β̃_a s (x_ia − x_na)`.
    pub fn alpha_i(&self, o: &MvObservation) -> f64 {
        let s = self.s();
        self.bounds.alpha
            + (0..self.cube.dimension())
                .filter(|&a| a != self.j)
                .map(|a| self.beta[a] * s * (o.x[a] - self.x_n[a]))
                .sum::<f64>()
    }

    /// Conditional posterior of `θ_j` on `(0, 1)`.
    pub fn posterior_theta(&self) -> Result<PolyCurve> {
        let factors: Vec<LineFactor> = self
            .members
            .iter()
            .map(|o| LineFactor { x: o.x[self.j], sign: o.sign(), a: 1.0 - o.y as f64 + o.sign() * self.alpha_i(o) })
            .collect();
        theta_curve(&self.cube.axis(self.j), self.ku(), self.kl(), self.theta0, &factors)
    }

    /// Support `(β̃ⱼ₀, β̃ⱼ₁)` of the conditional posterior of `β̃_j`.
    pub fn beta_range(&self) -> (f64, f64) {
        let ax = self.cube.axis(self.j);
        let s = self.s();
        let lo = (self.ku() / (s * ax.v1())).max(self.kl() / (s * (1.0 - ax.v0())));
        let rest: f64 = (0..self.cube.dimension()).filter(|&a| a != self.j).map(|a| self.beta[a]).sum();
        (lo, self.bounds.range() - rest)
    }

    /// `(ℓ_j, u_j)`, the range of `θ_j` given `β̃_j`.
    pub fn theta_range(&self, beta_j: f64) -> (f64, f64) {
        let ax = self.cube.axis(self.j);
        let s = self.s();
        (ax.v1() - self.ku() / (s * beta_j), ax.v0() + self.kl() / (s * beta_j))
    }

    /// `ln β̃_j + ln ∫_ℓ^u ∏ L_i dθ_j`.
    pub fn ln_beta_kernel(&self, beta_j: f64) -> f64 {
        if !(beta_j > 0.0) {
            return f64::NEG_INFINITY;
        }
        let (l, u) = self.theta_range(beta_j);
        let s = self.s();
        let ms = &self.members;
        let alphas: Vec<f64> = ms.iter().map(|o| self.alpha_i(o)).collect();
        beta_j.ln()
            + crate::local::ln_product_integral(
                ms.len(),
                |i, z| {
                    let o = &ms[i];
                    1.0 - o.y as f64 + o.sign() * (alphas[i] + s * beta_j * (o.x[self.j] - z))
                },
                l,
                u,
                0,
            )
    }

    /// Conditional posterior of `β̃_j`.
    pub fn posterior_beta(&self) -> Result<PosteriorCurve<MvBetaDensity>> {
        let (lo, hi) = self.beta_range();
        if lo >= hi {
            return Err(Error::DegeneratePosterior(format!("β̃ support is empty: ({lo}, {hi})")));
        }
        PosteriorCurve::new(MvBetaDensity(self.clone()))
    }
}

/// Conditional density of `β̃_j` for [`PosteriorCurve`].
#[derive(Debug, Clone)]
pub struct MvBetaDensity(pub ConditionalModel);

impl Density1d for MvBetaDensity {
    fn support(&self) -> (f64, f64) {
        self.0.beta_range()
    }
    fn ln_density(&self, x: f64) -> f64 {
        self.0.ln_beta_kernel(x)
    }
}

/// `u₋ⱼ` for `p = 2`: the largest other slope keeping the prior simplex
/// non-empty.
pub fn slope_bound(j: usize, cube: &Hypercube, x_n: &[f64], bounds: &MvPriorBounds) -> Result<f64> {
    if cube.dimension() != 2 || j > 1 {
        return Err(Error::invalid("j", "the slope bound is defined for p = 2"));
    }
    Ok(box_bound(1 - j, cube, x_n, bounds))
}

/// Largest `β̃_a` allowed by each simplex constraint on its own.
fn box_bound(a: usize, cube: &Hypercube, x_n: &[f64], b: &MvPriorBounds) -> f64 {
    let s = cube.s as f64;
    let ax = cube.axis(a);
    let lower = (b.alpha - b.rho_l) / (s * (x_n[a] - ax.v0()));
    let upper = (b.rho_u - b.alpha) / (s * (ax.v1() - x_n[a]));
    lower.min(upper)
}

/// Settings for averaging over the other slopes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Averaging {
    /// Uniform draws per coordinate when `p > 2`.
    pub draws: usize,
    /// Master seed of the draws; each step and coordinate derives its own
    /// stream.
    pub seed: u64,
}

impl Default for Averaging {
    fn default() -> Self {
        Self { draws: DEFAULT_DRAWS, seed: 0 }
    }
}

/// Slope vectors (entry `j` zero) over which coordinate `j` is averaged:
/// none to average for `p = 1`, the fixed grid for `p = 2`, and uniform
/// draws from the simplex by rejection from its bounding box for `p > 2`.
pub fn slope_nodes(
    j: usize,
    cube: &Hypercube,
    x_n: &[f64],
    bounds: &MvPriorBounds,
    avg: &Averaging,
    step: u64,
) -> Result<Vec<Vec<f64>>> {
    let p = cube.dimension();
    match p {
        1 => Ok(vec![vec![0.0]]),
        2 => {
            let u = slope_bound(j, cube, x_n, bounds)?;
            if !(u > 0.0 && u.is_finite()) {
                return Err(Error::DegeneratePosterior(format!("slope simplex is empty (u = {u})")));
            }
            Ok((1..=GRID_NODES)
                .map(|i| {
                    let mut b = vec![0.0; 2];
                    b[1 - j] = i as f64 * u / (GRID_NODES + 1) as f64;
                    b
                })
                .collect())
        }
        _ => {
            if avg.draws == 0 {
                return Err(Error::invalid("draws", "must be at least 1"));
            }
            let s = cube.s as f64;
            let (v0, vp) = (cube.vertex(0), cube.vertex(p));
            let boxes: Vec<f64> =
                (0..p).map(|a| if a == j { 0.0 } else { box_bound(a, cube, x_n, bounds) }).collect();
            let mut rng = SeededRng::derive(avg.seed, &[step, j as u64]);
            let mut out = Vec::with_capacity(avg.draws);
            let limit = 10_000 * avg.draws;
            let mut tries = 0;
            while out.len() < avg.draws {
                if tries == limit {
                    return Err(Error::DegeneratePosterior("no slope draw accepted from the simplex".into()));
                }
                tries += 1;
                let b: Vec<f64> = boxes.iter().map(|&w| w * rng.uniform_open()).collect();
                let lo: f64 = (0..p).map(|a| b[a] * s * (x_n[a] - v0[a])).sum();
                let hi: f64 = (0..p).map(|a| b[a] * s * (vp[a] - x_n[a])).sum();
                if lo < bounds.alpha - bounds.rho_l && hi < bounds.rho_u - bounds.alpha {
                    out.push(b);
                }
            }
            Ok(out)
        }
    }
}

/// `θ̃_j`: the conditional mean (Bayes) or mode (MAP) of `θ_j`, averaged
/// over [`slope_nodes`] in order.
pub fn averaged_theta(
    j: usize,
    cube: &Hypercube,
    x_n: &[f64],
    bounds: &MvPriorBounds,
    history: &[MvObservation],
    estimator: Estimator,
    avg: &Averaging,
    step: u64,
) -> Result<f64> {
    let members: Vec<MvObservation> = history.iter().filter(|o| cube.contains(&o.x)).cloned().collect();
    let nodes = slope_nodes(j, cube, x_n, bounds, avg, step)?;
    let mut acc = 0.0;
    for beta in &nodes {
        let cm = ConditionalModel::new(j, cube.clone(), x_n.to_vec(), *bounds, members.clone(), beta.clone())?;
        acc += estimator.pick(&cm.posterior_theta()?);
    }
    Ok(acc / nodes.len() as f64)
}

/// Objective used to pick one of the `p` candidate moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UFunction {
    /// `‖x‖₂`.
    Euclidean,
    /// Distance from `x` to the diagonal `x_1 = … = x_p`.
    Diagonal,
}

impl UFunction {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            UFunction::Euclidean => x.iter().map(|v| v * v).sum::<f64>().sqrt(),
            UFunction::Diagonal => {
                let mean = x.iter().sum::<f64>() / x.len() as f64;
                x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>().sqrt()
            }
        }
    }
}

/// Index of the candidate minimizing `u`; ties go to the smallest index.
pub fn select_candidate<F: Fn(&[f64]) -> f64>(candidates: &[Vec<f64>], u: F) -> Result<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (j, c) in candidates.iter().enumerate() {
        let v = u(c);
        if v.is_nan() {
            return Err(Error::invalid("U", format!("objective is NaN at candidate {j}")));
        }
        if best.is_none_or(|(_, b)| v < b) {
            best = Some((j, v));
        }
    }
    best.map(|b| b.0).ok_or_else(|| Error::invalid("candidates", "no candidates"))
}

/// MAP for `α ≤ 0.25` or `α ≥ 0.75`, posterior mean otherwise.
pub fn default_estimator(alpha: f64) -> Estimator {
    if alpha <= 0.25 || alpha >= 0.75 {
        Estimator::Map
    } else {
        Estimator::Bayes
    }
}

/// Multivariate session settings. Coordinates are scaled to `(0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MvConfig {
    pub alpha: f64,
    pub dimension: u32,
    pub estimator: Estimator,
    pub schedule: Schedule,
    pub u: UFunction,
    pub start: Vec<f64>,
    pub rho_l: f64,
    pub rho_u: f64,
    pub averaging: Averaging,
}

impl MvConfig {
    /// Recommended schedule and estimator, Euclidean `U`, start at the
    /// centre, prior range `(0, 1)`.
    pub fn new(alpha: f64, dimension: u32) -> Result<Self> {
        Ok(Self {
            alpha,
            dimension,
            estimator: default_estimator(alpha),
            schedule: Schedule::recommended(alpha)?,
            u: UFunction::Euclidean,
            start: vec![0.5; dimension as usize],
            rho_l: 0.0,
            rho_u: 1.0,
            averaging: Averaging::default(),
        })
    }

    pub fn with_estimator(mut self, e: Estimator) -> Self {
        self.estimator = e;
        self
    }

    pub fn with_schedule(mut self, s: Schedule) -> Self {
        self.schedule = s;
        self
    }

    pub fn with_u(mut self, u: UFunction) -> Self {
        self.u = u;
        self
    }

    pub fn with_start(mut self, x: Vec<f64>) -> Self {
        self.start = x;
        self
    }

    pub fn with_averaging(mut self, a: Averaging) -> Self {
        self.averaging = a;
        self
    }

    pub fn bounds(&self) -> Result<MvPriorBounds> {
        PriorBounds::new(self.rho_l, self.rho_u, self.alpha)
    }

    pub fn validate(&self) -> Result<()> {
        self.bounds()?;
        self.schedule.validate()?;
        if self.dimension == 0 {
            return Err(Error::invalid("dimension", "must be at least 1"));
        }
        if self.start.len() != self.dimension as usize {
            return Err(Error::invalid("start", format!("need {} coordinates", self.dimension)));
        }
        if self.start.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
            return Err(Error::invalid("start", "coordinates must lie in [0, 1]"));
        }
        if self.dimension > 2 && self.averaging.draws == 0 {
            return Err(Error::invalid("averaging.draws", "must be at least 1"));
        }
        Ok(())
    }
}

/// Output of one multivariate step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MvStepResult {
    /// Step number whose outcome the next point awaits.
    pub n: u64,
    pub cube: Hypercube,
    pub m: usize,
    /// `θ̃_j` per coordinate before edge handling.
    pub theta: Vec<f64>,
    pub candidates: Vec<Vec<f64>>,
    /// Index of the chosen candidate.
    pub chosen: usize,
    pub next: Vec<f64>,
}

/// The full state of a multivariate session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MvSessionState {
    pub schema_version: u32,
    pub dimension: u32,
    pub config: MvConfig,
    pub history: Vec<MvObservation>,
    /// Current design point.
    pub x: Vec<f64>,
    /// Step number of the current point, from 1.
    pub n: u64,
}

/// Keeps a coordinate inside `(0, 1)`; the ends map to the midpoints of
/// the outermost slices.
fn interior(x: f64, s: u32) -> f64 {
    let half = 0.5 / s as f64;
    if x <= 0.0 {
        half
    } else if x >= 1.0 {
        1.0 - half
    } else {
        x
    }
}

impl MvSessionState {
    pub fn new(config: MvConfig) -> Result<Self> {
        config.validate()?;
        let s = config.schedule.s_at(1);
        let x = config.start.iter().map(|&v| interior(v, s)).collect();
        Ok(Self { schema_version: MV_SCHEMA_VERSION, dimension: config.dimension, config, history: Vec::new(), x, n: 1 })
    }

    fn check(&self) -> Result<()> {
        if self.schema_version != MV_SCHEMA_VERSION {
            return Err(Error::invalid("schema_version", format!("expected {MV_SCHEMA_VERSION}")));
        }
        if self.dimension != self.config.dimension || self.x.len() != self.dimension as usize {
            return Err(Error::invalid("dimension", "state and config disagree"));
        }
        Ok(())
    }

    /// Records `y` at the current point and moves to the next one.
    pub fn step(&self, y: u8) -> Result<(MvSessionState, MvStepResult)> {
        self.step_batch(&[y])
    }

    /// Records several outcomes at the current point as one step.
    pub fn step_batch(&self, ys: &[u8]) -> Result<(MvSessionState, MvStepResult)> {
        self.check()?;
        if ys.is_empty() {
            return Err(Error::invalid("y", "at least one outcome is required"));
        }
        let mut history = self.history.clone();
        for &y in ys {
            history.push(MvObservation::new(self.x.clone(), y)?);
        }
        let cfg = &self.config;
        let s = cfg.schedule.s_at(self.n);
        let s_next = cfg.schedule.s_at(self.n + 1);
        let cube = Hypercube::locate(&self.x, s)?;
        let bounds = cfg.bounds()?;
        let p = self.x.len();
        let mut theta = Vec::with_capacity(p);
        let mut candidates = Vec::with_capacity(p);
        for j in 0..p {
            let th = averaged_theta(j, &cube, &self.x, &bounds, &history, cfg.estimator, &cfg.averaging, self.n)?;
            let mut c = self.x.clone();
            c[j] = interior(th, s_next);
            theta.push(th);
            candidates.push(c);
        }
        let chosen = select_candidate(&candidates, |c| cfg.u.eval(c))?;
        let next_x = candidates[chosen].clone();
        let m = history.iter().filter(|o| cube.contains(&o.x)).count();
        let next = MvSessionState {
            schema_version: MV_SCHEMA_VERSION,
            dimension: self.dimension,
            config: cfg.clone(),
            history,
            x: next_x.clone(),
            n: self.n + 1,
        };
        Ok((next, MvStepResult { n: self.n + 1, cube, m, theta, candidates, chosen, next: next_x }))
    }

    pub fn advance(&self, ys: &[u8]) -> Result<MvSessionState> {
        self.step_batch(ys).map(|r| r.0)
    }
}

/// Runs `steps` simulated outcomes from a bivariate testbed model and
/// returns the design points `x_1 … x_{steps+1}`.
pub fn simulate_path(config: &MvConfig, model: Model, steps: usize, rng: &mut SeededRng) -> Result<Vec<Vec<f64>>> {
    if model.dimension() != config.dimension as usize {
        return Err(Error::invalid("model", format!("{model} does not have dimension {}", config.dimension)));
    }
    let mut st = MvSessionState::new(config.clone())?;
    let mut path = vec![st.x.clone()];
    for _ in 0..steps {
        let y = simulate_response(model, &st.x, config.alpha, rng)?;
        st = st.advance(&[y])?;
        path.push(st.x.clone());
    }
    Ok(path)
}
