//! Continuous responses through the binary machinery.
//!
//! A real response `y` is squashed by `y* = 1/(1 + e^{−b y})` and replaced
//! by `q` binaries whose mean is the nearest `q`-denominator fraction to
//! `y*`. Root finding for an increasing regression function then becomes a
//! median search. The minimum of a convex function is found the same way
//! from the symmetric difference quotient at `x ± c_n`.

use serde::{Deserialize, Serialize};

use crate::competitors::RmjState;
use crate::driver::{Domain, Estimator, Schedule, SessionConfig, SessionState};
use crate::error::{Error, Result};
use crate::numerics::SeededRng;
use crate::testbed::{to_native, to_scaled};

/// Sigmoid scale and binary count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmoidEncoder {
    pub b: f64,
    pub q: u32,
}

impl SigmoidEncoder {
    pub fn new(b: f64, q: u32) -> Result<Self> {
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::invalid("b", format!("must be positive, got {b}")));
        }
        if q == 0 {
            return Err(Error::invalid("q", "must be at least 1"));
        }
        Ok(Self { b, q })
    }

    /// `b = 3/C` for responses known to lie in `(−C, C)`.
    pub fn for_range(c: f64, q: u32) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::invalid("C", format!("must be positive, got {c}")));
        }
        Self::new(3.0 / c, q)
    }

    pub fn squash(&self, y: f64) -> f64 {
        1.0 / (1.0 + (-self.b * y).exp())
    }

    /// Number of ones: the nearest integer to `q·y*`, halves rounded up.
    pub fn ones(&self, y: f64) -> Result<u32> {
        if y.is_nan() {
            return Err(Error::invalid("y", "must not be NaN"));
        }
        let q = self.q as f64;
        Ok((q * self.squash(y) + 0.5).floor().min(q) as u32)
    }

    /// `a` ones followed by `q − a` zeros.
    pub fn encode(&self, y: f64) -> Result<Vec<u8>> {
        let a = self.ones(y)?;
        Ok((0..self.q).map(|i| u8::from(i < a)).collect())
    }
}

impl Default for SigmoidEncoder {
    fn default() -> Self {
        Self { b: 1.0, q: 2 }
    }
}

/// `c_n = c0·n^{−c_exp}` probe half-widths and `γ_n = g0·n^{−g_exp}` gains.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KwProbe {
    pub c0: f64,
    pub c_exp: f64,
    pub g0: f64,
    pub g_exp: f64,
}

impl Default for KwProbe {
    fn default() -> Self {
        Self { c0: 1.0, c_exp: 1.0 / 3.0, g0: 1.0, g_exp: 1.0 }
    }
}

impl KwProbe {
    pub fn validate(&self) -> Result<()> {
        if !(self.c0 > 0.0 && self.g0 > 0.0 && self.c_exp > 0.0 && self.g_exp > 0.0) {
            return Err(Error::invalid("probe", "scales and exponents must be positive"));
        }
        Ok(())
    }

    pub fn c(&self, n: u64) -> f64 {
        self.c0 * (n as f64).powf(-self.c_exp)
    }

    pub fn gamma(&self, n: u64) -> f64 {
        self.g0 * (n as f64).powf(-self.g_exp)
    }
}

/// State of the classical recursion `x_{n+1} = x_n − γ_n (y_{n1} − y_{n2})/c_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KwClassicState {
    pub x: f64,
    pub n: u64,
    pub probe: KwProbe,
}

impl KwClassicState {
    pub fn new(x1: f64, probe: KwProbe) -> Result<Self> {
        probe.validate()?;
        if !x1.is_finite() {
            return Err(Error::invalid("x1", "must be finite"));
        }
        Ok(Self { x: x1, n: 1, probe })
    }

    /// Probe points `x_n + c_n` and `x_n − c_n`.
    pub fn probes(&self) -> (f64, f64) {
        let c = self.probe.c(self.n);
        (self.x + c, self.x - c)
    }
}

/// One classical step with `y1` observed at `x_n + c_n` and `y2` at `x_n − c_n`.
pub fn kw_classic_step(state: &KwClassicState, y1: f64, y2: f64) -> KwClassicState {
    let n = state.n;
    KwClassicState {
        x: state.x - state.probe.gamma(n) * (y1 - y2) / state.probe.c(n),
        n: n + 1,
        probe: state.probe,
    }
}

/// Built-in regression curves on the unit interval with `N(0, 1)` noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Example {
    /// `200 (x − 0.3)³`, root at 0.3.
    Cubic,
    /// `200 (x − 0.3)²`, minimum at 0.3.
    Quadratic,
}

impl Example {
    pub fn mean(&self, x: f64) -> f64 {
        let d = x - 0.3;
        match self {
            Example::Cubic => 200.0 * d * d * d,
            Example::Quadratic => 200.0 * d * d,
        }
    }

    /// The root (cubic) or minimizer (quadratic).
    pub fn target(&self) -> f64 {
        0.3
    }

    pub fn sample(&self, x: f64, rng: &mut SeededRng) -> f64 {
        self.mean(x) + rng.standard_normal()
    }
}

/// Settings shared by the two searches. Points are in `domain` coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub encoder: SigmoidEncoder,
    /// Number of responses (root search) or probe pairs (minimum search).
    pub horizon: usize,
    pub start: f64,
    pub domain: Domain,
    pub schedule: Schedule,
    pub probe: KwProbe,
}

impl Default for SearchConfig {
    /// `b = 1`, `q = 2`, 30 steps from 0.5 on the unit interval, `s = 5`
    /// for ten steps and 9 after.
    fn default() -> Self {
        Self {
            encoder: SigmoidEncoder::default(),
            horizon: 30,
            start: 0.5,
            domain: Domain::unit(),
            schedule: Schedule::TwoStage { first: 5, second: 9, switch_step: 11 },
            probe: KwProbe::default(),
        }
    }
}

impl SearchConfig {
    fn session(&self) -> Result<SessionState> {
        self.probe.validate()?;
        let cfg = SessionConfig::new(0.5)?
            .with_estimator(Estimator::Bayes)
            .with_schedule(self.schedule)
            .with_domain(self.domain)
            .with_start(self.start);
        SessionState::new(cfg)
    }
}

/// Design points `x_1 … x_{H+1}` and what was observed at each of the
/// first `H`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub points: Vec<f64>,
    /// Real response (root search) or difference quotient (minimum search).
    pub responses: Vec<f64>,
    pub binaries: Vec<Vec<u8>>,
    /// Probe pairs `(x + c, x − c)`; empty for root search.
    pub probes: Vec<(f64, f64)>,
    /// Steps whose probe half-width was shrunk to stay in the domain.
    pub clipped: Vec<bool>,
}

impl Trajectory {
    fn new(x1: f64) -> Self {
        Self { points: vec![x1], responses: vec![], binaries: vec![], probes: vec![], clipped: vec![] }
    }

    /// `x_n`, counting from 1.
    pub fn at(&self, n: usize) -> Option<f64> {
        n.checked_sub(1).and_then(|i| self.points.get(i).copied())
    }
}

/// Median search on encoded responses: the `q` binaries of each `y` enter
/// the local model as one step at the same point.
pub fn root_search<F>(mut oracle: F, config: &SearchConfig) -> Result<Trajectory>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut st = config.session()?;
    let mut tr = Trajectory::new(st.current());
    for _ in 0..config.horizon {
        let y = oracle(st.current())?;
        let bits = config.encoder.encode(y)?;
        st = st.advance(&bits)?;
        tr.responses.push(y);
        tr.binaries.push(bits);
        tr.points.push(st.current());
    }
    Ok(tr)
}

/// Symmetric probes around `x`, with the half-width shrunk so that both
/// lie in `[lo, hi]`. Returns `(x + c, x − c, c, clipped)`.
pub fn kw_probes(x: f64, c: f64, domain: &Domain) -> (f64, f64, f64, bool) {
    let room = (x - domain.lo).min(domain.hi - x).max(0.0);
    let h = c.min(room);
    ((x + h).min(domain.hi), (x - h).max(domain.lo), h, h < c)
}

/// Difference quotient `(y(x + c) − y(x − c))/c`; zero when the probes
/// collapse onto an edge.
pub fn difference_quotient(y1: f64, y2: f64, h: f64) -> f64 {
    if h > 0.0 {
        (y1 - y2) / h
    } else {
        0.0
    }
}

/// Minimum search: at step `n` the objective is queried at `x_n + c_n`
/// then `x_n − c_n`, and the encoded difference quotient drives the
/// median search.
pub fn kw_search<F>(mut oracle: F, config: &SearchConfig) -> Result<Trajectory>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut st = config.session()?;
    let mut tr = Trajectory::new(st.current());
    for n in 1..=config.horizon as u64 {
        let (hi, lo, h, clipped) = kw_probes(st.current(), config.probe.c(n), &config.domain);
        let y1 = oracle(hi)?;
        let y2 = oracle(lo)?;
        let yt = difference_quotient(y1, y2, h);
        let bits = config.encoder.encode(yt)?;
        st = st.advance(&bits)?;
        tr.responses.push(yt);
        tr.binaries.push(bits);
        tr.probes.push((hi, lo));
        tr.clipped.push(clipped);
        tr.points.push(st.current());
    }
    Ok(tr)
}

/// Baseline: the efficient Robbins–Monro recursion at level 0.5 with
/// `β = 1`, `τ₁ = 1`, run on `6u − 3` of the scaled point and fed the
/// sign of each response.
fn rmj_baseline(config: &SearchConfig) -> Result<RmjState> {
    RmjState::new(to_native(config.domain.scale(config.start)), 0.5, 1.0, 1.0)
}

fn rmj_point(st: &RmjState, domain: &Domain) -> f64 {
    domain.unscale(to_scaled(st.x))
}

/// Root search by the baseline on `sign(y)`.
pub fn rmj_root_search<F>(mut oracle: F, config: &SearchConfig) -> Result<Trajectory>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut st = rmj_baseline(config)?;
    let mut tr = Trajectory::new(rmj_point(&st, &config.domain));
    for _ in 0..config.horizon {
        let y = oracle(rmj_point(&st, &config.domain))?;
        let bit = u8::from(y > 0.0);
        st = st.step(bit);
        tr.responses.push(y);
        tr.binaries.push(vec![bit]);
        tr.points.push(rmj_point(&st, &config.domain));
    }
    Ok(tr)
}

/// Minimum search by the baseline on the sign of the difference quotient.
pub fn rmj_kw_search<F>(mut oracle: F, config: &SearchConfig) -> Result<Trajectory>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut st = rmj_baseline(config)?;
    let mut tr = Trajectory::new(rmj_point(&st, &config.domain));
    for n in 1..=config.horizon as u64 {
        let x = rmj_point(&st, &config.domain);
        let (hi, lo, h, clipped) = kw_probes(x, config.probe.c(n), &config.domain);
        let y1 = oracle(hi)?;
        let y2 = oracle(lo)?;
        let yt = difference_quotient(y1, y2, h);
        let bit = u8::from(yt > 0.0);
        st = st.step(bit);
        tr.responses.push(yt);
        tr.binaries.push(vec![bit]);
        tr.probes.push((hi, lo));
        tr.clipped.push(clipped);
        tr.points.push(rmj_point(&st, &config.domain));
    }
    Ok(tr)
}

/// Per-step RMSE curves of the two methods over replications.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApplicationStudy {
    pub example: Example,
    pub replications: usize,
    pub seed: u64,
    /// `rmse[n − 1]` is the RMSE of `x_n`.
    pub bsa_rmse: Vec<f64>,
    pub rmj_rmse: Vec<f64>,
}

impl ApplicationStudy {
    pub fn bsa_at(&self, n: usize) -> f64 {
        self.bsa_rmse[n - 1]
    }

    pub fn rmj_at(&self, n: usize) -> f64 {
        self.rmj_rmse[n - 1]
    }
}

/// Runs both methods on `example` (root search for the cubic, minimum
/// search for the quadratic). Replication `r` draws its noise from
/// `SeededRng::derive(seed, [r, method])`.
pub fn application_study(example: Example, config: &SearchConfig, replications: usize, seed: u64) -> Result<ApplicationStudy> {
    let len = config.horizon + 1;
    let (mut bsa, mut rmj) = (vec![0.0; len], vec![0.0; len]);
    let target = example.target();
    for r in 0..replications as u64 {
        let mut rng_a = SeededRng::derive(seed, &[r, 0]);
        let mut rng_b = SeededRng::derive(seed, &[r, 1]);
        let oa = |x: f64| Ok(example.sample(x, &mut rng_a));
        let ob = |x: f64| Ok(example.sample(x, &mut rng_b));
        let (ta, tb) = match example {
            Example::Cubic => (root_search(oa, config)?, rmj_root_search(ob, config)?),
            Example::Quadratic => (kw_search(oa, config)?, rmj_kw_search(ob, config)?),
        };
        for i in 0..len {
            bsa[i] += (ta.points[i] - target).powi(2);
            rmj[i] += (tb.points[i] - target).powi(2);
        }
    }
    let k = replications.max(1) as f64;
    Ok(ApplicationStudy {
        example,
        replications,
        seed,
        bsa_rmse: bsa.iter().map(|v| (v / k).sqrt()).collect(),
        rmj_rmse: rmj.iter().map(|v| (v / k).sqrt()).collect(),
    })
}
