//! The univariate sequential procedure.
//!
//! A [`SessionState`] holds the history in scaled coordinates, the current
//! design point and the per-slice prior bounds. [`SessionState::step`]
//! consumes one outcome (or a batch observed at the same point), fits the
//! local model on the slice containing the current point and moves to the
//! posterior mean or mode.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::local::{Curve1d, LocalPosterior, Observation, PolyCurve, PriorBounds, Subinterval};

/// Version of the serialized session document.
pub const SCHEMA_VERSION: u32 = 1;

/// Level of the credible interval reported with every step.
pub const REPORTED_LEVEL: f64 = 0.9;

/// Lower percentile carried into the slice above on an upward move.
const CARRY_LOW: f64 = 0.05;
/// Upper percentile carried into the slice below on a downward move.
const CARRY_HIGH: f64 = 0.95;

/// Point estimate used as the next design point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimator {
    Bayes,
    Map,
}

impl Estimator {
    /// Posterior mean for `α ∈ [0.2, 0.8]`, mode otherwise.
    pub fn default_for(alpha: f64) -> Self {
        if (0.2..=0.8).contains(&alpha) {
            Estimator::Bayes
        } else {
            Estimator::Map
        }
    }

    pub fn pick(&self, curve: &PolyCurve) -> f64 {
        match self {
            Estimator::Bayes => curve.mean(),
            Estimator::Map => curve.mode(),
        }
    }
}

/// Slice count as a function of the step number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Schedule {
    Fixed { s: u32 },
    TwoStage { first: u32, second: u32, switch_step: u32 },
}

impl Schedule {
    /// The recommended two-stage schedule for `alpha`, switching at step 11.
    ///
    /// | α                         | steps 1–10 | steps ≥ 11 |
    /// |---------------------------|-----------:|-----------:|
    /// | [0.4, 0.6]                |          5 |          9 |
    /// | [0.1, 0.4) ∪ (0.6, 0.9]   |          9 |         17 |
    /// | (0, 0.1) ∪ (0.9, 1)       |         13 |         23 |
    pub fn recommended(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        let (first, second) = if (0.4..=0.6).contains(&alpha) {
            (5, 9)
        } else if (0.1..=0.9).contains(&alpha) {
            (9, 17)
        } else {
            (13, 23)
        };
        Ok(Schedule::TwoStage { first, second, switch_step: 11 })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Schedule::Fixed { s } if s == 0 => Err(Error::invalid("schedule.s", "must be at least 1")),
            Schedule::TwoStage { first, second, .. } if first == 0 || second == 0 => {
                Err(Error::invalid("schedule", "slice counts must be at least 1"))
            }
            Schedule::TwoStage { switch_step, .. } if switch_step < 2 => {
                Err(Error::invalid("schedule.switch_step", "must be at least 2"))
            }
            _ => Ok(()),
        }
    }

    /// Slice count in force at step `n ≥ 1`.
    pub fn s_at(&self, n: u64) -> u32 {
        match *self {
            Schedule::Fixed { s } => s,
            Schedule::TwoStage { first, second, switch_step } => {
                if n < switch_step as u64 {
                    first
                } else {
                    second
                }
            }
        }
    }
}

/// `s` from the recommended schedule at step `n`.
pub fn schedule_s(alpha: f64, n: u64) -> Result<u32> {
    if n == 0 {
        return Err(Error::invalid("n", "steps are numbered from 1"));
    }
    Ok(Schedule::recommended(alpha)?.s_at(n))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid("alpha", format!("must lie in (0, 1), got {alpha}")));
    }
    Ok(())
}

/// Affine map between an original search interval `(lo, hi)` and `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub lo: f64,
    pub hi: f64,
}

impl Domain {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::invalid("domain", format!("need finite lo < hi, got ({lo}, {hi})")));
        }
        Ok(Self { lo, hi })
    }

    pub fn unit() -> Self {
        Self { lo: 0.0, hi: 1.0 }
    }

    pub fn scale(&self, x: f64) -> f64 {
        (x - self.lo) / (self.hi - self.lo)
    }

    pub fn unscale(&self, u: f64) -> f64 {
        self.lo + u * (self.hi - self.lo)
    }
}

/// `(x − lo)/(hi − lo)`.
pub fn scale(x: f64, lo: f64, hi: f64) -> Result<f64> {
    Ok(Domain::new(lo, hi)?.scale(x))
}

/// `lo + u (hi − lo)`.
pub fn unscale(u: f64, lo: f64, hi: f64) -> Result<f64> {
    Ok(Domain::new(lo, hi)?.unscale(u))
}

/// Slice of a scaled point; `x ≤ 0` is rejected.
pub fn locate(x: f64, s: u32) -> Result<Subinterval> {
    Subinterval::locate(x, s)
}

/// Keeps a proposed point inside `(0, 1)`: the ends map to the midpoints of
/// the outermost slices of the next grid.
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

/// Everything the posterior at the current point depends on besides the
/// history.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PosteriorContext {
    pub sub: Subinterval,
    pub bounds: PriorBounds,
}

/// Session settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub alpha: f64,
    pub estimator: Estimator,
    pub schedule: Schedule,
    pub domain: Domain,
    /// Starting point in original coordinates.
    pub start: f64,
}

impl SessionConfig {
    /// Recommended schedule and estimator, unit domain, start at 0.5.
    pub fn new(alpha: f64) -> Result<Self> {
        Ok(Self {
            alpha,
            estimator: Estimator::default_for(alpha),
            schedule: Schedule::recommended(alpha)?,
            domain: Domain::unit(),
            start: 0.5,
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

    /// Sets the domain and moves the start to its midpoint.
    pub fn with_domain(mut self, d: Domain) -> Self {
        self.domain = d;
        self.start = 0.5 * (d.lo + d.hi);
        self
    }

    pub fn with_start(mut self, x: f64) -> Self {
        self.start = x;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        self.schedule.validate()?;
        Domain::new(self.domain.lo, self.domain.hi)?;
        let u = self.domain.scale(self.start);
        if !(u >= 0.0 && u <= 1.0) {
            return Err(Error::invalid("start", format!("{} lies outside the domain", self.start)));
        }
        Ok(())
    }
}

/// Posterior summary for the current point and the recommended next point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepResult {
    /// Step number whose outcome the next point awaits.
    pub n: u64,
    pub next_scaled: f64,
    pub next: f64,
    pub mean: f64,
    pub mode: f64,
    /// Equal-tail 90% credible interval, scaled.
    pub interval: (f64, f64),
    pub sub: Subinterval,
    pub theta0: f64,
    pub m: usize,
}

/// The full state of a univariate session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionState {
    pub schema_version: u32,
    pub dimension: u32,
    pub config: SessionConfig,
    /// Observations in scaled coordinates, oldest first.
    pub history: Vec<Observation>,
    /// Slice count the bounds map refers to.
    pub bounds_s: u32,
    /// Slice index → prior bounds; absent slices use `(0, 1)`.
    pub bounds: BTreeMap<u32, PriorBounds>,
    /// Current design point, scaled.
    pub x: f64,
    /// Step number of the current point, from 1.
    pub n: u64,
    /// Posterior that produced the current point; `None` before the first
    /// outcome.
    pub context: Option<PosteriorContext>,
}

impl SessionState {
    pub fn new(config: SessionConfig) -> Result<Self> {
        config.validate()?;
        let s = config.schedule.s_at(1);
        Ok(Self {
            schema_version: SCHEMA_VERSION,
            dimension: 1,
            config,
            history: Vec::new(),
            bounds_s: s,
            bounds: BTreeMap::new(),
            x: interior(config.domain.scale(config.start), s),
            n: 1,
            context: None,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.config.alpha
    }

    /// Current design point in original coordinates.
    pub fn current(&self) -> f64 {
        self.config.domain.unscale(self.x)
    }

    /// Stored bounds of slice `t` under the current grid.
    pub fn bounds_for(&self, t: u32) -> PriorBounds {
        self.bounds.get(&t).copied().unwrap_or(PriorBounds {
            rho_l: 0.0,
            rho_u: 1.0,
            alpha: self.config.alpha,
        })
    }

    fn check(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::invalid(
                "schema_version",
                format!("expected {SCHEMA_VERSION}, got {}", self.schema_version),
            ));
        }
        if self.dimension != 1 {
            return Err(Error::invalid("dimension", "a univariate state has dimension 1"));
        }
        if !(self.x > 0.0 && self.x <= 1.0) {
            return Err(Error::invalid("x", format!("must lie in (0, 1], got {}", self.x)));
        }
        Ok(())
    }

    /// Records `y` at the current point and moves to the next one.
    pub fn step(&self, y: u8) -> Result<(SessionState, StepResult)> {
        self.step_batch(&[y])
    }

    /// Records several outcomes observed at the current point as one step.
    pub fn step_batch(&self, ys: &[u8]) -> Result<(SessionState, StepResult)> {
        let (next, curve) = self.advance_inner(ys)?;
        let result = next.summarize(&curve)?;
        Ok((next, result))
    }

    /// [`step_batch`](Self::step_batch) without the summary.
    pub fn advance(&self, ys: &[u8]) -> Result<SessionState> {
        self.advance_inner(ys).map(|(s, _)| s)
    }

    fn advance_inner(&self, ys: &[u8]) -> Result<(SessionState, PolyCurve)> {
        self.check()?;
        if ys.is_empty() {
            return Err(Error::invalid("y", "at least one outcome is required"));
        }
        let mut history = self.history.clone();
        for &y in ys {
            history.push(Observation::new(self.x, y)?);
        }
        let sched = &self.config.schedule;
        let s = sched.s_at(self.n);
        let mut bounds = if s == self.bounds_s { self.bounds.clone() } else { BTreeMap::new() };

        let sub = Subinterval::locate(self.x, s)?;
        let prior = bounds.get(&sub.index).copied().unwrap_or(PriorBounds {
            rho_l: 0.0,
            rho_u: 1.0,
            alpha: self.config.alpha,
        });
        let lp = LocalPosterior::from_history(sub, prior, &history)?;
        let curve = lp.posterior_theta()?;

        let s_next = sched.s_at(self.n + 1);
        let x_next = interior(self.config.estimator.pick(&curve), s_next);
        if s_next == s {
            let landing = Subinterval::locate(x_next, s)?;
            let stored = bounds.get(&landing.index).copied().unwrap_or(PriorBounds {
                rho_l: 0.0,
                rho_u: 1.0,
                alpha: self.config.alpha,
            });
            if let Some(b) = carry_over(&lp, landing.index, stored)? {
                bounds.insert(landing.index, b);
            }
        } else {
            bounds.clear();
        }

        let next = SessionState {
            schema_version: SCHEMA_VERSION,
            dimension: 1,
            config: self.config,
            history,
            bounds_s: s_next,
            bounds,
            x: x_next,
            n: self.n + 1,
            context: Some(PosteriorContext { sub, bounds: prior }),
        };
        Ok((next, curve))
    }

    /// The local model behind the current point: the last fitted posterior,
    /// or the prior on the starting slice before any outcome.
    pub fn local_model(&self) -> Result<LocalPosterior> {
        self.check()?;
        match self.context {
            Some(c) => LocalPosterior::from_history(c.sub, c.bounds, &self.history),
            None => {
                let sub = Subinterval::locate(self.x, self.bounds_s)?;
                LocalPosterior::new(sub, self.bounds_for(sub.index), Vec::new())
            }
        }
    }

    /// Summary of the current recommendation without consuming an outcome.
    pub fn estimate(&self) -> Result<StepResult> {
        let curve = self.local_model()?.posterior_theta()?;
        self.summarize(&curve)
    }

    fn summarize(&self, curve: &PolyCurve) -> Result<StepResult> {
        let lp_sub = match self.context {
            Some(c) => c.sub,
            None => Subinterval::locate(self.x, self.bounds_s)?,
        };
        let prior = match self.context {
            Some(c) => c.bounds,
            None => self.bounds_for(lp_sub.index),
        };
        let m = self.history.iter().filter(|o| lp_sub.contains_strictly(o.x)).count();
        Ok(StepResult {
            n: self.n,
            next_scaled: self.x,
            next: self.current(),
            mean: curve.mean(),
            mode: curve.mode(),
            interval: curve.credible_interval(REPORTED_LEVEL)?,
            sub: lp_sub,
            theta0: crate::local::theta0(&prior, &lp_sub),
            m,
        })
    }
}

/// Bounds for slice `to` after leaving the slice of `lp`, or `None` when the
/// move is not to an adjacent slice. The carried percentile only tightens
/// the stored bound; a result that no longer brackets `α` resets the slice.
pub fn carry_over(lp: &LocalPosterior, to: u32, stored: PriorBounds) -> Result<Option<PriorBounds>> {
    let from = lp.subinterval().index;
    let alpha = stored.alpha;
    let (rho_l, rho_u) = if to == from + 1 {
        let q = lp.posterior_rho1()?.quantile(CARRY_LOW)?;
        (stored.rho_l.max(q), stored.rho_u)
    } else if to + 1 == from {
        let q = lp.posterior_rho0()?.quantile(CARRY_HIGH)?;
        (stored.rho_l, stored.rho_u.min(q))
    } else {
        return Ok(None);
    };
    Ok(Some(
        PriorBounds::new(rho_l, rho_u, alpha).unwrap_or(PriorBounds { rho_l: 0.0, rho_u: 1.0, alpha }),
    ))
}
