//! Session lifecycle on top of the library: create, advance, summarize and
//! replay. Everything here is synchronous and free of I/O.

use bsa::applications::{difference_quotient, kw_probes, KwProbe, SigmoidEncoder};
use bsa::driver::{Domain, Estimator, Schedule, SessionConfig, SessionState, StepResult};
use bsa::local::Curve1d;
use bsa::mv::{Hypercube, MvConfig, MvSessionState, MvStepResult};
use bsa::numerics::SeededRng;
use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::api::{
    CreateSession, Mode, Outcome, OutcomeRequest, PosteriorSample, Recommendation, Region, SessionDoc, SessionRecord,
    SimSource, Simulation, Start, Status, StepRecord, Transcript, API_SCHEMA_VERSION,
};
use crate::error::{Result, ServiceError};

/// Schedule of the root and minimum searches unless overridden.
const SEARCH_SCHEDULE: Schedule = Schedule::TwoStage { first: 5, second: 9, switch_step: 11 };

impl SessionRecord {
    /// Validates `req` and builds a fresh session whose recommendation is
    /// the starting point.
    pub fn create(id: String, req: CreateSession, now: DateTime<Utc>) -> Result<Self> {
        let mode = req.mode;
        let dimension = req.dimension.unwrap_or(1);
        if dimension == 0 {
            return Err(ServiceError::invalid("dimension", "must be at least 1"));
        }
        let alpha = match (mode, req.alpha) {
            (Mode::Quantile, Some(a)) => a,
            (Mode::Quantile, None) => return Err(ServiceError::invalid("alpha", "required in quantile mode")),
            (_, None) => 0.5,
            (_, Some(a)) if a == 0.5 => a,
            (_, Some(a)) => {
                return Err(ServiceError::invalid("alpha", format!("root and minimum searches run at 0.5, got {a}")))
            }
        };
        if mode != Mode::Quantile && dimension != 1 {
            return Err(ServiceError::invalid("dimension", "root and minimum searches are univariate"));
        }
        let encoder = match mode {
            Mode::Quantile if req.encoder.is_some() => {
                return Err(ServiceError::invalid("encoder", "not used in quantile mode"));
            }
            Mode::Quantile => None,
            _ => {
                let e = req.encoder.unwrap_or_default();
                Some(SigmoidEncoder::new(e.b, e.q)?)
            }
        };
        let probe = match mode {
            Mode::KwMinimum => {
                let p = req.probe.unwrap_or_default();
                p.validate()?;
                Some(p)
            }
            _ if req.probe.is_some() => return Err(ServiceError::invalid("probe", "only used in kw-minimum mode")),
            _ => None,
        };

        let state = if dimension == 1 {
            SessionDoc::Univariate(univariate_state(&req, mode, alpha)?)
        } else {
            SessionDoc::Multivariate(multivariate_state(&req, alpha, dimension)?)
        };
        let simulation = match req.simulation {
            Some(spec) => Some(simulation(spec.source, spec.seed, mode, alpha, &state)?),
            None => None,
        };
        let initial = initial_recommendation(&state, probe)?;
        Ok(Self {
            schema_version: API_SCHEMA_VERSION,
            id,
            created_at: now,
            updated_at: now,
            mode,
            status: Status::Active,
            request: req,
            encoder,
            probe,
            simulation,
            state,
            initial: initial.clone(),
            log: Vec::new(),
            recommendation: initial,
        })
    }

    pub fn n(&self) -> u64 {
        self.state.n()
    }

    /// Records one outcome and advances the session by exactly one step.
    pub fn apply(&mut self, req: &OutcomeRequest, now: DateTime<Utc>) -> Result<Recommendation> {
        if self.status == Status::Closed {
            return Err(ServiceError::Conflict(format!("session {} is closed", self.id)));
        }
        let n = self.n();
        if req.step != n {
            return Err(ServiceError::Conflict(format!("expected outcome for step {n}, got step {}", req.step)));
        }
        let probes = self.recommendation.probes;
        let outcome = if req.simulate {
            if req.y.is_some() || req.y_plus.is_some() || req.y_minus.is_some() {
                return Err(ServiceError::invalid("simulate", "a simulated step takes no outcome values"));
            }
            self.draw()?
        } else {
            self.read(req)?
        };

        let (response, bits) = match self.mode {
            Mode::Quantile => (None, vec![outcome.y.unwrap_or_default() as u8]),
            Mode::ContinuousRoot => {
                let y = outcome.y.unwrap_or_default();
                (Some(y), self.encoder()?.encode(y)?)
            }
            Mode::KwMinimum => {
                let (hi, lo, h, _) = self.kw_probe_now()?;
                debug_assert_eq!(probes, Some([hi, lo]));
                let yt = difference_quotient(outcome.y_plus.unwrap_or_default(), outcome.y_minus.unwrap_or_default(), h);
                (Some(yt), self.encoder()?.encode(yt)?)
            }
        };

        let x = self.recommendation.next.clone();
        let (state, rec) = match &self.state {
            SessionDoc::Univariate(st) => {
                let (next, res) = st.step_batch(&bits)?;
                let rec = univariate_recommendation(&res, &next, self.probe);
                (SessionDoc::Univariate(next), rec)
            }
            SessionDoc::Multivariate(st) => {
                let (next, res) = st.step_batch(&bits)?;
                (SessionDoc::Multivariate(next), multivariate_recommendation(&res))
            }
        };
        self.state = state;
        self.log.push(StepRecord {
            n,
            x,
            probes,
            outcome,
            simulated: req.simulate,
            response,
            binaries: bits,
            recommendation: rec.clone(),
        });
        self.recommendation = rec.clone();
        self.updated_at = now;
        Ok(rec)
    }

    pub fn close(&mut self, now: DateTime<Utc>) {
        if self.status != Status::Closed {
            self.status = Status::Closed;
            self.updated_at = now;
        }
    }

    /// Posterior density of the scaled root on the current slice.
    pub fn posterior(&self, points: usize) -> Result<PosteriorSample> {
        if !(2..=100_000).contains(&points) {
            return Err(ServiceError::invalid("points", format!("must lie in [2, 100000], got {points}")));
        }
        let st = match &self.state {
            SessionDoc::Univariate(st) => st,
            SessionDoc::Multivariate(_) => {
                return Err(ServiceError::invalid("id", "posterior curves are served for univariate sessions"))
            }
        };
        let lp = st.local_model()?;
        let curve = lp.posterior_theta()?;
        let res = st.estimate()?;
        let theta: Vec<f64> = (0..points).map(|i| (i as f64 + 0.5) / points as f64).collect();
        let density = theta.iter().map(|&t| curve.pdf(t)).collect();
        Ok(PosteriorSample {
            n: st.n,
            points,
            theta,
            density,
            theta0: res.theta0,
            v0: res.sub.v0(),
            v1: res.sub.v1(),
            s: res.sub.s,
            index: res.sub.index,
            m: res.m,
            mean: res.mean,
            mode: res.mode,
            interval: [res.interval.0, res.interval.1],
            domain: st.config.domain,
        })
    }

    pub fn transcript(&self) -> Transcript {
        Transcript {
            schema_version: API_SCHEMA_VERSION,
            id: self.id.clone(),
            mode: self.mode,
            status: self.status,
            request: self.request.clone(),
            simulated: self.simulation.is_some(),
            initial: self.initial.clone(),
            steps: self.log.clone(),
            final_state: self.state.clone(),
        }
    }

    fn encoder(&self) -> Result<SigmoidEncoder> {
        self.encoder.ok_or_else(|| ServiceError::Internal("encoder missing".into()))
    }

    fn domain(&self) -> Domain {
        match &self.state {
            SessionDoc::Univariate(st) => st.config.domain,
            SessionDoc::Multivariate(_) => Domain::unit(),
        }
    }

    fn kw_probe_now(&self) -> Result<(f64, f64, f64, bool)> {
        let p = self.probe.ok_or_else(|| ServiceError::Internal("probe missing".into()))?;
        let x = self.recommendation.next[0];
        Ok(kw_probes(x, p.c(self.n()), &self.domain()))
    }

    fn read(&self, req: &OutcomeRequest) -> Result<Outcome> {
        let finite = |name: &str, v: Option<f64>| -> Result<f64> {
            match v {
                Some(y) if y.is_finite() => Ok(y),
                Some(y) => Err(ServiceError::invalid(name, format!("must be finite, got {y}"))),
                None => Err(ServiceError::invalid(name, "required in this mode")),
            }
        };
        let absent = |name: &str, v: Option<f64>| -> Result<()> {
            match v {
                Some(_) => Err(ServiceError::invalid(name, "not used in this mode")),
                None => Ok(()),
            }
        };
        match self.mode {
            Mode::Quantile => {
                absent("y_plus", req.y_plus)?;
                absent("y_minus", req.y_minus)?;
                let y = finite("y", req.y)?;
                if y != 0.0 && y != 1.0 {
                    return Err(ServiceError::invalid("y", format!("binary outcome must be 0 or 1, got {y}")));
                }
                Ok(Outcome { y: Some(y), ..Outcome::default() })
            }
            Mode::ContinuousRoot => {
                absent("y_plus", req.y_plus)?;
                absent("y_minus", req.y_minus)?;
                Ok(Outcome { y: Some(finite("y", req.y)?), ..Outcome::default() })
            }
            Mode::KwMinimum => {
                absent("y", req.y)?;
                Ok(Outcome {
                    y: None,
                    y_plus: Some(finite("y_plus", req.y_plus)?),
                    y_minus: Some(finite("y_minus", req.y_minus)?),
                })
            }
        }
    }

    /// Draws the next outcome from the simulation source and advances the
    /// stored generator.
    fn draw(&mut self) -> Result<Outcome> {
        let sim = self
            .simulation
            .as_ref()
            .ok_or_else(|| ServiceError::invalid("simulate", "session was not created with a simulation source"))?;
        let mut rng = SeededRng::from_position(sim.rng);
        let domain = self.domain();
        let scaled = self.recommendation.next_scaled.clone();
        let out = match (sim.source, self.mode) {
            (SimSource::Model(model), Mode::Quantile) => {
                let alpha = match &self.state {
                    SessionDoc::Univariate(st) => st.config.alpha,
                    SessionDoc::Multivariate(st) => st.config.alpha,
                };
                let y = rng.bernoulli(model.scaled(&scaled, alpha)?);
                Outcome { y: Some(y as f64), ..Outcome::default() }
            }
            (SimSource::Example(ex), Mode::ContinuousRoot) => {
                Outcome { y: Some(ex.sample(scaled[0], &mut rng)), ..Outcome::default() }
            }
            (SimSource::Example(ex), Mode::KwMinimum) => {
                let (hi, lo, _, _) = self.kw_probe_now()?;
                let y_plus = ex.sample(domain.scale(hi), &mut rng);
                let y_minus = ex.sample(domain.scale(lo), &mut rng);
                Outcome { y: None, y_plus: Some(y_plus), y_minus: Some(y_minus) }
            }
            _ => return Err(ServiceError::Internal("simulation source does not match the mode".into())),
        };
        if let Some(sim) = self.simulation.as_mut() {
            sim.rng = rng.position();
        }
        Ok(out)
    }
}

fn univariate_state(req: &CreateSession, mode: Mode, alpha: f64) -> Result<SessionState> {
    let mut cfg = SessionConfig::new(alpha)?;
    if mode != Mode::Quantile {
        cfg = cfg.with_estimator(Estimator::Bayes).with_schedule(SEARCH_SCHEDULE);
    }
    if let Some(e) = req.estimator {
        cfg = cfg.with_estimator(e);
    }
    if let Some(s) = req.schedule {
        cfg = cfg.with_schedule(s);
    }
    if let Some(d) = req.domain {
        cfg = cfg.with_domain(Domain::new(d.lo, d.hi)?);
    }
    match &req.start {
        None => {}
        Some(Start::Scalar(x)) => cfg = cfg.with_start(*x),
        Some(Start::Vector(v)) if v.len() == 1 => cfg = cfg.with_start(v[0]),
        Some(Start::Vector(_)) => return Err(ServiceError::invalid("start", "need 1 coordinate")),
    }
    if req.u.is_some() || req.averaging.is_some() {
        return Err(ServiceError::invalid("u", "candidate selection settings need dimension at least 2"));
    }
    Ok(SessionState::new(cfg)?)
}

fn multivariate_state(req: &CreateSession, alpha: f64, dimension: u32) -> Result<MvSessionState> {
    let mut cfg = MvConfig::new(alpha, dimension)?;
    if let Some(e) = req.estimator {
        cfg = cfg.with_estimator(e);
    }
    if let Some(s) = req.schedule {
        cfg = cfg.with_schedule(s);
    }
    if let Some(u) = req.u {
        cfg = cfg.with_u(u);
    }
    if let Some(a) = req.averaging {
        cfg = cfg.with_averaging(a);
    }
    if let Some(d) = req.domain {
        if d != Domain::unit() {
            return Err(ServiceError::invalid("domain", "multivariate sessions run on the unit cube"));
        }
    }
    match &req.start {
        None => {}
        Some(Start::Vector(v)) => cfg = cfg.with_start(v.clone()),
        Some(Start::Scalar(x)) => cfg = cfg.with_start(vec![*x; dimension as usize]),
    }
    Ok(MvSessionState::new(cfg)?)
}

fn simulation(source: SimSource, seed: u64, mode: Mode, alpha: f64, state: &SessionDoc) -> Result<Simulation> {
    let p = state.dimension() as usize;
    let true_root = match (source, mode) {
        (SimSource::Model(model), Mode::Quantile) => {
            if model.dimension() != p {
                return Err(ServiceError::invalid(
                    "simulation.model",
                    format!("{model} has dimension {}, the session {p}", model.dimension()),
                ));
            }
            let root = model.true_root(alpha)?;
            match state {
                SessionDoc::Univariate(st) => vec![st.config.domain.unscale(root[0])],
                SessionDoc::Multivariate(_) => root,
            }
        }
        (SimSource::Example(ex), Mode::ContinuousRoot | Mode::KwMinimum) => match state {
            SessionDoc::Univariate(st) => vec![st.config.domain.unscale(ex.target())],
            SessionDoc::Multivariate(_) => unreachable!("root modes are univariate"),
        },
        (SimSource::Model(_), _) => {
            return Err(ServiceError::invalid("simulation.model", "testbed models drive quantile sessions"))
        }
        (SimSource::Example(_), _) => {
            return Err(ServiceError::invalid("simulation.example", "examples drive root and minimum sessions"))
        }
    };
    Ok(Simulation { source, seed, rng: SeededRng::new(seed).position(), true_root })
}

fn initial_recommendation(state: &SessionDoc, probe: Option<KwProbe>) -> Result<Recommendation> {
    match state {
        SessionDoc::Univariate(st) => Ok(univariate_recommendation(&st.estimate()?, st, probe)),
        SessionDoc::Multivariate(st) => {
            let cube = Hypercube::locate(&st.x, st.config.schedule.s_at(st.n))?;
            Ok(Recommendation {
                n: st.n,
                next: st.x.clone(),
                next_scaled: st.x.clone(),
                mean: None,
                mode: None,
                interval: None,
                theta: None,
                theta0: None,
                region: Region::Hypercube(cube),
                m: 0,
                probes: None,
            })
        }
    }
}

fn univariate_recommendation(res: &StepResult, st: &SessionState, probe: Option<KwProbe>) -> Recommendation {
    let d = st.config.domain;
    Recommendation {
        n: res.n,
        next: vec![res.next],
        next_scaled: vec![res.next_scaled],
        mean: Some(d.unscale(res.mean)),
        mode: Some(d.unscale(res.mode)),
        interval: Some([d.unscale(res.interval.0), d.unscale(res.interval.1)]),
        theta: None,
        theta0: Some(res.theta0),
        region: Region::Subinterval { s: res.sub.s, index: res.sub.index, v0: res.sub.v0(), v1: res.sub.v1() },
        m: res.m,
        probes: probe.map(|p| {
            let (hi, lo, _, _) = kw_probes(res.next, p.c(res.n), &d);
            [hi, lo]
        }),
    }
}

fn multivariate_recommendation(res: &MvStepResult) -> Recommendation {
    Recommendation {
        n: res.n,
        next: res.next.clone(),
        next_scaled: res.next.clone(),
        mean: None,
        mode: None,
        interval: None,
        theta: Some(res.theta.clone()),
        theta0: None,
        region: Region::Hypercube(res.cube.clone()),
        m: res.m,
        probes: None,
    }
}

/// Outcome of re-running a transcript through a fresh session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayReport {
    pub steps: usize,
    /// First step whose recommendation differs from the recorded one.
    pub first_mismatch: Option<u64>,
    pub initial_matches: bool,
    pub state_matches: bool,
    pub final_state: SessionDoc,
}

impl ReplayReport {
    pub fn matches(&self) -> bool {
        self.initial_matches && self.first_mismatch.is_none() && self.state_matches
    }
}

/// Feeds the recorded outcomes of `t` to a new session built from its
/// request and compares every recommendation and the final state.
pub fn replay(t: &Transcript) -> Result<ReplayReport> {
    let now = DateTime::<Utc>::UNIX_EPOCH;
    let mut rec = SessionRecord::create(t.id.clone(), t.request.clone(), now)?;
    let initial_matches = rec.recommendation == t.initial;
    let mut first_mismatch = None;
    for step in &t.steps {
        let req = OutcomeRequest {
            step: step.n,
            y: step.outcome.y,
            y_plus: step.outcome.y_plus,
            y_minus: step.outcome.y_minus,
            simulate: false,
        };
        let got = rec.apply(&req, now)?;
        if got != step.recommendation && first_mismatch.is_none() {
            first_mismatch = Some(step.n);
        }
    }
    Ok(ReplayReport {
        steps: t.steps.len(),
        first_mismatch,
        initial_matches,
        state_matches: rec.state == t.final_state,
        final_state: rec.state,
    })
}
