//! JSON wire types. Field names are frozen for a given
//! [`API_SCHEMA_VERSION`]; additions bump it.

use bsa::applications::{Example, KwProbe, SigmoidEncoder};
use bsa::driver::{Domain, Estimator, Schedule, SessionState};
use bsa::mv::{Averaging, Hypercube, MvSessionState, UFunction};
use bsa::numerics::RngPosition;
use bsa::testbed::Model;
use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

pub const API_SCHEMA_VERSION: u32 = 1;

/// What the experimenter reports at each step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// One binary outcome per step.
    #[default]
    Quantile,
    /// A real response, encoded into binaries by the server.
    ContinuousRoot,
    /// Two real responses at the probe points `x ± c_n`.
    KwMinimum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Active,
    Closed,
}

/// Response generator of a simulated session.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimSource {
    /// Testbed curve, for quantile mode.
    Model(Model),
    /// Noisy regression example, for the root and minimum modes.
    Example(Example),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationSpec {
    #[serde(flatten)]
    pub source: SimSource,
    pub seed: u64,
}

/// Starting point: a number for univariate sessions, a vector otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Start {
    Scalar(f64),
    Vector(Vec<f64>),
}

/// Body of `POST /sessions`. Omitted fields take the library defaults.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CreateSession {
    pub mode: Mode,
    /// Target level; required in quantile mode, fixed at 0.5 otherwise.
    pub alpha: Option<f64>,
    pub dimension: Option<u32>,
    pub estimator: Option<Estimator>,
    pub schedule: Option<Schedule>,
    pub domain: Option<Domain>,
    pub start: Option<Start>,
    /// Multivariate candidate selection.
    pub u: Option<UFunction>,
    pub averaging: Option<Averaging>,
    pub encoder: Option<SigmoidEncoder>,
    pub probe: Option<KwProbe>,
    pub simulation: Option<SimulationSpec>,
}

/// Body of `POST /sessions/{id}/outcomes`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutcomeRequest {
    /// Step the outcome belongs to; must equal the session's current step.
    pub step: u64,
    /// Binary outcome (quantile) or real response (continuous-root).
    pub y: Option<f64>,
    /// Responses at `x + c_n` and `x − c_n` (kw-minimum).
    pub y_plus: Option<f64>,
    pub y_minus: Option<f64>,
    /// Let the server draw the outcome; simulated sessions only.
    pub simulate: bool,
}

/// Observed values of one step, as recorded.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Outcome {
    pub y: Option<f64>,
    pub y_plus: Option<f64>,
    pub y_minus: Option<f64>,
}

/// The slice or cell whose local model produced a recommendation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    /// Scaled endpoints `(v0, v1]` of slice `index` of `s`.
    Subinterval { s: u32, index: u32, v0: f64, v1: f64 },
    Hypercube(Hypercube),
}

/// Next design point with the posterior summary behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recommendation {
    /// Step whose outcome the point awaits.
    pub n: u64,
    /// Next design point in original coordinates.
    pub next: Vec<f64>,
    pub next_scaled: Vec<f64>,
    /// Posterior mean, mode and equal-tail 90% interval in original
    /// coordinates; univariate sessions only.
    pub mean: Option<f64>,
    pub mode: Option<f64>,
    pub interval: Option<[f64; 2]>,
    /// Per-coordinate conditional estimates; multivariate sessions after
    /// the first step.
    pub theta: Option<Vec<f64>>,
    /// Scaled break point of the prior on the current slice.
    pub theta0: Option<f64>,
    pub region: Region,
    pub m: usize,
    /// Probe points `(x + c_n, x − c_n)` in kw-minimum mode.
    pub probes: Option<[f64; 2]>,
}

/// The library state behind a session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionDoc {
    Univariate(SessionState),
    Multivariate(MvSessionState),
}

impl SessionDoc {
    pub fn n(&self) -> u64 {
        match self {
            SessionDoc::Univariate(s) => s.n,
            SessionDoc::Multivariate(s) => s.n,
        }
    }

    pub fn dimension(&self) -> u32 {
        match self {
            SessionDoc::Univariate(_) => 1,
            SessionDoc::Multivariate(s) => s.dimension,
        }
    }
}

/// Simulation flag and generator state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Simulation {
    pub source: SimSource,
    pub seed: u64,
    pub rng: RngPosition,
    /// Target of the search in original coordinates.
    pub true_root: Vec<f64>,
}

/// One completed step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub n: u64,
    /// Design point in original coordinates.
    pub x: Vec<f64>,
    pub probes: Option<[f64; 2]>,
    pub outcome: Outcome,
    pub simulated: bool,
    /// Encoded response: `y`, or the difference quotient in kw-minimum mode.
    pub response: Option<f64>,
    pub binaries: Vec<u8>,
    /// Recommendation issued after the step.
    pub recommendation: Recommendation,
}

/// A persisted session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionRecord {
    pub schema_version: u32,
    pub id: String,
    pub created_at: DateTime<Utc>,
    pub updated_at: DateTime<Utc>,
    pub mode: Mode,
    pub status: Status,
    /// The create request as received.
    pub request: CreateSession,
    /// Resolved encoder for the root and minimum modes.
    pub encoder: Option<SigmoidEncoder>,
    pub probe: Option<KwProbe>,
    pub simulation: Option<Simulation>,
    pub state: SessionDoc,
    pub initial: Recommendation,
    pub log: Vec<StepRecord>,
    pub recommendation: Recommendation,
}

/// Row of `GET /sessions`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionSummary {
    pub id: String,
    pub mode: Mode,
    pub status: Status,
    pub dimension: u32,
    pub n: u64,
    pub simulated: bool,
    pub created_at: DateTime<Utc>,
    pub updated_at: DateTime<Utc>,
}

impl From<&SessionRecord> for SessionSummary {
    fn from(r: &SessionRecord) -> Self {
        Self {
            id: r.id.clone(),
            mode: r.mode,
            status: r.status,
            dimension: r.state.dimension(),
            n: r.state.n(),
            simulated: r.simulation.is_some(),
            created_at: r.created_at,
            updated_at: r.updated_at,
        }
    }
}

/// `GET /sessions/{id}/posterior`: the density of the scaled root on its
/// current slice, sampled at `(i + ½)/points`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorSample {
    pub n: u64,
    pub points: usize,
    pub theta: Vec<f64>,
    pub density: Vec<f64>,
    pub theta0: f64,
    pub v0: f64,
    pub v1: f64,
    pub s: u32,
    pub index: u32,
    pub m: usize,
    pub mean: f64,
    pub mode: f64,
    pub interval: [f64; 2],
    /// Maps scaled θ to original coordinates.
    pub domain: Domain,
}

/// `GET /sessions/{id}/export`: everything needed to replay a session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub schema_version: u32,
    pub id: String,
    pub mode: Mode,
    pub status: Status,
    pub request: CreateSession,
    pub simulated: bool,
    pub initial: Recommendation,
    pub steps: Vec<StepRecord>,
    pub final_state: SessionDoc,
}

/// Error body of every non-2xx response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub message: String,
    pub field: Option<String>,
}
