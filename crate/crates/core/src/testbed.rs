//! Test models, response simulation and the Monte Carlo RMSE benchmark.
//!
//! Models live on the native domain `(−3, 3)`; the scaled coordinate is
//! `u = (x + 3) / 6`. Competitors run natively, BSA runs scaled, and all
//! errors are reported scaled.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::competitors::{Gain, RmState, RmjState, RpjState, WuMapState, WuPrior, WuSearch};
use crate::driver::{Estimator, Schedule, SessionConfig, SessionState};
use crate::error::{Error, Result};
use crate::numerics::normal::{phi, phi_inv};
use crate::numerics::{bivariate_normal_cdf, std_normal_pdf, SeededRng};

pub const NATIVE_LO: f64 = -3.0;
pub const NATIVE_HI: f64 = 3.0;

/// `u ↦ 6u − 3`.
pub fn to_native(u: f64) -> f64 {
    NATIVE_LO + (NATIVE_HI - NATIVE_LO) * u
}

/// `x ↦ (x + 3) / 6`.
pub fn to_scaled(x: f64) -> f64 {
    (x - NATIVE_LO) / (NATIVE_HI - NATIVE_LO)
}

/// Benchmark response curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Model {
    M1,
    M2,
    M3,
    M4,
    M5,
    M6,
    M7,
    M8,
    M9,
    M10,
}

impl Model {
    pub const ALL: [Model; 10] = [
        Model::M1,
        Model::M2,
        Model::M3,
        Model::M4,
        Model::M5,
        Model::M6,
        Model::M7,
        Model::M8,
        Model::M9,
        Model::M10,
    ];

    pub fn dimension(self) -> usize {
        match self {
            Model::M8 | Model::M9 | Model::M10 => 2,
            _ => 1,
        }
    }

    fn code(self) -> u64 {
        self as u64 + 1
    }

    /// Correlation of the bivariate models.
    pub fn correlation(self) -> Option<f64> {
        match self {
            Model::M8 => Some(0.0),
            Model::M9 => Some(0.8),
            Model::M10 => Some(-0.8),
            _ => None,
        }
    }

    /// Response probability at a native point.
    pub fn native(self, x: &[f64], alpha: f64) -> Result<f64> {
        check_alpha(alpha)?;
        if x.len() != self.dimension() {
            return Err(Error::invalid(
                "x",
                format!("{self} takes {} coordinates, got {}", self.dimension(), x.len()),
            ));
        }
        if x.iter().any(|v| v.is_nan()) {
            return Err(Error::invalid("x", "must not be NaN"));
        }
        if let Some(rho) = self.correlation() {
            return bivariate_normal_cdf(x[0], x[1], rho);
        }
        Ok(self.native1(x[0], alpha))
    }

    /// Response probability at a scaled point.
    pub fn scaled(self, u: &[f64], alpha: f64) -> Result<f64> {
        let x: Vec<f64> = u.iter().map(|&v| to_native(v)).collect();
        self.native(&x, alpha)
    }

    fn native1(self, x: f64, alpha: f64) -> f64 {
        match self {
            Model::M1 => phi(x),
            Model::M2 => phi(phi_inv(alpha) + x),
            Model::M3 => (alpha + x / 3.0).clamp(0.0, 1.0),
            Model::M4 => {
                // 1 / (1 + e^{−(x − c)}) with e^{c} = α/(1 − α).
                let c = (alpha / (1.0 - alpha)).ln();
                logistic(x + c)
            }
            Model::M5 => {
                // 1 − exp(w), w = ln(1 − α) eˣ.
                let w = (-alpha).ln_1p() * x.exp();
                -w.exp_m1()
            }
            Model::M6 => {
                let c = (alpha.sqrt() / (1.0 - alpha.sqrt())).ln();
                let f = logistic(x + c);
                f * f
            }
            Model::M7 => 0.5 + (x + (PI * (alpha - 0.5)).tan()).atan() / PI,
            Model::M8 | Model::M9 | Model::M10 => unreachable!("bivariate"),
        }
    }

    /// The root of `M(x) = α`, scaled. Bivariate models return the
    /// solution on the diagonal.
    pub fn true_root(self, alpha: f64) -> Result<Vec<f64>> {
        check_alpha(alpha)?;
        Ok(match self {
            Model::M1 => vec![to_scaled(phi_inv(alpha))],
            Model::M8 | Model::M9 | Model::M10 => {
                let rho = self.correlation().unwrap_or(0.0);
                let z = diagonal_root(alpha, rho)?;
                vec![to_scaled(z); 2]
            }
            _ => vec![to_scaled(0.0)],
        })
    }

    /// `M'(θ)` in native coordinates, univariate models only.
    pub fn slope(self, alpha: f64) -> Result<f64> {
        check_alpha(alpha)?;
        Ok(match self {
            Model::M1 | Model::M2 => std_normal_pdf(phi_inv(alpha)),
            Model::M3 => 1.0 / 3.0,
            Model::M4 => alpha * (1.0 - alpha),
            Model::M5 => -(1.0 - alpha) * (-alpha).ln_1p(),
            Model::M6 => {
                let r = alpha.sqrt();
                2.0 * (1.0 - r) * alpha
            }
            Model::M7 => {
                let t = (PI * (alpha - 0.5)).tan();
                1.0 / (PI * (1.0 + t * t))
            }
            _ => {
                return Err(Error::invalid("model", format!("{self} is bivariate")));
            }
        })
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(&format!("M{}", self.code()))
    }
}

impl FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Model::ALL
            .iter()
            .copied()
            .find(|m| m.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::invalid("model", format!("unknown model {s:?}")))
    }
}

fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid("alpha", format!("must lie in (0, 1), got {alpha}")))
    }
}

/// Solves `Φ₂(z, z; ρ) = α` by bisection.
fn diagonal_root(alpha: f64, rho: f64) -> Result<f64> {
    let (mut lo, mut hi) = (-12.0, 12.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if bivariate_normal_cdf(mid, mid, rho)? < alpha {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Response probability of `model` at a scaled point.
pub fn eval_model(model: Model, u: &[f64], alpha: f64) -> Result<f64> {
    model.scaled(u, alpha)
}

/// One Bernoulli response at a scaled point.
pub fn simulate_response(model: Model, u: &[f64], alpha: f64, rng: &mut SeededRng) -> Result<u8> {
    Ok(rng.bernoulli(model.scaled(u, alpha)?))
}

/// Procedures compared by the benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    Rm,
    Rmj,
    Rpj,
    WuMap,
    BsaBayes,
    BsaMap,
}

impl Method {
    pub const ALL: [Method; 6] =
        [Method::Rm, Method::Rmj, Method::Rpj, Method::WuMap, Method::BsaBayes, Method::BsaMap];

    pub fn name(self) -> &'static str {
        match self {
            Method::Rm => "RM",
            Method::Rmj => "RMJ",
            Method::Rpj => "RPJ",
            Method::WuMap => "Wu-MAP",
            Method::BsaBayes => "BSA-Bayes",
            Method::BsaMap => "BSA-MAP",
        }
    }

    fn code(self) -> u64 {
        self as u64 + 1
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace(['-', '_'], "");
        Method::ALL
            .iter()
            .copied()
            .find(|m| m.name().to_ascii_lowercase().replace('-', "") == key)
            .ok_or_else(|| Error::invalid("method", format!("unknown method {s:?}")))
    }
}

/// Benchmark settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkConfig {
    pub methods: Vec<Method>,
    pub model: Model,
    pub alphas: Vec<f64>,
    pub horizon: u64,
    pub replications: u64,
    pub seed: u64,
    /// Slice schedule of both BSA methods.
    pub schedule: Schedule,
    /// Starting point, scaled.
    pub start: f64,
}

impl BenchmarkConfig {
    /// All six methods, α = 0.1, …, 0.9, n = 20, 1000 replications, s = 17.
    pub fn standard(model: Model, seed: u64) -> Self {
        Self {
            methods: Method::ALL.to_vec(),
            model,
            alphas: (1..=9).map(|k| k as f64 / 10.0).collect(),
            horizon: 20,
            replications: 1000,
            seed,
            schedule: Schedule::Fixed { s: 17 },
            start: 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.model.dimension() != 1 {
            return Err(Error::invalid(
                "model",
                format!("{} is bivariate; the benchmark methods are univariate", self.model),
            ));
        }
        if self.methods.is_empty() {
            return Err(Error::invalid("methods", "at least one method is required"));
        }
        if self.alphas.is_empty() {
            return Err(Error::invalid("alphas", "at least one level is required"));
        }
        for &a in &self.alphas {
            check_alpha(a)?;
        }
        if self.horizon == 0 {
            return Err(Error::invalid("horizon", "must be at least 1"));
        }
        if self.replications == 0 {
            return Err(Error::invalid("replications", "must be at least 1"));
        }
        if !(self.start > 0.0 && self.start < 1.0) {
            return Err(Error::invalid("start", format!("must lie in (0, 1), got {}", self.start)));
        }
        self.schedule.validate()
    }
}

/// Errors of one (method, α) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub method: Method,
    pub alpha: f64,
    pub true_root: f64,
    /// Final estimate of each replication, scaled.
    pub finals: Vec<f64>,
    /// `final − true_root` per replication.
    pub errors: Vec<f64>,
    pub rmse: f64,
}

/// Benchmark output with seed provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkResult {
    pub model: Model,
    pub horizon: u64,
    pub replications: u64,
    pub seed: u64,
    pub cells: Vec<Cell>,
}

impl BenchmarkResult {
    pub fn cell(&self, method: Method, alpha: f64) -> Option<&Cell> {
        self.cells.iter().find(|c| c.method == method && (c.alpha - alpha).abs() < 1e-12)
    }

    pub fn rmse(&self, method: Method, alpha: f64) -> Option<f64> {
        self.cell(method, alpha).map(|c| c.rmse)
    }
}

/// `sqrt(mean(e²))`.
pub fn rmse(errors: &[f64]) -> f64 {
    if errors.is_empty() {
        return f64::NAN;
    }
    (errors.iter().map(|e| e * e).sum::<f64>() / errors.len() as f64).sqrt()
}

fn alpha_key(alpha: f64) -> u64 {
    (alpha * 1e9).round() as u64
}

/// Seed stream of one (model, method, α, replication).
pub fn replication_rng(seed: u64, model: Model, method: Method, alpha: f64, rep: u64) -> SeededRng {
    SeededRng::derive(seed, &[model.code(), method.code(), alpha_key(alpha), rep])
}

/// Runs one replication and returns the scaled final estimate.
pub fn run_replication(
    method: Method,
    model: Model,
    alpha: f64,
    horizon: u64,
    schedule: Schedule,
    start: f64,
    rng: &mut SeededRng,
) -> Result<f64> {
    let x1 = to_native(start);
    let respond = |x_native: f64, rng: &mut SeededRng| -> Result<u8> {
        Ok(rng.bernoulli(model.native(&[x_native], alpha)?))
    };
    match method {
        Method::Rm => {
            let mut st = RmState::new(x1, Gain::Harmonic { slope: model.slope(alpha)? })?;
            for _ in 0..horizon {
                let y = respond(st.x, rng)?;
                st = st.step(y, alpha);
            }
            Ok(to_scaled(st.x))
        }
        Method::Rmj => {
            let beta = RmjState::optimal_beta(model.slope(alpha)?, alpha)?;
            let mut st = RmjState::new(x1, alpha, beta, 1.0)?;
            for _ in 0..horizon {
                let y = respond(st.x, rng)?;
                st = st.step(y);
            }
            Ok(to_scaled(st.x))
        }
        Method::Rpj => {
            let mut st = RpjState::new(x1)?;
            for _ in 0..horizon {
                let y = respond(st.rm.x, rng)?;
                st = st.step(y, alpha);
            }
            Ok(to_scaled(st.estimate()))
        }
        Method::WuMap => {
            let search = WuSearch::over(NATIVE_LO, NATIVE_HI);
            let mut st = WuMapState::new(x1, alpha, WuPrior::default(), search)?;
            for _ in 0..horizon {
                let y = respond(st.x, rng)?;
                st = st.step(y)?;
            }
            Ok(to_scaled(st.x))
        }
        Method::BsaBayes | Method::BsaMap => {
            let est = if method == Method::BsaBayes { Estimator::Bayes } else { Estimator::Map };
            let cfg = SessionConfig::new(alpha)?
                .with_estimator(est)
                .with_schedule(schedule)
                .with_start(start);
            let mut st = SessionState::new(cfg)?;
            for _ in 0..horizon {
                let y = rng.bernoulli(model.scaled(&[st.x], alpha)?);
                st = st.advance(&[y])?;
            }
            Ok(st.x)
        }
    }
}

/// Runs every (method, α, replication) of `config`. Replications of a cell
/// are spread over the available threads and collected in index order.
pub fn run_benchmark(config: &BenchmarkConfig) -> Result<BenchmarkResult> {
    config.validate()?;
    let mut cells = Vec::with_capacity(config.methods.len() * config.alphas.len());
    for &method in &config.methods {
        for &alpha in &config.alphas {
            let root = config.model.true_root(alpha)?[0];
            let finals = run_cell(config, method, alpha)?;
            let errors: Vec<f64> = finals.iter().map(|f| f - root).collect();
            let r = rmse(&errors);
            cells.push(Cell { method, alpha, true_root: root, finals, errors, rmse: r });
        }
    }
    Ok(BenchmarkResult {
        model: config.model,
        horizon: config.horizon,
        replications: config.replications,
        seed: config.seed,
        cells,
    })
}

fn run_cell(config: &BenchmarkConfig, method: Method, alpha: f64) -> Result<Vec<f64>> {
    let reps = config.replications;
    let one = |rep: u64| {
        let mut rng = replication_rng(config.seed, config.model, method, alpha, rep);
        run_replication(
            method,
            config.model,
            alpha,
            config.horizon,
            config.schedule,
            config.start,
            &mut rng,
        )
    };
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(reps as usize);
    if threads <= 1 {
        return (0..reps).map(one).collect();
    }
    let chunk = reps.div_ceil(threads as u64);
    let parts: Vec<Result<Vec<f64>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads as u64)
            .map(|t| {
                let one = &one;
                scope.spawn(move || {
                    let lo = t * chunk;
                    let hi = ((t + 1) * chunk).min(reps);
                    (lo..hi).map(one).collect::<Result<Vec<f64>>>()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("benchmark worker panicked")).collect()
    });
    let mut out = Vec::with_capacity(reps as usize);
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

fn io_err(path: &Path, e: impl fmt::Display) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

/// One row of the summary file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub method: String,
    pub model: String,
    pub alpha: f64,
    pub n: u64,
    pub replications: u64,
    pub seed: u64,
    pub rmse: f64,
}

/// One row of the per-replication file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationRow {
    pub method: String,
    pub model: String,
    pub alpha: f64,
    pub replication: u64,
    pub final_x: f64,
    pub true_root: f64,
    pub error: f64,
}

pub const SUMMARY_HEADER: [&str; 7] = ["method", "model", "alpha", "n", "replications", "seed", "rmse"];
pub const PLOTDATA_HEADER: [&str; 7] =
    ["method", "model", "alpha", "replication", "final_x", "true_root", "error"];

fn write_rows<T: Serialize>(path: &Path, header: &[&str], rows: &[T]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(|e| io_err(path, e))?;
    w.write_record(header).map_err(|e| io_err(path, e))?;
    for r in rows {
        w.serialize(r).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| io_err(path, e))?;
    r.deserialize().map(|row| row.map_err(|e| io_err(path, e))).collect()
}

/// Summary rows of `result`.
pub fn summary_rows(result: &BenchmarkResult) -> Vec<SummaryRow> {
    result
        .cells
        .iter()
        .map(|c| SummaryRow {
            method: c.method.to_string(),
            model: result.model.to_string(),
            alpha: c.alpha,
            n: result.horizon,
            replications: result.replications,
            seed: result.seed,
            rmse: c.rmse,
        })
        .collect()
}

/// Per-replication rows of `result`.
pub fn replication_rows(result: &BenchmarkResult) -> Vec<ReplicationRow> {
    let mut rows = Vec::new();
    for c in &result.cells {
        for (i, (&f, &e)) in c.finals.iter().zip(&c.errors).enumerate() {
            rows.push(ReplicationRow {
                method: c.method.to_string(),
                model: result.model.to_string(),
                alpha: c.alpha,
                replication: i as u64,
                final_x: f,
                true_root: c.true_root,
                error: e,
            });
        }
    }
    rows
}

/// Writes `method,model,alpha,n,replications,seed,rmse`.
pub fn emit_csv(result: &BenchmarkResult, path: impl AsRef<Path>) -> Result<()> {
    write_rows(path.as_ref(), &SUMMARY_HEADER, &summary_rows(result))
}

/// Writes `method,model,alpha,replication,final_x,true_root,error`.
pub fn emit_plotdata(result: &BenchmarkResult, path: impl AsRef<Path>) -> Result<()> {
    write_rows(path.as_ref(), &PLOTDATA_HEADER, &replication_rows(result))
}

pub fn read_summary_csv(path: impl AsRef<Path>) -> Result<Vec<SummaryRow>> {
    read_rows(path.as_ref())
}

pub fn read_plotdata(path: impl AsRef<Path>) -> Result<Vec<ReplicationRow>> {
    read_rows(path.as_ref())
}
