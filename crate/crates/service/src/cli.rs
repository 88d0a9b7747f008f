//! Command-line front end of the `bsa` binary.

use std::io::{BufRead, BufReader, Write};
use std::net::{IpAddr, SocketAddr};
use std::path::PathBuf;
use std::process::{Child, ChildStdin, ChildStdout, Command, ExitCode, Stdio};
use std::sync::Arc;

use bsa::applications::{
    kw_search, rmj_kw_search, rmj_root_search, root_search, Example, KwProbe, SearchConfig, SigmoidEncoder, Trajectory,
};
use bsa::driver::{Domain, Schedule};
use bsa::numerics::SeededRng;
use bsa::testbed::{emit_csv, emit_plotdata, run_benchmark, summary_rows, BenchmarkConfig, Method, Model};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::api::Transcript;
use crate::engine::replay;
use crate::store::Store;

#[derive(Debug, Parser)]
#[command(name = "bsa", version, about = "Bayesian stochastic approximation: sessions, benchmarks and searches")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Run the HTTP session service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        #[arg(long, env = "BSA_DATA_DIR", default_value = "sessions")]
        data_dir: PathBuf,
    },
    /// Monte Carlo comparison of the quantile procedures on a testbed model.
    Bench {
        #[arg(long, default_value = "M1")]
        model: Model,
        #[arg(long, default_value_t = 20240521)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        replications: u64,
        #[arg(long, default_value_t = 20)]
        horizon: u64,
        /// Comma-separated levels.
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")]
        alphas: Vec<f64>,
        /// Comma-separated methods, e.g. `rm,rmj,bsa-bayes`.
        #[arg(long, value_delimiter = ',', default_value = "rm,rmj,rpj,wu-map,bsa-bayes,bsa-map")]
        methods: Vec<Method>,
        /// Slice schedule of the BSA methods: `fixed:S` or
        /// `two-stage:FIRST,SECOND,SWITCH`.
        #[arg(long, default_value = "fixed:17", value_parser = parse_schedule)]
        schedule: Schedule,
        /// Starting point on the unit scale.
        #[arg(long, default_value_t = 0.5)]
        start: f64,
        /// Summary CSV (method, model, alpha, n, replications, seed, rmse).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-replication CSV.
        #[arg(long)]
        plotdata: Option<PathBuf>,
    },
    /// Root of a noisy regression function from encoded responses.
    RootSearch(SearchArgs),
    /// Minimum of a noisy objective from encoded difference quotients.
    KwSearch(SearchArgs),
    /// Re-run an exported transcript and compare it with the recording.
    Replay {
        transcript: PathBuf,
    },
}

fn parse_schedule(text: &str) -> Result<Schedule, String> {
    let bad = || format!("expected fixed:S or two-stage:FIRST,SECOND,SWITCH, got {text:?}");
    let (kind, rest) = text.split_once(':').ok_or_else(bad)?;
    let nums: Vec<u32> = rest.split(',').map(|v| v.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?;
    let schedule = match (kind, nums.as_slice()) {
        ("fixed", [s]) => Schedule::Fixed { s: *s },
        ("two-stage", [first, second, switch_step]) => {
            Schedule::TwoStage { first: *first, second: *second, switch_step: *switch_step }
        }
        _ => return Err(bad()),
    };
    schedule.validate().map_err(|e| e.to_string())?;
    Ok(schedule)
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long, default_value_t = 30)]
    horizon: usize,
    /// Sigmoid scale `b`.
    #[arg(long, default_value_t = 1.0)]
    b: f64,
    /// Binaries per response.
    #[arg(long, default_value_t = 2)]
    q: u32,
    #[arg(long, default_value_t = 0.0)]
    lo: f64,
    #[arg(long, default_value_t = 1.0)]
    hi: f64,
    /// Starting point; defaults to mid-domain.
    #[arg(long)]
    start: Option<f64>,
    /// Seed of the built-in example's noise.
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    /// Built-in example on the unit interval: `cubic` or `quadratic`.
    #[arg(long, conflicts_with = "command")]
    example: Option<String>,
    /// Shell command answering one `x` per input line with one `y` per
    /// output line.
    #[arg(long)]
    command: Option<String>,
    /// Also run the Robbins–Monro baseline on the sign of each response.
    #[arg(long)]
    baseline: bool,
}

#[derive(Debug, Serialize)]
struct SearchReport {
    config: SearchConfig,
    bsa: Trajectory,
    baseline: Option<Trajectory>,
}

/// An external process queried line by line.
struct ProcessOracle {
    child: Child,
    stdin: ChildStdin,
    stdout: BufReader<ChildStdout>,
}

impl ProcessOracle {
    fn spawn(cmd: &str) -> std::io::Result<Self> {
        let mut child = Command::new("sh").arg("-c").arg(cmd).stdin(Stdio::piped()).stdout(Stdio::piped()).spawn()?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = BufReader::new(child.stdout.take().expect("piped stdout"));
        Ok(Self { child, stdin, stdout })
    }

    fn query(&mut self, x: f64) -> bsa::Result<f64> {
        let io = |e: std::io::Error| bsa::Error::Io(e.to_string());
        writeln!(self.stdin, "{x}").map_err(io)?;
        self.stdin.flush().map_err(io)?;
        let mut line = String::new();
        if self.stdout.read_line(&mut line).map_err(io)? == 0 {
            return Err(bsa::Error::Io("oracle process closed its output".into()));
        }
        line.trim().parse().map_err(|_| bsa::Error::Io(format!("oracle answered {:?}, not a number", line.trim())))
    }
}

impl Drop for ProcessOracle {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

fn search(args: &SearchArgs, minimum: bool) -> Result<SearchReport, String> {
    let domain = Domain::new(args.lo, args.hi).map_err(|e| e.to_string())?;
    let config = SearchConfig {
        encoder: SigmoidEncoder::new(args.b, args.q).map_err(|e| e.to_string())?,
        horizon: args.horizon,
        start: args.start.unwrap_or(0.5 * (args.lo + args.hi)),
        domain,
        schedule: Schedule::TwoStage { first: 5, second: 9, switch_step: 11 },
        probe: KwProbe::default(),
    };
    let run = |oracle: &mut dyn FnMut(f64) -> bsa::Result<f64>, baseline: bool| {
        let r = match (minimum, baseline) {
            (false, false) => root_search(oracle, &config),
            (true, false) => kw_search(oracle, &config),
            (false, true) => rmj_root_search(oracle, &config),
            (true, true) => rmj_kw_search(oracle, &config),
        };
        r.map_err(|e| e.to_string())
    };
    let traj = |baseline: bool| -> Result<Trajectory, String> {
        match &args.command {
            Some(cmd) => {
                let mut p = ProcessOracle::spawn(cmd).map_err(|e| format!("cannot start oracle: {e}"))?;
                run(&mut |x| p.query(x), baseline)
            }
            None => {
                let example = match args.example.as_deref() {
                    None if minimum => Example::Quadratic,
                    None => Example::Cubic,
                    Some("cubic") => Example::Cubic,
                    Some("quadratic") => Example::Quadratic,
                    Some(other) => return Err(format!("unknown example {other:?}; use cubic or quadratic")),
                };
                let mut rng = SeededRng::new(args.seed);
                run(&mut |x| Ok(example.sample(domain.scale(x), &mut rng)), baseline)
            }
        }
    };
    Ok(SearchReport { config, bsa: traj(false)?, baseline: if args.baseline { Some(traj(true)?) } else { None } })
}

fn print_json<T: Serialize>(v: &T) -> Result<(), String> {
    println!("{}", serde_json::to_string_pretty(v).map_err(|e| e.to_string())?);
    Ok(())
}

fn dispatch(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Cmd::Serve { port, host, data_dir } => {
            let store = Arc::new(Store::open(&data_dir).map_err(|e| e.to_string())?);
            let addr = SocketAddr::new(host, port);
            let rt = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
            eprintln!("serving sessions from {} on http://{addr}", data_dir.display());
            rt.block_on(crate::http::serve(addr, store)).map_err(|e| e.to_string())?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Bench { model, seed, replications, horizon, alphas, methods, schedule, start, out, plotdata } => {
            let config =
                BenchmarkConfig { methods, model, alphas, horizon, replications, seed, schedule, start };
            let result = run_benchmark(&config).map_err(|e| e.to_string())?;
            println!("{:<10} {:>6} {:>10}", "method", "alpha", "rmse");
            for row in summary_rows(&result) {
                println!("{:<10} {:>6.2} {:>10.5}", row.method, row.alpha, row.rmse);
            }
            if let Some(p) = out {
                emit_csv(&result, &p).map_err(|e| e.to_string())?;
            }
            if let Some(p) = plotdata {
                emit_plotdata(&result, &p).map_err(|e| e.to_string())?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::RootSearch(args) => {
            print_json(&search(&args, false)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::KwSearch(args) => {
            print_json(&search(&args, true)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Replay { transcript } => {
            let text = std::fs::read_to_string(&transcript).map_err(|e| format!("{}: {e}", transcript.display()))?;
            let t: Transcript = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", transcript.display()))?;
            let report = replay(&t).map_err(|e| e.to_string())?;
            print_json(&report)?;
            if report.matches() {
                eprintln!("replay of {} steps matches the transcript", report.steps);
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("replay differs from the transcript");
                Ok(ExitCode::FAILURE)
            }
        }
    }
}

pub fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
