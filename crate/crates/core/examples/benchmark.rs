//! A reduced Monte Carlo comparison on a testbed model, written to CSV.
//!
//! ```text
//! cargo run --release -p bsa --example benchmark -- M2 200
//! ```

use bsa::testbed::{emit_csv, run_benchmark, BenchmarkConfig, Method, Model};

fn main() -> bsa::Result<()> {
    let mut args = std::env::args().skip(1);
    let model: Model = args.next().as_deref().unwrap_or("M1").parse()?;
    let replications = args.next().and_then(|r| r.parse().ok()).unwrap_or(200);

    let mut config = BenchmarkConfig::standard(model, 20240521);
    config.replications = replications;
    // Wu-MAP dominates the run time; leave it out of the quick tour.
    config.methods.retain(|&m| m != Method::WuMap);
    config.alphas = vec![0.1, 0.3, 0.5, 0.7, 0.9];

    let result = run_benchmark(&config)?;
    print!("{:>6}", "alpha");
    for m in &config.methods {
        print!(" {:>10}", m.to_string());
    }
    println!();
    for &alpha in &config.alphas {
        print!("{alpha:>6.2}");
        for m in &config.methods {
            print!(" {:>10.5}", result.rmse(*m, alpha).unwrap_or(f64::NAN));
        }
        println!();
    }

    let out = std::env::temp_dir().join(format!("bsa-benchmark-{model}.csv"));
    emit_csv(&result, &out)?;
    println!("summary written to {}", out.display());
    Ok(())
}
