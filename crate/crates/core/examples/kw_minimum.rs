//! Minimum of a noisy objective: each step probes `x ± c_n`, encodes the
//! difference quotient, and searches for its sign change.
//!
//! ```text
//! cargo run -p bsa --example kw_minimum
//! ```

use bsa::applications::{application_study, kw_search, Example, SearchConfig, SigmoidEncoder};
use bsa::numerics::SeededRng;

fn main() -> bsa::Result<()> {
    // Objective 30 (x - 0.65)^2 + 2 with N(0, 0.25) noise, three binaries per quotient.
    let config = SearchConfig { encoder: SigmoidEncoder::new(1.0, 3)?, horizon: 40, ..SearchConfig::default() };
    let mut rng = SeededRng::new(5);
    let tr = kw_search(|x| Ok(30.0 * (x - 0.65f64).powi(2) + 2.0 + 0.5 * rng.standard_normal()), &config)?;

    println!("{:>3} {:>8} {:>17} {:>9} {:>9}", "n", "x", "probes", "quotient", "binaries");
    for (i, ((x, (hi, lo)), g)) in tr.points.iter().zip(&tr.probes).zip(&tr.responses).enumerate().take(12) {
        let ones: u8 = tr.binaries[i].iter().sum();
        println!("{:>3} {x:>8.4} ({lo:.4}, {hi:.4}) {g:>9.3} {ones:>5} / {}", i + 1, tr.binaries[i].len());
    }
    println!("final point {:.4} (minimizer 0.65)", tr.points.last().unwrap());

    let study = application_study(Example::Quadratic, &SearchConfig::default(), 200, 2024)?;
    println!(
        "quadratic example, 200 runs: RMSE n=5 {:.4}, n=30 {:.4}, baseline n=30 {:.4}",
        study.bsa_at(5),
        study.bsa_at(30),
        study.rmj_at(30)
    );
    Ok(())
}
