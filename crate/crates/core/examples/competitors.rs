//! The four classical quantile procedures side by side on one simulated
//! response stream per method.
//!
//! ```text
//! cargo run -p bsa --example competitors
//! ```

use bsa::competitors::{Gain, RmState, RmjState, RpjState, WuMapState, WuPrior, WuSearch};
use bsa::numerics::{std_normal_cdf, std_normal_quantile, SeededRng};

const ALPHA: f64 = 0.2;
const STEPS: usize = 30;

fn main() -> bsa::Result<()> {
    // Probit curve P(y = 1 | x) = Φ(x - 1) on the real line.
    let p = |x: f64| std_normal_cdf(x - 1.0).unwrap_or(0.5);
    let truth = 1.0 + std_normal_quantile(ALPHA)?;
    let slope = bsa::numerics::std_normal_pdf(truth - 1.0);
    let x1 = 0.0;

    let mut rng = SeededRng::new(11);
    let mut rm = RmState::new(x1, Gain::Harmonic { slope })?;
    for _ in 0..STEPS {
        let y = rng.bernoulli(p(rm.x));
        rm = rm.step(y, ALPHA);
    }

    let mut rng = SeededRng::new(11);
    let mut rmj = RmjState::new(x1, ALPHA, RmjState::optimal_beta(slope, ALPHA)?, 1.0)?;
    for _ in 0..STEPS {
        let y = rng.bernoulli(p(rmj.x));
        rmj = rmj.step(y);
    }

    let mut rng = SeededRng::new(11);
    let mut rpj = RpjState::new(x1)?;
    for _ in 0..STEPS {
        let y = rng.bernoulli(p(rpj.rm.x));
        rpj = rpj.step(y, ALPHA);
    }

    let mut rng = SeededRng::new(11);
    let mut wu = WuMapState::new(x1, ALPHA, WuPrior::default(), WuSearch::over(-5.0, 5.0))?;
    for _ in 0..STEPS {
        let y = rng.bernoulli(p(wu.x));
        wu = wu.step(y)?;
    }

    println!("target quantile {truth:.4} after {STEPS} responses");
    for (name, x) in [("RM", rm.x), ("RMJ", rmj.x), ("RPJ", rpj.estimate()), ("Wu-MAP", wu.x)] {
        println!("{name:>7} {x:>8.4}  error {:+.4}", x - truth);
    }
    Ok(())
}
