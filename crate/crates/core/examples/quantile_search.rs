//! Sequential search for the 30% quantile of a logistic dose-response
//! curve, one binary outcome per step.
//!
//! ```text
//! cargo run -p bsa --example quantile_search
//! ```

use bsa::driver::{Domain, SessionConfig, SessionState};
use bsa::local::Curve1d;
use bsa::numerics::SeededRng;

fn main() -> bsa::Result<()> {
    let alpha: f64 = 0.3;
    // True curve on doses 0..200: P(y = 1 | x) = 1 / (1 + exp(-(x - 90) / 15)).
    let p = |x: f64| 1.0 / (1.0 + (-(x - 90.0) / 15.0).exp());
    let target = 90.0 + 15.0 * (alpha / (1.0 - alpha)).ln();

    let cfg = SessionConfig::new(alpha)?.with_domain(Domain::new(0.0, 200.0)?);
    let mut state = SessionState::new(cfg)?;
    let mut rng = SeededRng::new(7);

    println!("{:>3} {:>9} {:>2} {:>9} {:>21}", "n", "dose", "y", "next", "90% interval");
    for _ in 0..40 {
        let x = state.current();
        let y = rng.bernoulli(p(x));
        let (next, r) = state.step(y)?;
        let (lo, hi) = r.interval;
        let d = cfg.domain;
        println!(
            "{:>3} {:>9.3} {:>2} {:>9.3}   ({:>8.3}, {:>8.3})",
            r.n - 1,
            x,
            y,
            r.next,
            d.unscale(lo),
            d.unscale(hi)
        );
        state = next;
    }

    let curve = state.local_model()?.posterior_theta()?;
    println!("target {target:.3}, final design point {:.3}", state.current());
    println!("posterior mode of the quantile: {:.3}", cfg.domain.unscale(curve.mode()));
    Ok(())
}
