//! The four posteriors of one slice: the crossing point, the two end
//! values and the scaled slope. Prints summaries and a coarse density plot.
//!
//! ```text
//! cargo run -p bsa --example posterior_curves
//! ```

use bsa::local::{Curve1d, LocalPosterior, Observation, PriorBounds, Subinterval};

fn bar(v: f64, peak: f64) -> String {
    "#".repeat((40.0 * v / peak).round() as usize)
}

fn plot(name: &str, curve: &impl Curve1d) -> bsa::Result<()> {
    let (lo, hi) = curve.support();
    let (a, b) = curve.credible_interval(0.9)?;
    println!(
        "{name}: support ({lo:.3}, {hi:.3}), mean {:.4}, mode {:.4}, 90% ({a:.4}, {b:.4})",
        curve.mean(),
        curve.mode()
    );
    let xs: Vec<f64> = (0..16).map(|i| lo + (i as f64 + 0.5) / 16.0 * (hi - lo)).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| curve.pdf(x)).collect();
    let peak = ys.iter().cloned().fold(f64::MIN_POSITIVE, f64::max);
    for (x, y) in xs.iter().zip(&ys) {
        println!("  {x:>7.4} {y:>9.4} {}", bar(*y, peak));
    }
    Ok(())
}

fn main() -> bsa::Result<()> {
    let alpha = 0.25;
    let sub = Subinterval::new(5, 3)?; // (0.4, 0.6)
    let bounds = PriorBounds::noninformative(alpha)?;
    let members = [(0.45, 0), (0.52, 1), (0.48, 0), (0.57, 1), (0.55, 0)]
        .iter()
        .map(|&(x, y)| Observation::new(x, y))
        .collect::<bsa::Result<Vec<_>>>()?;
    let lp = LocalPosterior::new(sub, bounds, members)?;
    println!("slice ({}, {}), alpha {alpha}, m = {}, theta0 = {:.4}", sub.v0(), sub.v1(), lp.m(), lp.theta0());

    plot("theta", &lp.posterior_theta()?)?;
    plot("rho0", &lp.posterior_rho0()?)?;
    plot("rho1", &lp.posterior_rho1()?)?;
    plot("beta", &lp.posterior_betatilde()?)?;
    Ok(())
}
