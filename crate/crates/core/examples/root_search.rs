//! Root of a noisy regression function through sigmoid-encoded responses,
//! against the Robbins–Monro baseline on the response signs.
//!
//! ```text
//! cargo run -p bsa --example root_search
//! ```

use bsa::applications::{application_study, rmj_root_search, root_search, Example, SearchConfig};
use bsa::driver::Domain;
use bsa::numerics::SeededRng;

fn main() -> bsa::Result<()> {
    // A single run on a custom domain: E[y | x] = 0.05 (x - 12)^3, unit noise.
    let config = SearchConfig { domain: Domain::new(0.0, 20.0)?, start: 10.0, ..SearchConfig::default() };
    let mut rng = SeededRng::new(3);
    let tr = root_search(|x| Ok(0.05 * (x - 12.0).powi(3) + rng.standard_normal()), &config)?;
    let mut rng = SeededRng::new(3);
    let base = rmj_root_search(|x| Ok(0.05 * (x - 12.0).powi(3) + rng.standard_normal()), &config)?;
    for n in [1, 5, 10, 20, 31] {
        println!("n = {n:>2}: encoded {:>8.4}  baseline {:>8.4}", tr.at(n).unwrap(), base.at(n).unwrap());
    }
    println!("first response {:+.3} encoded as {:?}", tr.responses[0], tr.binaries[0]);

    // RMSE over replications on the built-in cubic (root 0.3).
    let study = application_study(Example::Cubic, &SearchConfig::default(), 200, 2024)?;
    for n in [5, 10, 20, 30] {
        println!("RMSE at n = {n:>2}: encoded {:.4}  baseline {:.4}", study.bsa_at(n), study.rmj_at(n));
    }
    Ok(())
}
