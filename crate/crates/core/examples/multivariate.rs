//! Two-dimensional search for a point on the α-level contour of a
//! bivariate probit surface, moving one coordinate per step.
//!
//! ```text
//! cargo run --release -p bsa --example multivariate
//! ```

use bsa::mv::{simulate_path, MvConfig, MvSessionState, UFunction};
use bsa::numerics::SeededRng;
use bsa::testbed::{simulate_response, Model};

fn main() -> bsa::Result<()> {
    let alpha = 0.5;
    let config = MvConfig::new(alpha, 2)?.with_u(UFunction::Diagonal).with_start(vec![0.6, 0.6]);
    let root = Model::M8.true_root(alpha)?;

    // Step by step, showing the candidate moves.
    let mut st = MvSessionState::new(config.clone())?;
    let mut rng = SeededRng::new(1);
    for _ in 0..8 {
        let y = simulate_response(Model::M8, &st.x, alpha, &mut rng)?;
        let (next, r) = st.step(y)?;
        println!(
            "n={:>2} y={y} m={:>2} candidates {:?} -> coordinate {} moves",
            r.n - 1,
            r.m,
            r.candidates.iter().map(|c| format!("({:.3}, {:.3})", c[0], c[1])).collect::<Vec<_>>(),
            r.chosen + 1
        );
        st = next;
    }

    // Error of x_60 over a few replications.
    let reps = 20;
    let mut sq = 0.0;
    for r in 0..reps {
        let path = simulate_path(&config, Model::M8, 59, &mut SeededRng::derive(7, &[r]))?;
        let x = path.last().unwrap();
        sq += (x[0] - root[0]).powi(2) + (x[1] - root[1]).powi(2);
    }
    println!("diagonal root ({:.4}, {:.4}); RMSE of x_60 over {reps} runs {:.4}", root[0], root[1], (sq / reps as f64).sqrt());
    Ok(())
}
