use bsa::competitors::{
    wu_log_posterior, wu_map_fit, wu_map_next, Gain, RmState, RmjState, RpjState, WuFit, WuMapState,
    WuPrior, WuSearch, SIGMA_MIN,
};
use bsa::numerics::SeededRng;
use proptest::prelude::*;

#[test]
fn rm_antisymmetric_pair_returns_to_start() {
    let st = RmState::new(0.3, Gain::Sequence { values: vec![0.4] }).unwrap();
    let back = st.step(1, 0.5).step(0, 0.5);
    assert!((back.x - 0.3).abs() < 1e-15);
    assert_eq!(back.n, 2);
}

#[test]
fn rm_first_step_by_substitution() {
    let st = RmState::new(0.0, Gain::Harmonic { slope: 1.0 }).unwrap();
    assert_eq!(st.step(1, 0.5).x, -0.5);
}

#[test]
fn rm_rejects_bad_gains() {
    assert!(RmState::new(0.0, Gain::Harmonic { slope: 0.0 }).is_err());
    assert!(RmState::new(0.0, Gain::Sequence { values: vec![] }).is_err());
    assert!(RmState::new(0.0, Gain::Power { scale: -1.0, exponent: 1.0 }).is_err());
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

#[test]
fn rm_error_shrinks_on_a_linear_curve() {
    // M(x) = 0.5 + 0.2 (x − 0.7), clipped; optimal gain 1/(0.2 n).
    let (theta, slope) = (0.7, 0.2);
    let mut at = [Vec::new(), Vec::new(), Vec::new()];
    for seed in 0..200 {
        let mut rng = SeededRng::new(seed);
        let mut st = RmState::new(-1.0, Gain::Harmonic { slope }).unwrap();
        for n in 1..=1000 {
            let p = (0.5 + slope * (st.x - theta)).clamp(0.0, 1.0);
            st = st.step(rng.bernoulli(p), 0.5);
            match n {
                10 => at[0].push((st.x - theta).abs()),
                100 => at[1].push((st.x - theta).abs()),
                1000 => at[2].push((st.x - theta).abs()),
                _ => {}
            }
        }
    }
    let [a, b, c] = at.map(median);
    assert!(a > b && b > c, "{a} {b} {c}");
}

#[test]
#[allow(clippy::approx_constant)]
fn rmj_first_constants() {
    let st = RmjState::new(0.0, 0.5, 1.0, 1.0).unwrap();
    let (alpha1, a1) = st.constants();
    assert_eq!(alpha1, 0.5);
    // 4 φ(0) / √2 = 2 / √π.
    let a1_ref = 2.0 / std::f64::consts::PI.sqrt();
    assert!((a1 - a1_ref).abs() < 1e-14);
    assert!((a1 - 1.1283792).abs() < 5e-8);
    let next = st.step(1);
    assert!((next.tau2 - (1.0 - 0.25 * a1_ref * a1_ref)).abs() < 1e-14);
    assert!((next.tau2 - 0.6816901).abs() < 5e-8);
    assert!((next.x - (0.0 - a1 * 0.5)).abs() < 1e-15);
}

#[test]
fn rmj_optimal_beta_is_one_for_shifted_normal() {
    let alpha: f64 = 0.2;
    let z = bsa::numerics::std_normal_quantile(alpha).unwrap();
    let slope = bsa::numerics::std_normal_pdf(z);
    assert!((RmjState::optimal_beta(slope, alpha).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn rmj_variance_and_level_sequences() {
    for alpha in [0.05, 0.2, 0.5, 0.8, 0.95] {
        let mut st = RmjState::new(0.0, alpha, 1.3, 1.0).unwrap();
        let mut rng = SeededRng::new(3);
        let mut last_gap = f64::INFINITY;
        let mut last_tau = st.tau2;
        for _ in 0..100 {
            let (alpha_n, _) = st.constants();
            assert!(alpha_n > 0.0 && alpha_n < 1.0);
            let gap = (alpha_n - alpha).abs();
            assert!(gap <= last_gap + 1e-15);
            last_gap = gap;
            st = st.step(rng.bernoulli(0.5));
            assert!(st.tau2 < last_tau);
            assert!(st.tau2 > 0.0);
            last_tau = st.tau2;
        }
    }
}

#[test]
fn rpj_single_step_mean_is_start() {
    let st = RpjState::new(0.4).unwrap().step(1, 0.3);
    assert_eq!(st.estimate(), 0.4);
}

proptest! {
    #[test]
    fn rpj_running_mean_matches_recorded_path(
        ys in proptest::collection::vec(0u8..=1, 1..200),
        alpha in 0.05f64..0.95,
        x1 in -3.0f64..3.0,
    ) {
        let mut st = RpjState::new(x1).unwrap();
        let mut path = Vec::new();
        for &y in &ys {
            path.push(st.rm.x);
            st = st.step(y, alpha);
        }
        let direct = path.iter().sum::<f64>() / path.len() as f64;
        prop_assert!((st.estimate() - direct).abs() < 1e-12);
    }

    #[test]
    fn competitor_steps_are_deterministic(
        ys in proptest::collection::vec(0u8..=1, 1..30),
        alpha in 0.05f64..0.95,
    ) {
        let run = || {
            let mut rm = RmState::new(0.0, Gain::Harmonic { slope: 0.3 }).unwrap();
            let mut rmj = RmjState::new(0.0, alpha, 1.0, 1.0).unwrap();
            let mut rpj = RpjState::new(0.0).unwrap();
            for &y in &ys {
                rm = rm.step(y, alpha);
                rmj = rmj.step(y);
                rpj = rpj.step(y, alpha);
            }
            (rm, rmj, rpj)
        };
        prop_assert_eq!(run(), run());
    }
}

#[test]
fn wu_empty_history_is_prior_mode() {
    let prior = WuPrior { mu0: 0.7, tau: 3.0, xi: 3.0 };
    let fit = wu_map_fit(&[], &prior, &WuSearch::over(-3.0, 3.0), None).unwrap();
    assert_eq!(fit.mu, 0.7);
    assert_eq!(fit.sigma, SIGMA_MIN);
}

#[test]
fn wu_median_target_ignores_scale() {
    let fit = WuFit { mu: 1.25, sigma: 7.0, objective: 0.0, converged: true };
    assert_eq!(wu_map_next(&fit, 0.5).unwrap(), 1.25);
    assert!(wu_map_next(&fit, 0.9).unwrap() > 1.25);
}

fn logistic_sample(n: usize, mu: f64, sigma: f64, seed: u64) -> Vec<(f64, u8)> {
    let mut rng = SeededRng::new(seed);
    (0..n)
        .map(|_| {
            let x = -1.0 + 3.0 * rng.uniform();
            let p = 1.0 / (1.0 + (-(x - mu) / sigma).exp());
            (x, rng.bernoulli(p))
        })
        .collect()
}

/// Independent log posterior for the grid oracle.
fn oracle_objective(data: &[(f64, u8)], prior: &WuPrior, mu: f64, sigma: f64) -> f64 {
    let mut s = 0.0;
    for &(x, y) in data {
        let f = 1.0 / (1.0 + (-(x - mu) / sigma).exp());
        s += if y == 1 { f.ln() } else { (1.0 - f).ln() };
    }
    s - (mu - prior.mu0).powi(2) / (2.0 * prior.tau * prior.tau) - sigma / prior.xi
}

#[test]
fn wu_recovers_logistic_location() {
    // Nearly flat priors: τ large, σ prior mean large.
    let prior = WuPrior { mu0: 0.0, tau: 100.0, xi: 100.0 };
    let data = logistic_sample(200, 0.5, 0.3, 17);
    let fit = wu_map_fit(&data, &prior, &WuSearch::over(-3.0, 3.0), None).unwrap();
    assert!((fit.mu - 0.5).abs() < 0.1, "mu = {}", fit.mu);

    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 0..=400 {
        let mu = -1.0 + 3.0 * i as f64 / 400.0;
        for k in 1..=300 {
            let sigma = 2.0 * k as f64 / 300.0;
            let v = oracle_objective(&data, &prior, mu, sigma);
            if v > best.0 {
                best = (v, mu, sigma);
            }
        }
    }
    assert!((fit.mu - best.1).abs() < 0.01, "{} vs {}", fit.mu, best.1);
    assert!((fit.sigma - best.2).abs() < 0.01, "{} vs {}", fit.sigma, best.2);
    assert!(fit.objective >= best.0 - 1e-9);
}

#[test]
fn wu_fit_beats_audit_grid() {
    let prior = WuPrior::default();
    for seed in 0..5 {
        let data = logistic_sample(8 + 4 * seed as usize, 0.2, 0.8, seed);
        let fit = wu_map_fit(&data, &prior, &WuSearch::over(-3.0, 3.0), None).unwrap();
        let at = wu_log_posterior(&data, &prior, fit.mu, fit.sigma);
        for i in 0..100 {
            let mu = fit.mu - 1.0 + 2.0 * i as f64 / 99.0;
            for k in 0..100 {
                let sigma = SIGMA_MIN + (2.0 * fit.sigma + 1.0) * k as f64 / 99.0;
                assert!(at >= wu_log_posterior(&data, &prior, mu, sigma) - 1e-9);
            }
        }
    }
}

#[test]
fn wu_sequence_is_deterministic() {
    let run = || {
        let mut st = WuMapState::new(0.0, 0.3, WuPrior::default(), WuSearch::over(-3.0, 3.0)).unwrap();
        let mut rng = SeededRng::new(9);
        for _ in 0..15 {
            let p = 1.0 / (1.0 + (-(st.x + 0.4) / 0.5).exp());
            st = st.step(rng.bernoulli(p)).unwrap();
        }
        st
    };
    assert_eq!(run(), run());
}
