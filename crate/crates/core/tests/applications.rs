use bsa::applications::{
    application_study, kw_classic_step, kw_probes, kw_search, rmj_root_search, root_search, Example, KwClassicState,
    KwProbe, SearchConfig, SigmoidEncoder,
};
use bsa::driver::{Domain, Estimator, Schedule, SessionConfig, SessionState};
use bsa::numerics::SeededRng;
use proptest::prelude::*;

#[test]
fn encoder_examples() {
    assert_eq!(SigmoidEncoder::new(0.7, 2).unwrap().encode(0.0).unwrap(), vec![1, 0]);
    assert_eq!(SigmoidEncoder::new(1.0, 3).unwrap().encode(f64::INFINITY).unwrap(), vec![1, 1, 1]);
    assert_eq!(SigmoidEncoder::new(1.0, 3).unwrap().encode(f64::NEG_INFINITY).unwrap(), vec![0, 0, 0]);
    let e = SigmoidEncoder::new(1.0, 3).unwrap();
    assert!((e.squash(1.0) - 0.7310586).abs() < 1e-7);
    assert_eq!(e.encode(1.0).unwrap(), vec![1, 1, 0]);
    assert!(e.encode(f64::NAN).is_err());
    assert!(SigmoidEncoder::new(0.0, 2).is_err());
    assert!(SigmoidEncoder::new(1.0, 0).is_err());
    assert!((SigmoidEncoder::for_range(6.0, 2).unwrap().b - 0.5).abs() < 1e-15);
}

#[test]
fn nearest_fraction_exhaustive() {
    for q in 1..=8u32 {
        for k in 0..=2000 {
            let target = k as f64 / 2000.0;
            // Pick y with squash(y) = target (b = 1).
            let y = if k == 0 {
                f64::NEG_INFINITY
            } else if k == 2000 {
                f64::INFINITY
            } else {
                (target / (1.0 - target)).ln()
            };
            let e = SigmoidEncoder::new(1.0, q).unwrap();
            let bits = e.encode(y).unwrap();
            assert_eq!(bits.len(), q as usize);
            let a = bits.iter().filter(|&&b| b == 1).count();
            assert!(bits[..a].iter().all(|&b| b == 1) && bits[a..].iter().all(|&b| b == 0));
            let ys = e.squash(y);
            let best = (0..=q).map(|i| (i as f64 / q as f64 - ys).abs()).fold(f64::INFINITY, f64::min);
            assert!((a as f64 / q as f64 - ys).abs() <= best + 1e-12, "q {q} y* {ys}: a {a}");
        }
    }
}

#[test]
fn probe_widths_and_clipping() {
    let p = KwProbe::default();
    assert_eq!(p.c(1), 1.0);
    assert!((p.c(8) - 0.5).abs() < 1e-15);
    assert_eq!(p.gamma(4), 0.25);
    let (hi, lo, h, clipped) = kw_probes(0.2, 0.5, &Domain::unit());
    assert!(clipped && (h - 0.2).abs() < 1e-15 && lo == 0.0 && (hi - 0.4).abs() < 1e-15);
    let (hi, lo, h, clipped) = kw_probes(0.5, 0.1, &Domain::unit());
    assert!(!clipped && h == 0.1 && (hi - 0.6).abs() < 1e-15 && (lo - 0.4).abs() < 1e-15);
}

#[test]
fn classic_recursion() {
    let st = KwClassicState::new(0.4, KwProbe::default()).unwrap();
    assert_eq!(kw_classic_step(&st, 1.3, 1.3).x, 0.4);
    assert!((kw_classic_step(&st, 0.5, 0.3).x - 0.2).abs() < 1e-15);
    assert_eq!(kw_classic_step(&st, 0.5, 0.3).n, 2);

    let phi = |x: f64| (x - 0.3) * (x - 0.3);
    let mut st = KwClassicState::new(0.9, KwProbe::default()).unwrap();
    for _ in 0..500 {
        let (a, b) = st.probes();
        st = kw_classic_step(&st, phi(a), phi(b));
    }
    assert!((st.x - 0.3).abs() < 0.05, "{}", st.x);
}

#[test]
fn noiseless_linear_root() {
    let cfg = SearchConfig::default();
    let tr = root_search(|x| Ok(4.0 * (x - 0.5)), &cfg).unwrap();
    assert_eq!(tr.points.len(), 31);
    assert!((tr.points[30] - 0.5).abs() < 0.05, "{}", tr.points[30]);
}

#[test]
fn single_binary_is_the_sign() {
    let cfg = SearchConfig { encoder: SigmoidEncoder::new(1.0, 1).unwrap(), ..SearchConfig::default() };
    let mut rng = SeededRng::new(8);
    let tr = root_search(|x| Ok(Example::Cubic.sample(x, &mut rng)), &cfg).unwrap();

    let mut st = SessionState::new(
        SessionConfig::new(0.5).unwrap().with_estimator(Estimator::Bayes).with_schedule(cfg.schedule),
    )
    .unwrap();
    for (i, y) in tr.responses.iter().enumerate() {
        assert_eq!(st.x, tr.points[i]);
        st = st.advance(&[u8::from(*y > 0.0)]).unwrap();
    }
    assert_eq!(st.x, *tr.points.last().unwrap());
}

#[test]
fn q_binaries_enter_as_one_step() {
    let cfg = SearchConfig { horizon: 3, ..SearchConfig::default() };
    let tr = root_search(|_| Ok(0.0), &cfg).unwrap();
    assert!(tr.binaries.iter().all(|b| b == &vec![1, 0]));
    // y* = 0.5 gives one success and one failure per step at the median
    // of the first slice grid, which stays put.
    assert!(tr.points.iter().all(|&x| (x - 0.5).abs() < 1e-12));
}

#[test]
fn searches_are_deterministic() {
    let run = |seed| {
        let mut rng = SeededRng::new(seed);
        let a = root_search(|x| Ok(Example::Cubic.sample(x, &mut rng)), &SearchConfig::default()).unwrap();
        let mut rng = SeededRng::new(seed);
        let b = kw_search(|x| Ok(Example::Quadratic.sample(x, &mut rng)), &SearchConfig::default()).unwrap();
        (a, b)
    };
    assert_eq!(run(3), run(3));
    assert_ne!(run(3).0, run(4).0);
}

#[test]
fn minimum_search_probes_stay_in_domain() {
    let mut rng = SeededRng::new(12);
    let tr = kw_search(|x| Ok(Example::Quadratic.sample(x, &mut rng)), &SearchConfig::default()).unwrap();
    assert_eq!(tr.probes.len(), 30);
    assert!(tr.clipped[0]);
    for &(hi, lo) in &tr.probes {
        assert!((0.0..=1.0).contains(&hi) && (0.0..=1.0).contains(&lo) && lo <= hi);
    }
}

#[test]
fn noiseless_quadratic_minimum() {
    let tr = kw_search(|x| Ok(Example::Quadratic.mean(x)), &SearchConfig::default()).unwrap();
    assert!((tr.points[30] - 0.3).abs() < 0.05, "{}", tr.points[30]);
}

#[test]
fn original_domain_is_an_affine_relabelling() {
    let wide = SearchConfig { domain: Domain::new(-3.0, 3.0).unwrap(), start: 0.0, ..SearchConfig::default() };
    let g = |x: f64| 2.0 * (x - 1.2);
    let a = root_search(|x| Ok(g(x)), &wide).unwrap();
    let b = root_search(|u| Ok(g(-3.0 + 6.0 * u)), &SearchConfig::default()).unwrap();
    assert_eq!(a.points[0], 0.0);
    for (x, u) in a.points.iter().zip(&b.points) {
        assert!((x - (-3.0 + 6.0 * u)).abs() < 1e-12);
    }
    assert_eq!(a.binaries, b.binaries);
    let rmj = rmj_root_search(|x| Ok(g(x)), &wide).unwrap();
    assert_eq!(rmj.points[0], 0.0);
}

#[test]
fn study_trend_on_few_replications() {
    let cfg = SearchConfig { schedule: Schedule::TwoStage { first: 5, second: 9, switch_step: 11 }, ..Default::default() };
    let s = application_study(Example::Cubic, &cfg, 60, 1).unwrap();
    assert_eq!(s.bsa_rmse.len(), 31);
    assert!(s.bsa_at(30) < s.bsa_at(5));
    assert_eq!(s.bsa_at(1), s.rmj_at(1));
    let s = application_study(Example::Quadratic, &cfg, 20, 1).unwrap();
    assert!((s.bsa_at(1) - 0.2).abs() < 1e-12);
}

proptest! {
    #[test]
    fn encoding_length_and_monotone(y in -50.0f64..50.0, dy in 0.0f64..5.0, q in 1u32..10, b in 0.1f64..5.0) {
        let e = SigmoidEncoder::new(b, q).unwrap();
        let (lo, hi) = (e.ones(y).unwrap(), e.ones(y + dy).unwrap());
        prop_assert!(lo <= hi && hi <= q);
        prop_assert_eq!(e.encode(y).unwrap().len(), q as usize);
    }
}
