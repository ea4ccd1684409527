use nonlocal_flow::diagnostics::*;
use nonlocal_flow::dynamics::*;
use nonlocal_flow::field::MeasuredField;
use nonlocal_flow::initial::InitialData;
use nonlocal_flow::nonlinearity::Nonlinearity;
use nonlocal_flow::{Error, Structure, Traj};

fn cubic() -> (Nonlinearity<f64>, Structure) {
    let nl = Nonlinearity::cubic();
    let bs = nl.bistable_structure(-1.0, 1.0).unwrap();
    (nl, bs)
}

fn run(values: Vec<f64>, t_end: f64) -> Traj {
    let u0 = MeasuredField::unit_cells(values).unwrap();
    integrate(&u0, &Nonlinearity::cubic(), &SimulationConfig { t_end, ..SimulationConfig::default() }).unwrap()
}

#[test]
fn energy_and_dissipation_match_closed_form() {
    // ±a evolves by u' = u - u³, so E(t) = -2F(u(t)) and the dissipated
    // amount is E(0) - E(t).
    let a: f64 = 0.5;
    let tr = run(vec![a, -a], 12.0);
    let big_f = |s: f64| s * s / 2.0 - s.powi(4) / 4.0;
    for (i, &t) in tr.times.iter().enumerate() {
        let e = (2.0 * t).exp();
        let u = (a * a * e / (1.0 - a * a + a * a * e)).sqrt();
        let energy = -2.0 * big_f(u);
        assert!((tr.energy[i] - energy).abs() < 1e-8, "t = {t}");
        let q = tr.energy[0] - energy;
        assert!((tr.dissipation[i] - q).abs() < 1e-8, "t = {t}");
    }
    assert!(check_dissipation(&tr) <= 1e-6);
    assert!(max_energy_increase(&tr) <= 1e-12);
}

#[test]
fn constant_run_dissipates_nothing() {
    let tr = run(vec![-0.3; 6], 1.0);
    assert_eq!(check_dissipation(&tr), 0.0);
    assert!(tr.dissipation.iter().all(|&q| q == 0.0));
}

#[test]
fn isometry_along_a_trajectory() {
    let tr = run(vec![0.9, -0.2, 0.4, -1.1, 0.05, 0.7], 10.0);
    assert!(check_isometry(&tr, None, 200, 7).unwrap() <= 1e-10);
    let u0 = tr.initial().clone();
    let sharp = solve_rearranged(&u0, &Nonlinearity::cubic(), &SimulationConfig { t_end: 10.0, ..SimulationConfig::default() }).unwrap();
    assert!(check_isometry(&tr, Some(&sharp), 200, 7).unwrap() <= 1e-10);
    let agree = compare_rearranged(&tr, &sharp).unwrap();
    assert!(agree.max_profile_l1 <= 1e-10 && agree.max_lambda_gap <= 1e-10);
}

#[test]
fn classify_constant() {
    let (nl, bs) = cubic();
    let tr = run(vec![-1.5; 4], 1.0);
    let r = classify_omega_limit(&tr, &nl, &bs, &ClassifyConfig::default()).unwrap();
    assert_eq!(r.class, LimitClass::Constant);
    assert_eq!(r.levels, vec![-1.5]);
}

#[test]
fn classify_symmetric_pair() {
    let (nl, bs) = cubic();
    let tr = run(vec![0.5, -0.5], 200.0);
    let r = classify_omega_limit(&tr, &nl, &bs, &ClassifyConfig::default()).unwrap();
    assert_eq!(r.class, LimitClass::TwoValued);
    assert!((r.levels[0] + 1.0).abs() < 1e-9 && (r.levels[1] - 1.0).abs() < 1e-9);
    assert_eq!(r.level_measures, vec![1.0, 1.0]);
    assert!(r.k_hat.abs() < 1e-12);
    assert!(r.mass_residual < 1e-9);
}

#[test]
fn classify_plateau_at_zero() {
    // λ ≡ 0 by symmetry, so the zero cells never move.
    let (nl, bs) = cubic();
    let tr = run(vec![-0.8, 0.0, 0.0, 0.8], 200.0);
    let r = classify_omega_limit(&tr, &nl, &bs, &ClassifyConfig::default()).unwrap();
    assert_eq!(r.class, LimitClass::ThreeValued);
    assert_eq!(r.levels.len(), 3);
    assert_eq!(r.levels[1], 0.0);
}

#[test]
fn classify_boundary() {
    let (nl, bs) = cubic();
    let tr = run(vec![bs.m; 3], 1.0);
    let r = classify_omega_limit(&tr, &nl, &bs, &ClassifyConfig::default()).unwrap();
    assert_eq!(r.class, LimitClass::BoundaryMSstar);
    let tr = run(vec![bs.big_m; 3], 1.0);
    let r = classify_omega_limit(&tr, &nl, &bs, &ClassifyConfig::default()).unwrap();
    assert_eq!(r.class, LimitClass::BoundarySstarM);
}

#[test]
fn classify_refuses_unfinished_run() {
    let (nl, bs) = cubic();
    let tr = run(vec![0.5, -0.2, 0.1], 0.5);
    let err = classify_omega_limit(&tr, &nl, &bs, &ClassifyConfig::default()).unwrap_err();
    assert!(matches!(err, Error::NotStationary { .. }));
}

#[test]
fn distinct_inner_data_never_give_three_values() {
    let (nl, bs) = cubic();
    for seed in [1u64, 2, 3] {
        let u0 = InitialData::UniformRandom { lo: -1.0, hi: 1.05, n: 64, seed }.generate().unwrap();
        let tr = integrate(&u0, &nl, &SimulationConfig::default()).unwrap();
        let r = classify_omega_limit(&tr, &nl, &bs, &ClassifyConfig::default()).unwrap();
        assert_eq!(r.class, LimitClass::TwoValued, "seed {seed}");
        assert!((r.level_f_values[0] - r.level_f_values[1]).abs() < 1e-6);
    }
}

#[test]
fn middle_set_empties() {
    let (_, bs) = cubic();
    let tr = run(vec![0.5, -0.5], 200.0);
    let h = track_level_sets(&tr, &bs, 1e-9).unwrap();
    assert_eq!(h.counts[0], [0, 2, 0]);
    assert_eq!(*h.counts.last().unwrap(), [1, 0, 1]);
    assert!(h.monotone && h.first_violation.is_none());
}

#[test]
fn upper_set_is_everything() {
    let (_, bs) = cubic();
    let tr = run(vec![0.6, 0.8, 1.1, 0.95], 20.0);
    let h = track_level_sets(&tr, &bs, 1e-9).unwrap();
    assert!(h.measures.iter().all(|m| m[2] == 4.0));
}

#[test]
fn level_sets_need_the_inner_interval() {
    let (_, bs) = cubic();
    let tr = run(vec![-3.0, 0.0, 3.0], 1.0);
    assert!(matches!(track_level_sets(&tr, &bs, 1e-9), Err(Error::HypothesisViolated(_))));
}

#[test]
fn trichotomy_cases() {
    let (_, bs) = cubic();
    let left = trichotomy(&run(vec![-1.9, -1.4, -1.3], 20.0), &bs, 1e-9);
    assert_eq!(left.case, TrichotomyCase::Left);
    assert!(left.holds);
    let right = trichotomy(&run(vec![1.9, 1.4, 1.3], 20.0), &bs, 1e-9);
    assert_eq!(right.case, TrichotomyCase::Right);
    assert!(right.holds);
    let inner = trichotomy(&run(vec![-1.1, 0.3, 1.0], 50.0), &bs, 1e-9);
    assert_eq!(inner.case, TrichotomyCase::Inner);
    assert!(inner.holds);
    assert_eq!(trichotomy(&run(vec![-2.0, 2.0], 1.0), &bs, 1e-9).case, TrichotomyCase::Mixed);
}

#[test]
fn rate_of_two_close_cells() {
    // Linearising about c: e' = f'(c) e with zero-mean e, so the rate is -f'(c).
    let nl = Nonlinearity::cubic();
    let tr = run(vec![-1.46, -1.44], 20.0);
    let r = fit_rate(&tr, -1.45, &nl).unwrap();
    let expected = 3.0 * 1.45f64 * 1.45 - 1.0;
    assert!((r.mu_fit - expected).abs() < 0.02 * expected, "fit {} vs {expected}", r.mu_fit);
    assert!((r.mu_theory - (3.0 * 1.44f64 * 1.44 - 1.0)).abs() < 1e-9);
    assert!(r.mu_fit >= 0.9 * r.mu_theory);
}

#[test]
fn rate_is_mirror_symmetric() {
    let nl = Nonlinearity::cubic();
    let a = fit_rate(&run(vec![-1.9, -1.5, -1.3], 20.0), -1.5666666666666667, &nl).unwrap();
    let b = fit_rate(&run(vec![1.9, 1.5, 1.3], 20.0), 1.5666666666666667, &nl).unwrap();
    assert!((a.mu_fit - b.mu_fit).abs() < 1e-9 * a.mu_fit);
    assert_eq!(a.points, b.points);
}

#[test]
fn rate_of_constant_run_has_no_window() {
    let nl = Nonlinearity::cubic();
    assert!(matches!(fit_rate(&run(vec![-1.5; 3], 1.0), -1.5, &nl), Err(Error::WindowEmpty)));
}

#[test]
fn max_fprime_of_cubic() {
    let nl = Nonlinearity::<f64>::cubic();
    assert!((max_fprime(&nl, -1.0, 1.0) - 1.0).abs() < 1e-12);
    assert!((max_fprime(&nl, -1.9, -1.3) - (1.0 - 3.0 * 1.69)).abs() < 1e-12);
}
