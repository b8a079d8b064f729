use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rmj::estimation::{coverage_report, solve_dispersion, ALPHA_MAX};
use rmj::qmath::Q_MIN;
use rmj::synth::{generate, DisplayPolicy};
use rmj::{fit, ChoiceObservation, DisplaySet, Error, FitOptions, MixtureModel, Ranking, RmjModel, SolverStatus, TopKList};

fn sample(center: &Ranking, q: f64, policy: &DisplayPolicy, k: usize, t: usize, seed: u64) -> Vec<ChoiceObservation> {
    let mix = MixtureModel::single(RmjModel::new(center.clone(), q).unwrap());
    generate(&mix, policy, k, t, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

#[test]
fn ranked_subsets_round_trip() {
    let center = Ranking::new(vec![3, 0, 5, 1, 4, 2]).unwrap();
    let data = sample(&center, 0.6, &DisplayPolicy::SubsetsAtLeast(3), 2, 20_000, 1);
    let result = fit(&data, &FitOptions::default()).unwrap();
    assert_eq!(result.center, center);
    assert_eq!(result.solver_status, SolverStatus::Exact);
    assert!((result.q_hat - 0.6).abs() < 0.03, "{}", result.q_hat);
}

#[test]
fn heuristic_agrees_with_exact_on_clean_data() {
    let center = Ranking::new(vec![7, 2, 9, 0, 4, 1, 8, 3, 6, 5]).unwrap();
    let data = sample(&center, 0.5, &DisplayPolicy::Full, 3, 5_000, 2);
    let exact = fit(&data, &FitOptions::default()).unwrap();
    let heuristic = fit(&data, &FitOptions { exact_cap: 5, seed: 3, ..FitOptions::default() }).unwrap();
    assert_eq!(heuristic.solver_status, SolverStatus::Heuristic);
    assert_eq!(exact.center, heuristic.center);
    assert_eq!(exact.objective, heuristic.objective);
    assert_eq!(exact.center, center);
}

#[test]
fn fitting_is_deterministic() {
    let center = Ranking::identity(12);
    let data = sample(&center, 0.7, &DisplayPolicy::SubsetsAtLeast(4), 2, 3_000, 4);
    let options = FitOptions { exact_cap: 8, seed: 11, ..FitOptions::default() };
    assert_eq!(fit(&data, &options).unwrap(), fit(&data, &options).unwrap());
}

#[test]
fn duplicating_the_data_keeps_the_estimate() {
    let center = Ranking::new(vec![2, 0, 1, 4, 3]).unwrap();
    let data = sample(&center, 0.4, &DisplayPolicy::AllPairs, 1, 3_000, 5);
    let doubled: Vec<ChoiceObservation> = data.iter().chain(data.iter()).cloned().collect();
    let a = fit(&data, &FitOptions::default()).unwrap();
    let b = fit(&doubled, &FitOptions::default()).unwrap();
    assert_eq!(a.center, b.center);
    assert_eq!(a.q_hat, b.q_hat);
}

#[test]
fn perfect_agreement_clamps_q() {
    let n = 5;
    let center = Ranking::identity(n);
    let data: Vec<ChoiceObservation> = (0..n - 1)
        .map(|i| ChoiceObservation::single(DisplaySet::new((i..n).collect(), n).unwrap(), i).unwrap())
        .collect();
    let estimate = solve_dispersion(&center, &data).unwrap();
    assert_eq!(estimate.alpha, ALPHA_MAX);
    let result = fit(&data, &FitOptions::default()).unwrap();
    assert_eq!(result.center, center);
    assert_eq!(result.q_hat, Q_MIN);
}

#[test]
fn uncovered_pair_is_reported() {
    let n = 5;
    let displays: Vec<DisplaySet> = vec![
        DisplaySet::new(vec![0, 1, 2, 3], n).unwrap(),
        DisplaySet::new(vec![0, 1, 2, 4], n).unwrap(),
    ];
    let data = sample(&Ranking::identity(n), 0.5, &DisplayPolicy::List(displays), 1, 500, 6);
    let report = coverage_report(n, &data);
    assert!(!report.all_covered());
    assert_eq!(report.uncovered, vec![(3, 4)]);
    assert_eq!(report.count(0, 1), 500);
}

#[test]
fn rejects_bad_inputs() {
    assert!(matches!(fit(&[], &FitOptions::default()), Err(Error::EmptyData)));
    let a = ChoiceObservation::single(DisplaySet::full(3), 0).unwrap();
    let b = ChoiceObservation::new(DisplaySet::full(4), TopKList::new(vec![1], 4).unwrap()).unwrap();
    assert!(matches!(fit(&[a, b], &FitOptions::default()), Err(Error::SizeMismatch { .. })));
}
