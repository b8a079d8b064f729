use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rmj::oracle::all_arrangements;
use rmj::synth::{generate, DisplayPolicy};
use rmj::{ranked_choice_prob, DisplaySet, MixtureModel, Ranking, RmjModel, TopKList};

fn total_variation(counts: &HashMap<Vec<usize>, usize>, draws: usize, exact: impl Fn(&[usize]) -> f64, support: Vec<Vec<usize>>) -> f64 {
    support
        .iter()
        .map(|l| (counts.get(l).copied().unwrap_or(0) as f64 / draws as f64 - exact(l)).abs())
        .sum::<f64>()
        / 2.0
}

#[test]
fn full_rankings_follow_the_pmf() {
    let n = 4;
    let model = RmjModel::new(Ranking::new(vec![2, 0, 3, 1]).unwrap(), 0.6).unwrap();
    let draws = 1_000_000;
    let data = generate(&MixtureModel::single(model.clone()), &DisplayPolicy::Full, n, draws, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    let mut counts = HashMap::new();
    for obs in &data {
        *counts.entry(obs.response().items().to_vec()).or_insert(0) += 1;
    }
    let items: Vec<usize> = (0..n).collect();
    let tv = total_variation(
        &counts,
        draws,
        |l| model.pmf_full(&Ranking::new(l.to_vec()).unwrap()).unwrap(),
        all_arrangements(&items, n),
    );
    assert!(tv < 0.005, "TV {tv}");
}

#[test]
fn top_k_samples_follow_the_closed_form() {
    let n = 6;
    let model = RmjModel::new(Ranking::reversal(n), 0.5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let draws = 200_000;
    let mut counts = HashMap::new();
    for _ in 0..draws {
        *counts.entry(model.sample_topk(2, &mut rng).unwrap().items().to_vec()).or_insert(0) += 1;
    }
    let items: Vec<usize> = (0..n).collect();
    let tv = total_variation(
        &counts,
        draws,
        |l| model.pmf_topk(&TopKList::new(l.to_vec(), n).unwrap()).unwrap(),
        all_arrangements(&items, 2),
    );
    assert!(tv < 0.01, "TV {tv}");
}

#[test]
fn display_samples_follow_ranked_choice() {
    let n = 7;
    let model = RmjModel::new(Ranking::new(vec![6, 1, 4, 0, 2, 5, 3]).unwrap(), 0.7).unwrap();
    let s = DisplaySet::new(vec![0, 2, 3, 5, 6], n).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let draws = 200_000;
    let mut counts = HashMap::new();
    for _ in 0..draws {
        *counts.entry(model.sample_in_display(&s, 2, &mut rng).unwrap().items().to_vec()).or_insert(0) += 1;
    }
    let tv = total_variation(
        &counts,
        draws,
        |l| ranked_choice_prob(&model, &s, &TopKList::new(l.to_vec(), n).unwrap()).unwrap(),
        all_arrangements(s.items(), 2),
    );
    assert!(tv < 0.01, "TV {tv}");
}

#[test]
fn same_seed_same_draws() {
    let model = RmjModel::new(Ranking::identity(30), 0.8).unwrap();
    let a: Vec<Ranking> = (0..5).scan(ChaCha8Rng::seed_from_u64(4), |r, _| Some(model.sample(r))).collect();
    let b: Vec<Ranking> = (0..5).scan(ChaCha8Rng::seed_from_u64(4), |r, _| Some(model.sample(r))).collect();
    assert_eq!(a, b);
}
