use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rmj::distance::{kendall_tau, major_index, rmj, rmj_between};
use rmj::estimation::{accumulate_weights_topk, accumulate_weights_weighted};
use rmj::io::{read_choice_log, write_choice_log};
use rmj::oracle::all_arrangements;
use rmj::{
    choice_prob, mixture_log_likelihood, ranked_choice_prob, ChoiceObservation, Component, DisplaySet,
    MixtureModel, Ranking, RmjModel, TopKList,
};

fn ranking(max_n: usize) -> impl Strategy<Value = Ranking> {
    (2..=max_n).prop_flat_map(|n| Just((0..n).collect::<Vec<_>>()).prop_shuffle().prop_map(|o| Ranking::new(o).unwrap()))
}

fn ranking_pair(max_n: usize) -> impl Strategy<Value = (Ranking, Ranking, Ranking)> {
    (2..=max_n).prop_flat_map(|n| {
        let perm = || Just((0..n).collect::<Vec<_>>()).prop_shuffle().prop_map(|o| Ranking::new(o).unwrap());
        (perm(), perm(), perm())
    })
}

/// A random observation over `n` items: a shuffled universe cut into a
/// display set and a response prefix.
fn observation(n: usize) -> impl Strategy<Value = ChoiceObservation> {
    (Just((0..n).collect::<Vec<_>>()).prop_shuffle(), 2..=n).prop_flat_map(move |(items, size)| {
        (Just(items), Just(size), 1..=size)
    })
    .prop_map(move |(items, size, k)| {
        let display = DisplaySet::new(items[..size].to_vec(), n).unwrap();
        ChoiceObservation::new(display, TopKList::new(items[..k].to_vec(), n).unwrap()).unwrap()
    })
}

fn dataset() -> impl Strategy<Value = (usize, Vec<ChoiceObservation>, Ranking)> {
    (2usize..=9).prop_flat_map(|n| {
        (
            Just(n),
            prop::collection::vec(observation(n), 1..40),
            Just((0..n).collect::<Vec<_>>()).prop_shuffle().prop_map(|o| Ranking::new(o).unwrap()),
        )
    })
}

proptest! {
    #[test]
    fn rmj_is_left_invariant((a, b, c) in ranking_pair(9)) {
        let lhs = rmj_between(&c.compose(&a).unwrap(), &c.compose(&b).unwrap()).unwrap();
        prop_assert_eq!(lhs, rmj_between(&a, &b).unwrap());
    }

    #[test]
    fn rmj_plus_major_index_counts_descents(pi in ranking(12)) {
        let n = pi.n() as u64;
        let descents = pi.order().windows(2).filter(|w| w[0] > w[1]).count() as u64;
        prop_assert_eq!(rmj(&pi) + major_index(&pi), n * descents);
        prop_assert!(rmj(&pi) <= n * (n - 1) / 2);
        prop_assert!(kendall_tau(&pi) <= n * (n - 1) / 2);
    }

    #[test]
    fn zero_distance_only_at_identity(pi in ranking(10)) {
        prop_assert_eq!(rmj(&pi) == 0, pi.is_identity());
        prop_assert_eq!(kendall_tau(&pi) == 0, pi.is_identity());
    }

    #[test]
    fn weighted_objective_equals_total_disagreement((n, data, center) in dataset()) {
        let w = accumulate_weights_topk(n, &data).unwrap();
        let total: u64 = data.iter().map(|o| o.disagreement(&center).unwrap()).sum();
        prop_assert_eq!(w.objective(&center), total as f64);
    }

    #[test]
    fn real_multipliers_scale_disagreement(
        (n, data, center) in dataset(),
        raw in prop::collection::vec(0.0f64..1.0, 40),
    ) {
        let multipliers = &raw[..data.len()];
        let w = accumulate_weights_weighted(n, &data, Some(multipliers)).unwrap();
        let total: f64 = data
            .iter()
            .zip(multipliers)
            .map(|(o, c)| c * o.disagreement(&center).unwrap() as f64)
            .sum();
        prop_assert!((w.objective(&center) - total).abs() <= 1e-9 * total.max(1.0));
    }

    #[test]
    fn choice_probabilities_decrease_along_the_centre(center in ranking(9), q in 0.01f64..0.99) {
        let n = center.n();
        let model = RmjModel::new(center.clone(), q).unwrap();
        let s = DisplaySet::full(n);
        let probs: Vec<f64> = center.order().iter().map(|&x| choice_prob(&model, &s, x).unwrap()).collect();
        prop_assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(probs.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn ranked_choice_levels_sum_to_one(center in ranking(6), q in 0.01f64..0.99, k in 1usize..=6) {
        let n = center.n();
        let k = k.min(n);
        let model = RmjModel::new(center, q).unwrap();
        let s = DisplaySet::full(n);
        let total: f64 = all_arrangements(s.items(), k)
            .into_iter()
            .map(|l| ranked_choice_prob(&model, &s, &TopKList::new(l, n).unwrap()).unwrap())
            .sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn display_samples_are_valid(center in ranking(12), q in 0.01f64..0.99, seed in any::<u64>(), k in 1usize..4) {
        let n = center.n();
        let model = RmjModel::new(center, q).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = DisplaySet::new((0..n).step_by(2).chain(std::iter::once(1)).collect(), n).unwrap();
        let k = k.min(s.len());
        let pi_k = model.sample_in_display(&s, k, &mut rng).unwrap();
        prop_assert_eq!(pi_k.k(), k);
        prop_assert!(s.contains_all(&pi_k));
    }

    #[test]
    fn conditional_choice_sums_to_one(center in ranking(7), q in 0.01f64..0.99, seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let n = center.n();
        let model = RmjModel::new(center, q).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut items: Vec<usize> = (0..n).collect();
        items.shuffle(&mut rng);
        // one listed item outside S, then the last item anywhere
        let prefix = items[..1].to_vec();
        let s: Vec<usize> = items[prefix.len()..].to_vec();
        prop_assume!(s.len() >= 2);
        let s = DisplaySet::new(s, n).unwrap();
        for last in 0..n {
            if prefix.contains(&last) {
                continue;
            }
            let mut list = prefix.clone();
            list.push(last);
            let pi_k = TopKList::new(list, n).unwrap();
            let total: f64 = s.items().iter().map(|&x| model.conditional_choice(&pi_k, &s, x).unwrap()).sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn component_relabeling_keeps_likelihood((n, data, center) in dataset(), q1 in 0.05f64..0.95, q2 in 0.05f64..0.95, p in 0.05f64..0.95) {
        let a = Component::new(p, RmjModel::new(center, q1).unwrap());
        let b = Component::new(1.0 - p, RmjModel::new(Ranking::identity(n), q2).unwrap());
        let ab = MixtureModel::new(vec![a.clone(), b.clone()]).unwrap();
        let ba = MixtureModel::new(vec![b, a]).unwrap();
        let (x, y) = (mixture_log_likelihood(&ab, &data).unwrap(), mixture_log_likelihood(&ba, &data).unwrap());
        prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0));
    }

    #[test]
    fn choice_log_roundtrip((n, data, _center) in dataset()) {
        let mut first = Vec::new();
        write_choice_log(&mut first, n, &data).unwrap();
        let log = read_choice_log(first.as_slice()).unwrap();
        prop_assert_eq!(&log.observations, &data);
        let mut second = Vec::new();
        write_choice_log(&mut second, log.n, &log.observations).unwrap();
        prop_assert_eq!(first, second);
    }
}
