//! Distances from the identity ranking and their top-k and set-relative forms.
//!
//! All functions measure disagreement with the identity; use
//! [`crate::ranking::relabel`] first for an arbitrary central ranking, or the
//! `*_between` helpers.

use crate::error::{Error, Result};
use crate::ranking::{relabel, DisplaySet, Ranking, TopKList};

/// Kendall's tau distance to the identity: the number of discordant pairs.
pub fn kendall_tau(pi: &Ranking) -> u64 {
    let order = pi.order();
    let mut count = 0;
    for i in 0..order.len() {
        for j in i + 1..order.len() {
            if order[i] > order[j] {
                count += 1;
            }
        }
    }
    count
}

/// `d_K(a, b) = d_K(a⁻¹ b)`.
pub fn kendall_tau_between(a: &Ranking, b: &Ranking) -> Result<u64> {
    Ok(kendall_tau(&relabel(b, a)?))
}

/// Reverse major index: each adjacent descent at (1-based) position `i`
/// costs `n - i`.
pub fn rmj(pi: &Ranking) -> u64 {
    descent_weight(pi.order(), pi.n())
}

/// `d_R(a, b) = d_R(a⁻¹ b)`.
pub fn rmj_between(a: &Ranking, b: &Ranking) -> Result<u64> {
    Ok(rmj(&relabel(b, a)?))
}

/// Major index: each adjacent descent at (1-based) position `i` costs `i`.
pub fn major_index(pi: &Ranking) -> u64 {
    pi.order()
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0] > w[1])
        .map(|(i, _)| i as u64 + 1)
        .sum()
}

/// Reverse major index truncated at position `k`.
pub fn rmj_topk(pi_k: &TopKList) -> u64 {
    descent_weight(pi_k.items(), pi_k.n())
}

/// Items left out of `pi_k` whose label is smaller than its last item.
pub fn l_count(pi_k: &TopKList) -> u64 {
    let Some(last) = pi_k.last() else {
        return 0;
    };
    let listed_smaller = pi_k.items().iter().filter(|&&x| x < last).count();
    (last - listed_smaller) as u64
}

/// Reverse major index treating `s` as the universe: descents cost `|S| - i`.
pub fn rmj_set(pi_k: &TopKList, s: &DisplaySet) -> Result<u64> {
    check_subset(pi_k, s)?;
    Ok(descent_weight(pi_k.items(), s.len()))
}

/// Members of `s` left out of `pi_k` with a smaller label than its last item.
pub fn l_set(pi_k: &TopKList, s: &DisplaySet) -> Result<u64> {
    check_subset(pi_k, s)?;
    let Some(last) = pi_k.last() else {
        return Ok(0);
    };
    let below = s.relative_rank(last)?;
    let listed_below = pi_k.items().iter().filter(|&&x| x < last).count();
    Ok((below - listed_below) as u64)
}

fn descent_weight(items: &[usize], universe: usize) -> u64 {
    items
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0] > w[1])
        .map(|(i, _)| (universe - i - 1) as u64)
        .sum()
}

fn check_subset(pi_k: &TopKList, s: &DisplaySet) -> Result<()> {
    match pi_k.items().iter().find(|&&x| !s.contains(x)) {
        Some(&item) => Err(Error::NotInDisplay { item }),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r1(v: &[usize]) -> Ranking {
        Ranking::from_one_indexed(v).unwrap()
    }

    #[test]
    fn worked_example_4213() {
        let pi = r1(&[4, 2, 1, 3]);
        assert_eq!(kendall_tau(&pi), 4);
        assert_eq!(rmj(&pi), 5);
        assert_eq!(major_index(&pi), 3);
    }

    #[test]
    fn extremes() {
        for n in 1..9 {
            let top = (n * (n - 1) / 2) as u64;
            assert_eq!(kendall_tau(&Ranking::identity(n)), 0);
            assert_eq!(rmj(&Ranking::identity(n)), 0);
            assert_eq!(major_index(&Ranking::identity(n)), 0);
            assert_eq!(kendall_tau(&Ranking::reversal(n)), top);
            assert_eq!(rmj(&Ranking::reversal(n)), top);
            assert_eq!(major_index(&Ranking::reversal(n)), top);
        }
    }

    #[test]
    fn topk_example_7462() {
        let pi4 = TopKList::from_one_indexed(&[7, 4, 6, 2], 7).unwrap();
        assert_eq!(rmj_topk(&pi4), 10);
        assert_eq!(l_count(&pi4), 1);
        let s = DisplaySet::from_one_indexed(&[2, 3, 4, 5, 6, 7], 7).unwrap();
        assert_eq!(rmj_set(&pi4, &s).unwrap(), 8);
        assert_eq!(l_set(&pi4, &s).unwrap(), 0);
    }

    #[test]
    fn topk_small_cases() {
        assert_eq!(rmj_topk(&TopKList::new(vec![3], 5).unwrap()), 0);
        assert_eq!(rmj_topk(&TopKList::from_one_indexed(&[1, 2], 4).unwrap()), 0);
        assert_eq!(l_count(&TopKList::new(vec![2, 0], 5).unwrap()), 0);
        assert_eq!(l_count(&TopKList::from_one_indexed(&[5], 5).unwrap()), 4);
    }

    #[test]
    fn single_item_set_values_are_relative_rank() {
        let s = DisplaySet::new(vec![1, 4, 6, 7], 9).unwrap();
        for (rank, &z) in s.items().iter().enumerate() {
            let pi1 = TopKList::new(vec![z], 9).unwrap();
            assert_eq!(rmj_set(&pi1, &s).unwrap(), 0);
            assert_eq!(l_set(&pi1, &s).unwrap(), rank as u64);
        }
        let outside = TopKList::new(vec![2], 9).unwrap();
        assert!(rmj_set(&outside, &s).is_err());
        assert!(l_set(&outside, &s).is_err());
    }

    #[test]
    fn full_set_matches_universe_versions() {
        let s = DisplaySet::full(6);
        let pi_k = TopKList::new(vec![4, 1, 5], 6).unwrap();
        assert_eq!(rmj_set(&pi_k, &s).unwrap(), rmj_topk(&pi_k));
        assert_eq!(l_set(&pi_k, &s).unwrap(), l_count(&pi_k));
    }
}
