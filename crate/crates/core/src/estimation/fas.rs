//! Minimum feedback arc set on the weighted tournament `w`.
//!
//! The exact solver is a dynamic program over the set of items already
//! placed at the top; the heuristic is insertion local search with restarts.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::weights::WeightMatrix;
use crate::error::{Error, Result};
use crate::ranking::Ranking;

pub const DEFAULT_EXACT_CAP: usize = 20;
pub const DEFAULT_RESTARTS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverStatus {
    Exact,
    Heuristic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CenterSolution {
    pub ranking: Ranking,
    pub objective: f64,
    pub status: SolverStatus,
}

/// Exact minimizer of `Σ_{i ≻ j} w[j][i]`, lexicographically smallest among
/// optimal rankings. Time `O(2^n n²)`, memory `O(2^n)`.
pub fn solve_center_exact(w: &WeightMatrix, cap: usize) -> Result<CenterSolution> {
    let n = w.n();
    if n > cap {
        return Err(Error::TooLarge { n, cap });
    }
    if n == 0 {
        return Ok(CenterSolution {
            ranking: Ranking::identity(0),
            objective: 0.0,
            status: SolverStatus::Exact,
        });
    }
    let full = (1usize << n) - 1;
    // column sums: weight against j from everyone
    let col: Vec<f64> = (0..n).map(|j| (0..n).map(|i| w.get(i, j)).sum()).collect();
    // best[T]: least cost of ordering the items outside T below the placed set T
    let mut best = vec![0.0f64; full + 1];
    let mut placed_against = vec![0.0f64; n];
    for mask in (0..full).rev() {
        step_costs(w, mask, &col, &mut placed_against);
        let mut value = f64::INFINITY;
        for j in 0..n {
            if mask & (1 << j) == 0 {
                let v = placed_against[j] + best[mask | (1 << j)];
                if v < value {
                    value = v;
                }
            }
        }
        best[mask] = value;
    }

    let mut order = Vec::with_capacity(n);
    let mut mask = 0usize;
    while mask != full {
        step_costs(w, mask, &col, &mut placed_against);
        let target = best[mask];
        let tol = 1e-9 * (1.0 + target.abs());
        let j = (0..n)
            .filter(|&j| mask & (1 << j) == 0)
            .find(|&j| placed_against[j] + best[mask | (1 << j)] <= target + tol)
            .expect("some item attains the optimum");
        order.push(j);
        mask |= 1 << j;
    }
    let ranking = Ranking::new(order).expect("DP yields a permutation");
    Ok(CenterSolution {
        objective: w.objective(&ranking),
        ranking,
        status: SolverStatus::Exact,
    })
}

/// For each unplaced `j`: cost of putting `j` next, i.e. `Σ_{i ∉ T, i ≠ j} w[i][j]`.
fn step_costs(w: &WeightMatrix, mask: usize, col: &[f64], out: &mut [f64]) {
    let n = w.n();
    for j in 0..n {
        if mask & (1 << j) != 0 {
            continue;
        }
        let mut placed = 0.0;
        let mut rest = mask;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            placed += w.get(i, j);
            rest &= rest - 1;
        }
        out[j] = col[j] - placed;
    }
}

/// Insertion local search from a score-ordered start plus random restarts.
///
/// Restart 0 starts from items sorted by `Σ_j (w[i][j] - w[j][i])`
/// descending; the others from uniform random permutations. One seed per
/// restart is drawn from `rng` up front, so the result does not depend on
/// scheduling. The best local optimum wins, ties going to the
/// lexicographically smaller ranking.
pub fn solve_center_heuristic<R: Rng + ?Sized>(
    w: &WeightMatrix,
    rng: &mut R,
    restarts: usize,
) -> CenterSolution {
    let n = w.n();
    let seeds: Vec<u64> = (0..restarts.max(1)).map(|_| rng.gen()).collect();
    let results: Vec<(f64, Vec<usize>)> = seeds
        .par_iter()
        .enumerate()
        .map(|(r, &seed)| {
            let mut order = if r == 0 {
                score_order(w)
            } else {
                let mut order: Vec<usize> = (0..n).collect();
                order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
                order
            };
            insertion_local_search(w, &mut order);
            let ranking = Ranking::new(order.clone()).expect("permutation");
            (w.objective(&ranking), order)
        })
        .collect();
    let (objective, order) = results
        .into_iter()
        .min_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)))
        .expect("at least one restart");
    CenterSolution {
        ranking: Ranking::new(order).expect("permutation"),
        objective,
        status: SolverStatus::Heuristic,
    }
}

/// Items by descending net score, ties by label.
pub fn score_order(w: &WeightMatrix) -> Vec<usize> {
    let n = w.n();
    let score: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|j| w.get(i, j) - w.get(j, i)).sum())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| score[b].total_cmp(&score[a]).then(a.cmp(&b)));
    order
}

/// Moves single items to their best position until no move improves the
/// objective.
pub fn insertion_local_search(w: &WeightMatrix, order: &mut Vec<usize>) {
    let n = order.len();
    loop {
        let mut improved = false;
        for a in 0..n {
            let x = order[a];
            let mut best_delta = 0.0;
            let mut best_pos = a;
            let mut delta = 0.0;
            for (b, &y) in order.iter().enumerate().skip(a + 1) {
                delta += w.get(x, y) - w.get(y, x);
                if delta < best_delta - 1e-12 {
                    best_delta = delta;
                    best_pos = b;
                }
            }
            delta = 0.0;
            for b in (0..a).rev() {
                let y = order[b];
                delta += w.get(y, x) - w.get(x, y);
                if delta < best_delta - 1e-12 {
                    best_delta = delta;
                    best_pos = b;
                }
            }
            if best_pos != a {
                let item = order.remove(a);
                order.insert(best_pos, item);
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_min(w: &WeightMatrix) -> f64 {
        fn rec(w: &WeightMatrix, order: &mut Vec<usize>, used: &mut Vec<bool>, best: &mut f64) {
            if order.len() == w.n() {
                let v = w.objective(&Ranking::new(order.clone()).unwrap());
                if v < *best {
                    *best = v;
                }
                return;
            }
            for x in 0..w.n() {
                if !used[x] {
                    used[x] = true;
                    order.push(x);
                    rec(w, order, used, best);
                    order.pop();
                    used[x] = false;
                }
            }
        }
        let mut best = f64::INFINITY;
        rec(w, &mut Vec::new(), &mut vec![false; w.n()], &mut best);
        best
    }

    fn random_matrix(n: usize, rng: &mut ChaCha8Rng) -> WeightMatrix {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { 0.0 } else { rng.gen_range(0..10) as f64 })
                    .collect()
            })
            .collect();
        WeightMatrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn dominance_order_is_recovered() {
        let n = 6;
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i < j { 3.0 } else if i > j { 1.0 } else { 0.0 }).collect())
            .collect();
        let w = WeightMatrix::from_rows(&rows).unwrap();
        let sol = solve_center_exact(&w, 20).unwrap();
        assert!(sol.ranking.is_identity());
        assert_eq!(sol.objective, 15.0);
    }

    #[test]
    fn zero_weights_tie_break_to_identity() {
        let sol = solve_center_exact(&WeightMatrix::zeros(5), 20).unwrap();
        assert!(sol.ranking.is_identity());
        assert_eq!(sol.objective, 0.0);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            solve_center_exact(&WeightMatrix::zeros(9), 8),
            Err(Error::TooLarge { n: 9, cap: 8 })
        ));
    }

    #[test]
    fn exact_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..40 {
            let n = rng.gen_range(1..=6);
            let w = random_matrix(n, &mut rng);
            let sol = solve_center_exact(&w, 20).unwrap();
            assert_eq!(sol.objective, brute_force_min(&w));
        }
    }

    #[test]
    fn heuristic_never_beats_exact_and_never_loses_to_its_start() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..30 {
            let w = random_matrix(8, &mut rng);
            let exact = solve_center_exact(&w, 20).unwrap();
            let start = w.objective(&Ranking::new(score_order(&w)).unwrap());
            let heur = solve_center_heuristic(&w, &mut rng, 5);
            assert!(heur.objective >= exact.objective);
            assert!(heur.objective <= start);
            assert_eq!(heur.objective, w.objective(&heur.ranking));
        }
    }
}
