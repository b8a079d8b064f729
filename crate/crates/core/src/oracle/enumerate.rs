use crate::distance::{kendall_tau, rmj};
use crate::error::{Error, Result};
use crate::estimation::{solve_center_exact, WeightMatrix, DEFAULT_EXACT_CAP};
use crate::model::RmjModel;
use crate::qmath::validate_q;
use crate::ranking::{check_same_n, relabel, DisplaySet, Ranking, TopKList};

/// Largest universe the explicit tables accept (8! = 40,320 rankings).
pub const ORACLE_CAP: usize = 8;

/// Mallows (Kendall's tau) model centred at the identity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MallowsSpec {
    pub n: usize,
    pub q: f64,
}

impl MallowsSpec {
    pub fn new(n: usize, q: f64) -> Result<Self> {
        validate_q(q)?;
        Ok(Self { n, q })
    }
}

/// Every ranking of `0..n` in lexicographic order.
pub fn all_rankings(n: usize) -> Vec<Ranking> {
    let mut order: Vec<usize> = (0..n).collect();
    let mut out = vec![Ranking::new(order.clone()).expect("identity")];
    while next_permutation(&mut order) {
        out.push(Ranking::new(order.clone()).expect("permutation"));
    }
    out
}

/// Every ordered list of `k` distinct items of `items`.
pub fn all_arrangements(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    fn rec(items: &[usize], k: usize, used: &mut Vec<bool>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for (i, &x) in items.iter().enumerate() {
            if !used[i] {
                used[i] = true;
                cur.push(x);
                rec(items, k, used, cur, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(items, k, &mut vec![false; items.len()], &mut Vec::new(), &mut out);
    out
}

/// Every subset of `0..n` with at least `min_size` items, ascending.
pub fn all_subsets(n: usize, min_size: usize) -> Vec<Vec<usize>> {
    (0u32..(1 << n))
        .filter(|mask| mask.count_ones() as usize >= min_size)
        .map(|mask| (0..n).filter(|&i| mask & (1 << i) != 0).collect())
        .collect()
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).expect("pivot exists");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Position of `pi` in the lexicographic enumeration (Lehmer code).
fn lexicographic_index(pi: &Ranking) -> usize {
    let order = pi.order();
    let n = order.len();
    let mut index = 0;
    for i in 0..n {
        let smaller_later = order[i + 1..].iter().filter(|&&x| x < order[i]).count();
        index = index * (n - i) + smaller_later;
    }
    index
}

/// An explicit probability table over all `n!` rankings.
#[derive(Clone, Debug, PartialEq)]
pub struct RankingDistribution {
    n: usize,
    rankings: Vec<Ranking>,
    probs: Vec<f64>,
    normalizer: f64,
}

impl RankingDistribution {
    /// Normalizes non-negative weights given in lexicographic ranking order.
    pub fn from_weights(n: usize, weights: Vec<f64>) -> Result<Self> {
        if n > ORACLE_CAP {
            return Err(Error::TooLarge { n, cap: ORACLE_CAP });
        }
        let rankings = all_rankings(n);
        check_same_n(rankings.len(), weights.len())?;
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::Precondition("weights must be finite and non-negative".into()));
        }
        let normalizer: f64 = weights.iter().sum();
        if normalizer <= 0.0 {
            return Err(Error::Precondition("weights sum to zero".into()));
        }
        Ok(Self {
            n,
            probs: weights.iter().map(|w| w / normalizer).collect(),
            rankings,
            normalizer,
        })
    }

    /// RMJ table by direct summation of `q^{d_R(π*, π)}`.
    pub fn rmj(model: &RmjModel) -> Result<Self> {
        let n = model.n();
        if n > ORACLE_CAP {
            return Err(Error::TooLarge { n, cap: ORACLE_CAP });
        }
        let weights = all_rankings(n)
            .iter()
            .map(|pi| {
                let d = rmj(&relabel(pi, model.center()).expect("same n"));
                model.q().powi(d as i32)
            })
            .collect();
        Self::from_weights(n, weights)
    }

    /// Mallows table by direct summation of `q^{d_K(π)}`.
    pub fn mallows(spec: &MallowsSpec) -> Result<Self> {
        if spec.n > ORACLE_CAP {
            return Err(Error::TooLarge { n: spec.n, cap: ORACLE_CAP });
        }
        let weights = all_rankings(spec.n)
            .iter()
            .map(|pi| spec.q.powi(kendall_tau(pi) as i32))
            .collect();
        Self::from_weights(spec.n, weights)
    }

    /// Point mass on one ranking.
    pub fn point_mass(pi: &Ranking) -> Result<Self> {
        let n = pi.n();
        if n > ORACLE_CAP {
            return Err(Error::TooLarge { n, cap: ORACLE_CAP });
        }
        let mut weights = vec![0.0; (1..=n).product()];
        weights[lexicographic_index(pi)] = 1.0;
        Self::from_weights(n, weights)
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n > ORACLE_CAP {
            return Err(Error::TooLarge { n, cap: ORACLE_CAP });
        }
        Self::from_weights(n, vec![1.0; (1..=n).product()])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Sum of the unnormalized weights the table was built from.
    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Ranking, f64)> {
        self.rankings.iter().zip(self.probs.iter().copied())
    }

    pub fn prob(&self, pi: &Ranking) -> f64 {
        self.probs[lexicographic_index(pi)]
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Mass of all rankings that start with `pi_k`.
    pub fn marginal_topk(&self, pi_k: &TopKList) -> f64 {
        self.iter()
            .filter(|(pi, _)| pi_k.is_prefix_of(pi))
            .map(|(_, p)| p)
            .sum()
    }

    pub(crate) fn with_probs(&self, probs: Vec<f64>) -> Self {
        Self {
            n: self.n,
            rankings: self.rankings.clone(),
            probs,
            normalizer: 1.0,
        }
    }

    pub(crate) fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// `true` when `pi_k` is compatible with `ranking` in `s`: every listed item
/// is in `s` and beats every member of `s` not listed at or above it.
pub fn compatible(pi_k: &TopKList, ranking: &Ranking, s: &DisplaySet) -> bool {
    let items = pi_k.items();
    for (i, &z) in items.iter().enumerate() {
        if !s.contains(z) {
            return false;
        }
        let above = &items[..=i];
        for &x in s.items() {
            if !above.contains(&x) && !ranking.prefers(z, x) {
                return false;
            }
        }
    }
    true
}

/// `Pr(π_k | S) = Σ_π λ(π) 𝕀{π_k compatible with π in S}`, summed literally.
pub fn aggregate_choice(dist: &RankingDistribution, s: &DisplaySet, pi_k: &TopKList) -> Result<f64> {
    check_same_n(dist.n(), s.n())?;
    check_same_n(dist.n(), pi_k.n())?;
    if let Some(&item) = pi_k.items().iter().find(|&&x| !s.contains(x)) {
        return Err(Error::NotInDisplay { item });
    }
    Ok(dist
        .iter()
        .filter(|(pi, _)| compatible(pi_k, pi, s))
        .map(|(_, p)| p)
        .sum())
}

/// `P[x][y]`: probability that `x` is ranked ahead of `y`.
#[derive(Clone, Debug, PartialEq)]
pub struct PairwiseMarginals {
    n: usize,
    p: Vec<f64>,
}

impl PairwiseMarginals {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.p[x * self.n + y]
    }
}

pub fn pairwise_marginals(dist: &RankingDistribution) -> PairwiseMarginals {
    let n = dist.n();
    let mut p = vec![0.0; n * n];
    for (pi, prob) in dist.iter() {
        let order = pi.order();
        for (a, &x) in order.iter().enumerate() {
            for &y in &order[a + 1..] {
                p[x * n + y] += prob;
            }
        }
    }
    PairwiseMarginals { n, p }
}

/// Kemeny ranking of a distribution from its pairwise marginals: minimizes
/// the expected Kendall distance `Σ_{a ≻ b} P[b][a]`, solved exactly with
/// `w[x][y] = P[x][y]`.
pub fn kemeny_from_pairwise(marginals: &PairwiseMarginals) -> Result<Ranking> {
    let n = marginals.n();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|x| (0..n).map(|y| if x == y { 0.0 } else { marginals.get(x, y) }).collect())
        .collect();
    let w = WeightMatrix::from_rows(&rows)?;
    Ok(solve_center_exact(&w, DEFAULT_EXACT_CAP.max(n))?.ranking)
}
