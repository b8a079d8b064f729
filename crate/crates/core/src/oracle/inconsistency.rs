use serde::Serialize;

use crate::error::{Error, Result};
use crate::qmath::validate_q;
use crate::ranking::{DisplaySet, Ranking, TopKList};

use super::enumerate::{
    aggregate_choice, all_arrangements, all_subsets, kemeny_from_pairwise, pairwise_marginals,
    MallowsSpec, RankingDistribution,
};
use super::mallows::mallows_topk_pmf;

/// Where the two largest labels sit relative to a ranking's top-(n−2) prefix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Group {
    /// `n−2` is listed and beats `n−1` (0-indexed labels).
    SecondLastAhead,
    /// `n−1` is listed and beats `n−2`.
    LastAhead,
    /// Neither is listed.
    BothBottom,
}

/// Classifies the top-(n−2) prefix of a ranking; `n ≥ 3`.
pub fn group_of(pi: &Ranking) -> Group {
    let n = pi.n();
    let (a, b) = (n - 2, n - 1);
    let (pa, pb) = (pi.position_of(a), pi.position_of(b));
    if pa >= n - 2 && pb >= n - 2 {
        Group::BothBottom
    } else if pa < pb {
        Group::SecondLastAhead
    } else {
        Group::LastAhead
    }
}

fn check_size(n: usize) -> Result<()> {
    if n < 4 {
        return Err(Error::Precondition(format!("construction needs n >= 4, got {n}")));
    }
    Ok(())
}

/// Moves the mass of every ranking that ends `(.., n−2, n−1)` onto its
/// bottom-swapped twin `(.., n−1, n−2)`. Top-(n−2) prefixes keep their mass.
pub fn build_tilde_lambda(spec: &MallowsSpec) -> Result<RankingDistribution> {
    check_size(spec.n)?;
    let base = RankingDistribution::mallows(spec)?;
    let n = spec.n;
    let mut probs = base.probs().to_vec();
    for (i, (pi, p)) in base.iter().enumerate() {
        if group_of(pi) != Group::BothBottom {
            continue;
        }
        if pi.item_at(n - 2) == n - 2 {
            probs[i] = 0.0;
        } else {
            let twin = pi.swap_adjacent(n - 2);
            probs[i] = p + base.prob(&twin);
        }
    }
    Ok(base.with_probs(probs))
}

/// Masses of the head/tail classes of top-(n−2) lists under the Mallows model.
/// `a`: both largest labels unlisted; `b`: only `n−2` listed; `c`: only `n−1`
/// listed; `d1`/`d2`: both listed, `n−2` ahead / behind.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClassProbabilities {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d1: f64,
    pub d2: f64,
}

impl ClassProbabilities {
    pub fn total(&self) -> f64 {
        self.a + self.b + self.c + self.d1 + self.d2
    }

    pub fn max_abs_diff(&self, other: &ClassProbabilities) -> f64 {
        [
            self.a - other.a,
            self.b - other.b,
            self.c - other.c,
            self.d1 - other.d1,
            self.d2 - other.d2,
        ]
        .iter()
        .fold(0.0, |m, d| m.max(d.abs()))
    }
}

pub fn class_probabilities(spec: &MallowsSpec) -> Result<ClassProbabilities> {
    check_size(spec.n)?;
    let q = validate_q(spec.q)?;
    let n = spec.n as i32;
    let a = (1.0 - q) * (1.0 - q * q) / ((1.0 - q.powi(n - 1)) * (1.0 - q.powi(n)));
    let b: f64 = (1..=n - 2).map(|m| q.powi(n - 1 - m)).sum::<f64>() * a;
    let mut d = 0.0;
    for j in 1..=n - 3 {
        for k in j + 1..=n - 2 {
            d += q.powi(2 * n - 1 - j - k);
        }
    }
    let d1 = d * a / (1.0 + q);
    Ok(ClassProbabilities { a, b, c: q * b, d1, d2: q * d1 })
}

/// Same masses by summing the closed-form Mallows top-(n−2) pmf over every list.
pub fn class_probabilities_by_enumeration(spec: &MallowsSpec) -> Result<ClassProbabilities> {
    check_size(spec.n)?;
    let n = spec.n;
    let (x, y) = (n - 2, n - 1);
    let items: Vec<usize> = (0..n).collect();
    let mut out = ClassProbabilities { a: 0.0, b: 0.0, c: 0.0, d1: 0.0, d2: 0.0 };
    for list in all_arrangements(&items, n - 2) {
        let px = list.iter().position(|&z| z == x);
        let py = list.iter().position(|&z| z == y);
        let p = mallows_topk_pmf(spec, &TopKList::new(list, n)?)?;
        match (px, py) {
            (None, None) => out.a += p,
            (Some(_), None) => out.b += p,
            (None, Some(_)) => out.c += p,
            (Some(i), Some(j)) if i < j => out.d1 += p,
            _ => out.d2 += p,
        }
    }
    Ok(out)
}

/// `(1 − P_A) / (1 + q)`: mass of rankings whose prefix puts `n−2` ahead of `n−1`.
pub fn group1_mass(spec: &MallowsSpec) -> Result<f64> {
    let classes = class_probabilities(spec)?;
    Ok((1.0 - classes.a) / (1.0 + spec.q))
}

pub fn group1_mass_by_enumeration(spec: &MallowsSpec) -> Result<f64> {
    check_size(spec.n)?;
    let dist = RankingDistribution::mallows(spec)?;
    Ok(dist
        .iter()
        .filter(|(pi, _)| group_of(pi) == Group::SecondLastAhead)
        .map(|(_, p)| p)
        .sum())
}

/// `F_n(q) = 1 + q^{n−1} + q^n − 2q² − q^{2n−1}`; positive exactly when the
/// group-1 mass is below one half.
pub fn f_n(n: usize, q: f64) -> Result<f64> {
    check_size(n)?;
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidDispersion(q));
    }
    let n = n as i32;
    Ok(1.0 + q.powi(n - 1) + q.powi(n) - 2.0 * q * q - q.powi(2 * n - 1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DemoOutcome {
    /// λ̃ reproduces the choice data yet aggregates to the wrong ranking.
    Demonstrated,
    /// `F_n(q) ≤ 0`: the construction does not apply at this `(n, q)`.
    Inconclusive,
    /// Some check failed.
    Failed,
}

#[derive(Clone, Debug, Serialize)]
pub struct InconsistencyReport {
    pub n: usize,
    pub q: f64,
    pub f_n: f64,
    pub outcome: DemoOutcome,
    pub tilde_total: Option<f64>,
    pub max_topk_marginal_gap: Option<f64>,
    pub max_choice_gap: Option<f64>,
    pub choice_cases: usize,
    /// Probability under λ̃ that `n−2` precedes `n−1`.
    pub tilde_pairwise: Option<f64>,
    pub group1_formula: Option<f64>,
    pub group1_enumerated: Option<f64>,
    pub max_class_gap: Option<f64>,
    pub true_ranking: Option<Ranking>,
    pub recovered_ranking: Option<Ranking>,
    /// Pairwise marginals of λ̃, `pairwise[x][y] = P(x before y)`.
    pub pairwise: Vec<Vec<f64>>,
}

/// Agreement tolerance used by every check of the demonstration.
pub const DEMO_TOLERANCE: f64 = 1e-12;

/// Runs the full construction at `(n, q)`. When `F_n(q) ≤ 0` no enumeration
/// is attempted and the outcome is `Inconclusive`.
pub fn demo_inconsistency(n: usize, q: f64) -> Result<InconsistencyReport> {
    let spec = MallowsSpec::new(n, q)?;
    let f = f_n(n, q)?;
    let mut report = InconsistencyReport {
        n,
        q,
        f_n: f,
        outcome: DemoOutcome::Inconclusive,
        tilde_total: None,
        max_topk_marginal_gap: None,
        max_choice_gap: None,
        choice_cases: 0,
        tilde_pairwise: None,
        group1_formula: None,
        group1_enumerated: None,
        max_class_gap: None,
        true_ranking: None,
        recovered_ranking: None,
        pairwise: Vec::new(),
    };
    if f <= 0.0 {
        return Ok(report);
    }

    let base = RankingDistribution::mallows(&spec)?;
    let tilde = build_tilde_lambda(&spec)?;
    let items: Vec<usize> = (0..n).collect();

    let mut topk_gap: f64 = 0.0;
    for list in all_arrangements(&items, n - 2) {
        let pi_k = TopKList::new(list, n)?;
        topk_gap = topk_gap.max((base.marginal_topk(&pi_k) - tilde.marginal_topk(&pi_k)).abs());
    }

    let mut choice_gap: f64 = 0.0;
    let mut cases = 0;
    for subset in all_subsets(n, 3) {
        let s = DisplaySet::new(subset, n)?;
        for &x in s.items() {
            let pi_k = TopKList::new(vec![x], n)?;
            let gap = aggregate_choice(&base, &s, &pi_k)? - aggregate_choice(&tilde, &s, &pi_k)?;
            choice_gap = choice_gap.max(gap.abs());
            cases += 1;
        }
    }

    let tilde_marginals = pairwise_marginals(&tilde);
    let tilde_pairwise = tilde_marginals.get(n - 2, n - 1);
    let formula = group1_mass(&spec)?;
    let enumerated = group1_mass_by_enumeration(&spec)?;
    let class_gap = class_probabilities(&spec)?.max_abs_diff(&class_probabilities_by_enumeration(&spec)?);
    let true_ranking = kemeny_from_pairwise(&pairwise_marginals(&base))?;
    let recovered = kemeny_from_pairwise(&tilde_marginals)?;
    let swapped = Ranking::identity(n).swap_adjacent(n - 2);

    let passed = (tilde.total() - 1.0).abs() <= DEMO_TOLERANCE
        && topk_gap <= DEMO_TOLERANCE
        && choice_gap <= DEMO_TOLERANCE
        && tilde_pairwise < 0.5
        && (formula - enumerated).abs() <= DEMO_TOLERANCE
        && (tilde_pairwise - enumerated).abs() <= DEMO_TOLERANCE
        && class_gap <= DEMO_TOLERANCE
        && true_ranking.is_identity()
        && recovered == swapped;

    report.outcome = if passed { DemoOutcome::Demonstrated } else { DemoOutcome::Failed };
    report.tilde_total = Some(tilde.total());
    report.max_topk_marginal_gap = Some(topk_gap);
    report.max_choice_gap = Some(choice_gap);
    report.choice_cases = cases;
    report.tilde_pairwise = Some(tilde_pairwise);
    report.group1_formula = Some(formula);
    report.group1_enumerated = Some(enumerated);
    report.max_class_gap = Some(class_gap);
    report.true_ranking = Some(true_ranking);
    report.recovered_ranking = Some(recovered);
    report.pairwise = (0..n)
        .map(|x| (0..n).map(|y| if x == y { 0.0 } else { tilde_marginals.get(x, y) }).collect())
        .collect();
    Ok(report)
}
