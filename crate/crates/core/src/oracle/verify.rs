use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::choice::{choice_prob, ranked_choice_prob};
use crate::error::{Error, Result};
use crate::model::RmjModel;
use crate::qmath::{psi, validate_q};
use crate::ranking::{DisplaySet, Ranking, TopKList};

use super::enumerate::{all_arrangements, all_subsets, MallowsSpec, RankingDistribution, ORACLE_CAP};
use super::inconsistency::{class_probabilities, class_probabilities_by_enumeration, demo_inconsistency, f_n, DemoOutcome};
use super::mallows::mallows_topk_pmf;

/// Absolute tolerance for every probability comparison.
pub const VERIFY_TOLERANCE: f64 = 1e-12;

/// Largest `n` for the conditional-choice grid, which is `O(n!·2^n·n)`.
pub const CONDITIONAL_CAP: usize = 6;

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub q: f64,
    pub cases: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub skipped: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub n: usize,
    pub q_grid: Vec<f64>,
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

struct Tally {
    cases: usize,
    max_error: f64,
}

impl Tally {
    fn new() -> Self {
        Self { cases: 0, max_error: 0.0 }
    }

    fn record(&mut self, a: f64, b: f64) {
        self.cases += 1;
        let e = (a - b).abs();
        // NaN must fail the check
        if !(e <= self.max_error) {
            self.max_error = if e.is_nan() { f64::INFINITY } else { e };
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.cases += other.cases;
        self.max_error = self.max_error.max(other.max_error);
        self
    }

    fn finish(self, name: &str, q: f64) -> CheckResult {
        CheckResult {
            name: name.to_string(),
            q,
            cases: self.cases,
            max_error: self.max_error,
            tolerance: VERIFY_TOLERANCE,
            passed: self.max_error <= VERIFY_TOLERANCE,
            skipped: false,
        }
    }
}

fn skipped(name: &str, q: f64) -> CheckResult {
    CheckResult {
        name: name.to_string(),
        q,
        cases: 0,
        max_error: 0.0,
        tolerance: VERIFY_TOLERANCE,
        passed: true,
        skipped: true,
    }
}

/// Mass of every prefix (including the empty one) of a distribution.
fn prefix_masses(dist: &RankingDistribution) -> HashMap<Vec<usize>, f64> {
    let mut out = HashMap::new();
    for (pi, p) in dist.iter() {
        for k in 0..=pi.n() {
            *out.entry(pi.order()[..k].to_vec()).or_insert(0.0) += p;
        }
    }
    out
}

/// Mass of every prefix of the order a distribution induces on `s`.
fn induced_prefix_masses(dist: &RankingDistribution, s: &DisplaySet) -> HashMap<Vec<usize>, f64> {
    let mut out = HashMap::new();
    for (pi, p) in dist.iter() {
        let induced: Vec<usize> = pi.order().iter().copied().filter(|&x| s.contains(x)).collect();
        for k in 1..=induced.len() {
            *out.entry(induced[..k].to_vec()).or_insert(0.0) += p;
        }
    }
    out
}

fn top_list(list: Vec<usize>, n: usize) -> Result<TopKList> {
    if list.is_empty() {
        Ok(TopKList::empty(n))
    } else {
        TopKList::new(list, n)
    }
}

/// A fixed non-identity centre: odd items first, then even ones.
pub fn scrambled_center(n: usize) -> Ranking {
    let order = (0..n).filter(|i| i % 2 == 1).chain((0..n).filter(|i| i % 2 == 0)).collect();
    Ranking::new(order).expect("permutation")
}

fn check_model(model: &RmjModel, label: &str, checks: &mut Vec<CheckResult>) -> Result<()> {
    let n = model.n();
    let q = model.q();
    let dist = RankingDistribution::rmj(model)?;
    let items: Vec<usize> = (0..n).collect();

    let mut t = Tally::new();
    let expected = psi(n, q)?;
    t.record(dist.normalizer() / expected, 1.0);
    checks.push(t.finish(&format!("{label}: normalizer equals psi"), q));

    let mut t = Tally::new();
    for (pi, p) in dist.iter() {
        t.record(model.pmf_full(pi)?, p);
    }
    checks.push(t.finish(&format!("{label}: full pmf"), q));

    let masses = prefix_masses(&dist);
    let mut t = Tally::new();
    for k in 1..=n {
        for list in all_arrangements(&items, k) {
            let pi_k = TopKList::new(list.clone(), n)?;
            t.record(model.pmf_topk(&pi_k)?, masses[&list]);
        }
    }
    checks.push(t.finish(&format!("{label}: top-k pmf"), q));

    let mut t = Tally::new();
    for k in 0..n {
        for list in all_arrangements(&items, k) {
            let pi_k = top_list(list.clone(), n)?;
            let parent = masses[&list];
            for (y, p) in model.next_item_distribution(&pi_k)? {
                let mut child = list.clone();
                child.push(y);
                t.record(p, masses[&child] / parent);
            }
        }
    }
    checks.push(t.finish(&format!("{label}: next-item distribution"), q));

    let subsets = all_subsets(n, 2);
    let (single, ranked) = subsets
        .par_iter()
        .map(|subset| -> Result<(Tally, Tally)> {
            let s = DisplaySet::new(subset.clone(), n)?;
            let table = induced_prefix_masses(&dist, &s);
            let mut single = Tally::new();
            let mut ranked = Tally::new();
            for &x in s.items() {
                single.record(choice_prob(model, &s, x)?, table[&vec![x]]);
            }
            for k in 1..=s.len() {
                let mut total = 0.0;
                for list in all_arrangements(s.items(), k) {
                    let p = ranked_choice_prob(model, &s, &TopKList::new(list.clone(), n)?)?;
                    ranked.record(p, table[&list]);
                    total += p;
                }
                ranked.record(total, 1.0);
            }
            Ok((single, ranked))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold((Tally::new(), Tally::new()), |(a, b), (c, d)| (a.merge(c), b.merge(d)));
    checks.push(single.finish(&format!("{label}: choice probability"), q));
    checks.push(ranked.finish(&format!("{label}: ranked choice probability"), q));

    let name = format!("{label}: conditional choice");
    if n > CONDITIONAL_CAP {
        checks.push(skipped(&name, q));
        return Ok(());
    }
    let t = (0..n)
        .into_par_iter()
        .map(|k| -> Result<Tally> {
            let mut t = Tally::new();
            for list in all_arrangements(&items, k) {
                let pi_k = top_list(list.clone(), n)?;
                let parent = pi_k.parent();
                let mass = masses[&list];
                for subset in all_subsets(n, 2) {
                    if subset.iter().any(|&y| parent.contains(y)) {
                        continue;
                    }
                    let s = DisplaySet::new(subset, n)?;
                    let mut tops = vec![0.0; n];
                    for (pi, p) in dist.iter() {
                        if pi_k.is_prefix_of(pi) {
                            let top = *pi.order().iter().find(|&&y| s.contains(y)).expect("non-empty");
                            tops[top] += p;
                        }
                    }
                    for &x in s.items() {
                        t.record(model.conditional_choice(&pi_k, &s, x)?, tops[x] / mass);
                    }
                }
            }
            Ok(t)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(Tally::new(), Tally::merge);
    checks.push(t.finish(&name, q));
    Ok(())
}

fn check_mallows(n: usize, q: f64, checks: &mut Vec<CheckResult>) -> Result<()> {
    let spec = MallowsSpec::new(n, q)?;
    let dist = RankingDistribution::mallows(&spec)?;
    let mut t = Tally::new();
    t.record(dist.normalizer() / psi(n, q)?, 1.0);
    checks.push(t.finish("mallows: normalizer equals psi", q));

    let masses = prefix_masses(&dist);
    let items: Vec<usize> = (0..n).collect();
    let mut t = Tally::new();
    for k in 1..=n {
        for list in all_arrangements(&items, k) {
            t.record(mallows_topk_pmf(&spec, &TopKList::new(list.clone(), n)?)?, masses[&list]);
        }
    }
    checks.push(t.finish("mallows: top-k pmf", q));

    if n < 4 {
        return Ok(());
    }
    let mut t = Tally::new();
    let closed = class_probabilities(&spec)?;
    t.record(closed.max_abs_diff(&class_probabilities_by_enumeration(&spec)?), 0.0);
    t.record(closed.total(), 1.0);
    checks.push(t.finish("mallows: class probabilities", q));

    let name = "mallows: bottom-swap construction";
    if f_n(n, q)? <= 0.0 {
        checks.push(skipped(name, q));
    } else {
        let report = demo_inconsistency(n, q)?;
        let mut result = Tally::new();
        result.record(report.max_choice_gap.unwrap_or(f64::INFINITY), 0.0);
        result.record(report.max_topk_marginal_gap.unwrap_or(f64::INFINITY), 0.0);
        let mut result = result.finish(name, q);
        result.passed &= report.outcome == DemoOutcome::Demonstrated;
        checks.push(result);
    }
    Ok(())
}

/// Compares every closed form against explicit enumeration over all `n!`
/// rankings, for each `q` in the grid and two centres.
pub fn run_verification(n: usize, q_grid: &[f64]) -> Result<VerificationReport> {
    if n > ORACLE_CAP {
        return Err(Error::TooLarge { n, cap: ORACLE_CAP });
    }
    if n < 2 {
        return Err(Error::Precondition("verification needs n >= 2".into()));
    }
    if q_grid.is_empty() {
        return Err(Error::Precondition("empty q grid".into()));
    }
    let mut checks = Vec::new();
    for &q in q_grid {
        validate_q(q)?;
        check_model(&RmjModel::new(Ranking::identity(n), q)?, "rmj identity centre", &mut checks)?;
        check_model(&RmjModel::new(scrambled_center(n), q)?, "rmj scrambled centre", &mut checks)?;
        check_mallows(n, q, &mut checks)?;
    }
    Ok(VerificationReport { n, q_grid: q_grid.to_vec(), checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_grid_passes() {
        let report = run_verification(4, &[0.1, 0.5, 0.9]).unwrap();
        for c in &report.checks {
            assert!(c.passed, "{} q={} err={}", c.name, c.q, c.max_error);
            assert!(c.skipped || c.cases > 0, "{}", c.name);
        }
    }

    #[test]
    fn tally_flags_nan() {
        let mut t = Tally::new();
        t.record(f64::NAN, 0.0);
        assert!(!t.finish("x", 0.5).passed);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(run_verification(9, &[0.5]).is_err());
        assert!(run_verification(4, &[]).is_err());
        assert!(run_verification(4, &[1.5]).is_err());
    }
}
