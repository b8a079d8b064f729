//! Mixtures of RMJ models fitted by expectation-maximization.
//!
//! Each EM iteration computes responsibilities `ĉ_tm ∝ p_m Pr_m(π_k^t | S_t)`
//! and then refits every component on responsibility-weighted data: the
//! centre from the weighted pairwise matrix, the dispersion from the weighted
//! convex problem, and `p_m` as the mean responsibility. Runs stop when no
//! centre changes and either the weights or the concentrations moved less
//! than `1e-3` in L1 norm.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::choice::{log_sum_exp, mixture_log_likelihood, ChoiceObservation};
use crate::error::{Error, Result};
use crate::estimation::{
    accumulate_weights_weighted, solve_center_exact, solve_center_heuristic, universe_size,
    DispersionStats, DEFAULT_EXACT_CAP, DEFAULT_RESTARTS,
};
use crate::model::RmjModel;
use crate::ranking::{check_same_n, Ranking};

/// Components whose total responsibility falls below this are reseeded.
pub const DEGENERATE_MASS: f64 = 1e-8;
const STOP_TOLERANCE: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub weight: f64,
    pub model: RmjModel,
}

impl Component {
    pub fn new(weight: f64, model: RmjModel) -> Self {
        Self { weight, model }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixtureModel {
    components: Vec<Component>,
}

impl MixtureModel {
    pub fn new(components: Vec<Component>) -> Result<Self> {
        let mix = Self { components };
        mix.validate()?;
        Ok(mix)
    }

    pub fn single(model: RmjModel) -> Self {
        Self {
            components: vec![Component::new(1.0, model)],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let Some(first) = self.components.first() else {
            return Err(Error::InvalidMixture("no components".into()));
        };
        let n = first.model.n();
        for c in &self.components {
            check_same_n(n, c.model.n())?;
            if !(c.weight > 0.0 && c.weight <= 1.0) {
                return Err(Error::InvalidMixture(format!(
                    "weight {} outside (0, 1]",
                    c.weight
                )));
            }
        }
        let total: f64 = self.components.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidMixture(format!("weights sum to {total}")));
        }
        Ok(())
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn n(&self) -> usize {
        self.components[0].model.n()
    }

    fn weights(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.weight).collect()
    }

    fn alphas(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.model.alpha()).collect()
    }
}

/// Responsibilities `ĉ_tm`, one row per observation; rows sum to one.
pub fn e_step(mix: &MixtureModel, data: &[ChoiceObservation]) -> Result<Vec<Vec<f64>>> {
    Ok(e_step_with_likelihood(mix, data)?.0)
}

fn e_step_with_likelihood(
    mix: &MixtureModel,
    data: &[ChoiceObservation],
) -> Result<(Vec<Vec<f64>>, f64)> {
    mix.validate()?;
    for obs in data {
        check_same_n(mix.n(), obs.n())?;
    }
    let ln_w: Vec<f64> = mix.components.iter().map(|c| c.weight.ln()).collect();
    let ln_q: Vec<f64> = mix.components.iter().map(|c| c.model.q().ln()).collect();
    let rows: Vec<(Vec<f64>, f64)> = data
        .par_iter()
        .map(|obs| {
            let mut row: Vec<f64> = mix
                .components
                .iter()
                .enumerate()
                .map(|(m, c)| {
                    let d = obs.disagreement_unchecked(c.model.center().positions()) as f64;
                    ln_w[m] + d * ln_q[m] - obs.ln_normalizer(c.model.q())
                })
                .collect();
            let total = log_sum_exp(&row);
            for v in row.iter_mut() {
                *v = (*v - total).exp();
            }
            (row, total)
        })
        .collect();
    let ll = rows.iter().map(|(_, l)| l).sum();
    Ok((rows.into_iter().map(|(r, _)| r).collect(), ll))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmOptions {
    /// Independent random initializations; the best final log-likelihood wins.
    pub restarts: usize,
    pub max_iterations: usize,
    pub exact_cap: usize,
    /// Restarts of the heuristic centre solver when `n > exact_cap`.
    pub solver_restarts: usize,
    pub seed: u64,
}

impl Default for EmOptions {
    fn default() -> Self {
        Self {
            restarts: 20,
            max_iterations: 200,
            exact_cap: DEFAULT_EXACT_CAP,
            solver_restarts: DEFAULT_RESTARTS,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MStep {
    pub model: MixtureModel,
    /// Components that were reseeded from a random ranking.
    pub reseeded: Vec<usize>,
}

/// Refits every component on responsibility-weighted data.
///
/// `previous`, when given, is kept for a component whose heuristic centre
/// would be worse than its current one on the weighted objective, so the
/// weighted objective never increases.
pub fn m_step<R: Rng + ?Sized>(
    responsibilities: &[Vec<f64>],
    data: &[ChoiceObservation],
    previous: Option<&MixtureModel>,
    options: &EmOptions,
    rng: &mut R,
) -> Result<MStep> {
    let n = universe_size(data)?;
    check_same_n(data.len(), responsibilities.len())?;
    let m_count = responsibilities[0].len();
    for row in responsibilities {
        check_same_n(m_count, row.len())?;
        let total: f64 = row.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Precondition(format!(
                "responsibility row sums to {total}"
            )));
        }
    }
    let t_count = data.len() as f64;
    let mut components = Vec::with_capacity(m_count);
    let mut reseeded = Vec::new();
    for m in 0..m_count {
        let column: Vec<f64> = responsibilities.iter().map(|row| row[m]).collect();
        let mass: f64 = column.iter().sum();
        if mass < DEGENERATE_MASS {
            reseeded.push(m);
            components.push(Component::new(0.0, random_component(n, rng)));
            continue;
        }
        let w = accumulate_weights_weighted(n, data, Some(&column))?;
        let center = if n <= options.exact_cap {
            solve_center_exact(&w, options.exact_cap)?.ranking
        } else {
            let candidate = solve_center_heuristic(&w, rng, options.solver_restarts);
            match previous.map(|p| p.components[m].model.center()) {
                Some(old) if w.objective(old) <= candidate.objective => old.clone(),
                _ => candidate.ranking,
            }
        };
        let estimate = DispersionStats::from_data(&center, data, Some(&column))?.solve();
        components.push(Component::new(
            mass / t_count,
            RmjModel::new_clamped(center, estimate.q),
        ));
    }
    if !reseeded.is_empty() {
        for &m in &reseeded {
            components[m].weight = 1.0 / m_count as f64;
        }
    }
    let total: f64 = components.iter().map(|c| c.weight).sum();
    for c in components.iter_mut() {
        c.weight /= total;
    }
    Ok(MStep {
        model: MixtureModel { components },
        reseeded,
    })
}

fn random_component<R: Rng + ?Sized>(n: usize, rng: &mut R) -> RmjModel {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let alpha: f64 = rng.gen_range(0.1..=3.0);
    RmjModel::new_clamped(Ranking::new(order).expect("permutation"), (-alpha).exp())
}

fn random_mixture<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> MixtureModel {
    MixtureModel {
        components: (0..m)
            .map(|_| Component::new(1.0 / m as f64, random_component(n, rng)))
            .collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    IterationCap,
}

/// One EM run from a single random initialization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmRun {
    pub restart: usize,
    /// Log-likelihood of the initial model and after every iteration.
    pub log_likelihoods: Vec<f64>,
    pub termination: Termination,
    /// Iterations in which at least one component was reseeded.
    pub reseed_iterations: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmTrace {
    pub runs: Vec<EmRun>,
    pub best_run: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MixtureFit {
    pub model: MixtureModel,
    pub log_likelihood: f64,
    pub trace: EmTrace,
    pub warnings: Vec<String>,
}

/// Best-of-restarts EM fit of an `m`-component mixture.
///
/// Restart `r` draws from a ChaCha8 stream `r` keyed by `options.seed`, so
/// results do not depend on thread scheduling.
pub fn fit_mixture(data: &[ChoiceObservation], m: usize, options: &EmOptions) -> Result<MixtureFit> {
    if m == 0 {
        return Err(Error::InvalidMixture("needs at least one component".into()));
    }
    let n = universe_size(data)?;
    let mut warnings = Vec::new();
    let distinct = data.iter().collect::<HashSet<_>>().len();
    if m > distinct {
        let msg = format!("{m} components for {distinct} distinct observations");
        log::warn!("{msg}");
        warnings.push(msg);
    }
    let runs: Vec<(MixtureModel, EmRun)> = (0..options.restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
            rng.set_stream(r as u64);
            run_em(data, n, m, r, options, &mut rng)
        })
        .collect::<Result<_>>()?;
    let best_run = runs
        .iter()
        .enumerate()
        .max_by(|(ia, a), (ib, b)| {
            let la = *a.1.log_likelihoods.last().unwrap();
            let lb = *b.1.log_likelihoods.last().unwrap();
            la.total_cmp(&lb).then(ib.cmp(ia))
        })
        .map(|(i, _)| i)
        .expect("at least one run");
    let model = runs[best_run].0.clone();
    // same summation order as evaluation so the two agree bit for bit
    let log_likelihood = mixture_log_likelihood(&model, data)?;
    Ok(MixtureFit {
        model,
        log_likelihood,
        trace: EmTrace {
            runs: runs.into_iter().map(|(_, run)| run).collect(),
            best_run,
        },
        warnings,
    })
}

fn run_em(
    data: &[ChoiceObservation],
    n: usize,
    m: usize,
    restart: usize,
    options: &EmOptions,
    rng: &mut ChaCha8Rng,
) -> Result<(MixtureModel, EmRun)> {
    let mut current = random_mixture(n, m, rng);
    let (mut resp, ll) = e_step_with_likelihood(&current, data)?;
    let mut lls = vec![ll];
    let mut reseed_iterations = Vec::new();
    let mut termination = Termination::IterationCap;
    for iteration in 0..options.max_iterations {
        let step = m_step(&resp, data, Some(&current), options, rng)?;
        if !step.reseeded.is_empty() {
            reseed_iterations.push(iteration);
        }
        let next = step.model;
        let (next_resp, ll) = e_step_with_likelihood(&next, data)?;
        lls.push(ll);
        let stop = step.reseeded.is_empty() && has_converged(&current, &next);
        current = next;
        resp = next_resp;
        if stop {
            termination = Termination::Converged;
            break;
        }
    }
    Ok((
        current,
        EmRun {
            restart,
            log_likelihoods: lls,
            termination,
            reseed_iterations,
        },
    ))
}

fn has_converged(prev: &MixtureModel, next: &MixtureModel) -> bool {
    let same_centers = prev
        .components
        .iter()
        .zip(&next.components)
        .all(|(a, b)| a.model.center() == b.model.center());
    let l1 = |a: Vec<f64>, b: Vec<f64>| -> f64 { a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum() };
    same_centers
        && (l1(prev.weights(), next.weights()) < STOP_TOLERANCE
            || l1(prev.alphas(), next.alphas()) < STOP_TOLERANCE)
}
