//! Choice and ranked-choice probabilities aggregated from the RMJ model.
//!
//! For a display set `S`, the top-`k` list a participant reports depends only
//! on the relative order of `S` under the centre:
//! `Pr(π_k | S) = q^{d_S(π_k) + L_S(π_k)} ψ(|S|-k, q) / ψ(|S|, q)`.
//! With `k = 1` this is the ordinal attraction model,
//! `Pr(x_i | S) = q^{i-1} / (1 + q + … + q^{|S|-1})`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mixture::MixtureModel;
use crate::model::RmjModel;
use crate::qmath::{ln_psi_tail, q_int};
use crate::ranking::{check_same_n, DisplaySet, Ranking, TopKList};

/// A display set and the ranked response given to it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ChoiceObservation {
    display: DisplaySet,
    response: TopKList,
}

impl ChoiceObservation {
    pub fn new(display: DisplaySet, response: TopKList) -> Result<Self> {
        check_same_n(display.n(), response.n())?;
        if response.is_empty() {
            return Err(Error::Precondition("empty response".into()));
        }
        if let Some(&item) = response.items().iter().find(|&&x| !display.contains(x)) {
            return Err(Error::NotInDisplay { item });
        }
        Ok(Self { display, response })
    }

    /// A single choice `x` out of `display`.
    pub fn single(display: DisplaySet, x: usize) -> Result<Self> {
        let n = display.n();
        Self::new(display, TopKList::new(vec![x], n)?)
    }

    pub fn display(&self) -> &DisplaySet {
        &self.display
    }

    pub fn response(&self) -> &TopKList {
        &self.response
    }

    pub fn k(&self) -> usize {
        self.response.k()
    }

    pub fn n(&self) -> usize {
        self.display.n()
    }

    /// `d^π_S + L^π_S`: weighted adjacent descents of the response under
    /// `center` plus the unlisted display items that `center` puts ahead of
    /// the last response.
    pub fn disagreement(&self, center: &Ranking) -> Result<u64> {
        check_same_n(center.n(), self.n())?;
        Ok(self.disagreement_unchecked(center.positions()))
    }

    pub(crate) fn disagreement_unchecked(&self, position: &[usize]) -> u64 {
        let items = self.response.items();
        let size = self.display.len();
        let mut total = 0u64;
        for (h, w) in items.windows(2).enumerate() {
            if position[w[0]] > position[w[1]] {
                total += (size - h - 1) as u64;
            }
        }
        let last = *items.last().expect("non-empty response");
        let last_pos = position[last];
        let ahead = self
            .display
            .items()
            .iter()
            .filter(|&&j| position[j] < last_pos)
            .count();
        // listed items other than `last` that sit ahead of it are not excluded
        let listed_ahead = items[..items.len() - 1]
            .iter()
            .filter(|&&j| position[j] < last_pos)
            .count();
        total + (ahead - listed_ahead) as u64
    }

    /// `ln ψ(|S|, q) - ln ψ(|S|-k, q)`.
    pub(crate) fn ln_normalizer(&self, q: f64) -> f64 {
        ln_psi_tail(self.display.len(), self.k(), q)
    }
}

/// `Pr(x | S)`.
pub fn choice_prob(model: &RmjModel, s: &DisplaySet, x: usize) -> Result<f64> {
    check_same_n(model.n(), s.n())?;
    if !s.contains(x) {
        return Err(Error::NotInDisplay { item: x });
    }
    let pos = model.center().position_of(x);
    let rank = s
        .items()
        .iter()
        .filter(|&&y| model.center().position_of(y) < pos)
        .count();
    Ok(model.q().powi(rank as i32) / q_int(s.len(), model.q()))
}

/// `Pr(π_k | S)`.
pub fn ranked_choice_prob(model: &RmjModel, s: &DisplaySet, pi_k: &TopKList) -> Result<f64> {
    Ok(ln_ranked_choice_prob(model, s, pi_k)?.exp())
}

pub fn ln_ranked_choice_prob(model: &RmjModel, s: &DisplaySet, pi_k: &TopKList) -> Result<f64> {
    check_same_n(model.n(), s.n())?;
    let obs = ChoiceObservation::new(s.clone(), pi_k.clone())?;
    Ok(ln_prob(model, &obs))
}

fn ln_prob(model: &RmjModel, obs: &ChoiceObservation) -> f64 {
    let d = obs.disagreement_unchecked(model.center().positions());
    d as f64 * model.q().ln() - obs.ln_normalizer(model.q())
}

/// `Σ_t ln Pr(π_k^t | S_t)`.
pub fn log_likelihood(model: &RmjModel, data: &[ChoiceObservation]) -> Result<f64> {
    for obs in data {
        check_same_n(model.n(), obs.n())?;
    }
    Ok(data.iter().map(|obs| ln_prob(model, obs)).sum())
}

/// Per-observation `ln Pr(π_k^t | S_t)`.
pub fn observation_log_probs(model: &RmjModel, data: &[ChoiceObservation]) -> Result<Vec<f64>> {
    for obs in data {
        check_same_n(model.n(), obs.n())?;
    }
    Ok(data.iter().map(|obs| ln_prob(model, obs)).collect())
}

/// `Σ_t ln Σ_m p_m Pr_m(π_k^t | S_t)`, via log-sum-exp.
pub fn mixture_log_likelihood(mix: &MixtureModel, data: &[ChoiceObservation]) -> Result<f64> {
    mix.validate()?;
    let per_component: Vec<Vec<f64>> = mix
        .components()
        .iter()
        .map(|c| observation_log_probs(&c.model, data))
        .collect::<Result<_>>()?;
    let ln_weights: Vec<f64> = mix.components().iter().map(|c| c.weight.ln()).collect();
    let mut total = 0.0;
    let mut terms = vec![0.0; ln_weights.len()];
    for t in 0..data.len() {
        for (m, term) in terms.iter_mut().enumerate() {
            *term = ln_weights[m] + per_component[m][t];
        }
        total += log_sum_exp(&terms);
    }
    Ok(total)
}

pub(crate) fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Log-likelihood of `data` when every ranking is equally likely:
/// `Pr(π_k | S) = (|S|-k)! / |S|!`.
pub fn uniform_log_likelihood(data: &[ChoiceObservation]) -> f64 {
    data.iter()
        .map(|obs| {
            let size = obs.display().len();
            -(size - obs.k() + 1..=size).map(|i| (i as f64).ln()).sum::<f64>()
        })
        .sum()
}

/// Serialized form of a choice observation, with item ids as plain integers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChoiceRecord {
    pub display: Vec<usize>,
    pub response: Vec<usize>,
}

impl ChoiceRecord {
    pub fn to_observation(&self, n: usize) -> Result<ChoiceObservation> {
        let display = DisplaySet::new(self.display.clone(), n)?;
        ChoiceObservation::new(display, TopKList::new(self.response.clone(), n)?)
    }
}

impl From<&ChoiceObservation> for ChoiceRecord {
    fn from(obs: &ChoiceObservation) -> Self {
        Self {
            display: obs.display().items().to_vec(),
            response: obs.response().items().to_vec(),
        }
    }
}
