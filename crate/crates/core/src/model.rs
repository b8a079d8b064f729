//! The RMJ ranking distribution `λ(π) ∝ q^{d_R(π*, π)}`.
//!
//! Every formula works in relabeled coordinates, where the central ranking
//! is the identity and an item's label is its position in the centre. The
//! normalizer of the full distribution is `ψ(n, q)`, the same as under
//! Kendall's tau, so top-k masses have the closed form
//! `q^{d(π_k) + L(π_k)} ψ(n-k, q) / ψ(n, q)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distance::{l_count, rmj, rmj_topk};
use crate::error::{Error, Result};
use crate::qmath::{self, ln_psi_tail, q_int, validate_q};
use crate::ranking::{check_same_n, relabel, relabel_display, relabel_topk, DisplaySet, Ranking, TopKList};

/// Central ranking `π*` and dispersion `q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RmjModel {
    center: Ranking,
    q: f64,
}

impl RmjModel {
    pub fn new(center: Ranking, q: f64) -> Result<Self> {
        validate_q(q)?;
        Ok(Self { center, q })
    }

    /// Builds a model after clamping `q` into the accepted range.
    pub fn new_clamped(center: Ranking, q: f64) -> Self {
        Self {
            center,
            q: qmath::clamp_q(q),
        }
    }

    pub fn center(&self) -> &Ranking {
        &self.center
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Concentration `α = -ln q`.
    pub fn alpha(&self) -> f64 {
        -self.q.ln()
    }

    pub fn n(&self) -> usize {
        self.center.n()
    }

    pub fn pmf_full(&self, pi: &Ranking) -> Result<f64> {
        Ok(self.ln_pmf_full(pi)?.exp())
    }

    pub fn ln_pmf_full(&self, pi: &Ranking) -> Result<f64> {
        let d = rmj(&relabel(pi, &self.center)?);
        Ok(d as f64 * self.q.ln() - ln_psi_tail(self.n(), self.n(), self.q))
    }

    /// Marginal mass of all rankings that start with `pi_k`.
    pub fn pmf_topk(&self, pi_k: &TopKList) -> Result<f64> {
        Ok(self.ln_pmf_topk(pi_k)?.exp())
    }

    pub fn ln_pmf_topk(&self, pi_k: &TopKList) -> Result<f64> {
        let local = relabel_topk(pi_k, &self.center)?;
        let exponent = rmj_topk(&local) + l_count(&local);
        Ok(exponent as f64 * self.q.ln() - ln_psi_tail(self.n(), local.k(), self.q))
    }

    /// Distribution of the item in position `k + 1` given the prefix `pi_k`.
    ///
    /// Entries are `(item, probability)` for every unlisted item, ordered by
    /// the item's position in the centre. Given the last listed item `z`, the
    /// remaining items after `z` in centre order get `q^0, q^1, …` and the
    /// ones before `z` continue the sequence, wrapping around.
    pub fn next_item_distribution(&self, pi_k: &TopKList) -> Result<Vec<(usize, f64)>> {
        check_same_n(self.n(), pi_k.n())?;
        if pi_k.k() >= self.n() {
            return Err(Error::Precondition(
                "prefix already contains every item".into(),
            ));
        }
        let local = relabel_topk(pi_k, &self.center)?;
        let remaining = local.complement();
        let pivot = pivot_index(&remaining, local.last());
        let m = remaining.len();
        let norm = q_int(m, self.q);
        Ok(remaining
            .iter()
            .enumerate()
            .map(|(j, &label)| {
                let exponent = (j + m - pivot) % m;
                (
                    self.center.item_at(label),
                    self.q.powi(exponent as i32) / norm,
                )
            })
            .collect())
    }

    /// Draws a top-k list by sequential sampling of the next item.
    ///
    /// Each step draws one uniform `f64` from `rng` and walks the cyclic
    /// geometric distribution of [`RmjModel::next_item_distribution`], so the
    /// output is a deterministic function of the generator state. Work is
    /// `O(n)` per position.
    pub fn sample_topk<R: Rng + ?Sized>(&self, k: usize, rng: &mut R) -> Result<TopKList> {
        if k == 0 || k > self.n() {
            return Err(Error::Precondition(format!(
                "k = {k} must be in 1..={}",
                self.n()
            )));
        }
        let labels = sample_identity_prefix(self.n(), k, self.q, rng);
        TopKList::new(
            labels.into_iter().map(|l| self.center.item_at(l)).collect(),
            self.n(),
        )
    }

    /// Draws a full ranking.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Ranking {
        let labels = sample_identity_prefix(self.n(), self.n(), self.q, rng);
        Ranking::new(labels.into_iter().map(|l| self.center.item_at(l)).collect())
            .expect("sampled a permutation")
    }

    /// Draws the top-`k` of `display` under this model.
    ///
    /// The induced order on a display set is the RMJ model over `|S|` items
    /// centred at the restriction of the centre, so sampling runs on the
    /// display's relative ranks.
    pub fn sample_in_display<R: Rng + ?Sized>(
        &self,
        display: &DisplaySet,
        k: usize,
        rng: &mut R,
    ) -> Result<TopKList> {
        let local = relabel_display(display, &self.center)?;
        if k == 0 || k > local.len() {
            return Err(Error::Precondition(format!(
                "k = {k} must be in 1..={}",
                local.len()
            )));
        }
        let ranks = sample_identity_prefix(local.len(), k, self.q, rng);
        TopKList::new(
            ranks
                .into_iter()
                .map(|r| self.center.item_at(local.items()[r]))
                .collect(),
            self.n(),
        )
    }

    /// Probability of choosing `x` from `s` given that the participant's
    /// top-k list is `pi_k`, where no item of `pi_k` except possibly the
    /// last lies in `s`.
    pub fn conditional_choice(&self, pi_k: &TopKList, s: &DisplaySet, x: usize) -> Result<f64> {
        check_same_n(self.n(), pi_k.n())?;
        check_same_n(self.n(), s.n())?;
        if !s.contains(x) {
            return Err(Error::NotInDisplay { item: x });
        }
        let parent = pi_k.parent();
        if let Some(&y) = parent.items().iter().find(|&&y| s.contains(y)) {
            return Err(Error::Precondition(format!(
                "item {y} above the last position is in the display set"
            )));
        }
        let local_s = relabel_display(s, &self.center)?;
        let local_x = self.center.position_of(x);
        let m = local_s.len();
        let i = local_s.relative_rank(local_x)?;
        let norm = q_int(m, self.q);
        let Some(z) = pi_k.last() else {
            return Ok(self.q.powi(i as i32) / norm);
        };
        if z == x {
            return Ok(1.0);
        }
        if s.contains(z) {
            return Ok(0.0);
        }
        let local_z = self.center.position_of(z);
        // members of S preferred to z under the centre
        let p = local_s.items().partition_point(|&v| v < local_z);
        let exponent = if local_z > local_x { m - p + i } else { i - p };
        Ok(self.q.powi(exponent as i32) / norm)
    }
}

/// Index in `remaining` (ascending) of the first label after `last`.
fn pivot_index(remaining: &[usize], last: Option<usize>) -> usize {
    match last {
        None => 0,
        Some(z) => remaining.partition_point(|&x| x < z),
    }
}

/// Samples the top-`k` labels of the identity-centred model over `0..n`.
fn sample_identity_prefix<R: Rng + ?Sized>(n: usize, k: usize, q: f64, rng: &mut R) -> Vec<usize> {
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity(k);
    let mut last = None;
    for _ in 0..k {
        let m = remaining.len();
        let pivot = pivot_index(&remaining, last);
        let offset = draw_truncated_geometric(m, q, rng);
        let label = remaining.remove((pivot + offset) % m);
        out.push(label);
        last = Some(label);
    }
    out
}

/// Draws `e ∈ 0..m` with probability `q^e / [m]_q`.
fn draw_truncated_geometric<R: Rng + ?Sized>(m: usize, q: f64, rng: &mut R) -> usize {
    let u: f64 = rng.gen::<f64>() * q_int(m, q);
    let mut acc = 0.0;
    let mut term = 1.0;
    for e in 0..m {
        acc += term;
        if u < acc {
            return e;
        }
        term *= q;
    }
    m - 1
}
