//! Synthetic choice data from a mixture of RMJ models.

use std::str::FromStr;

use rand::seq::{index, SliceRandom};
use rand::Rng;

use crate::choice::ChoiceObservation;
use crate::error::{Error, Result};
use crate::mixture::MixtureModel;
use crate::ranking::DisplaySet;

/// How display sets are drawn for each record.
#[derive(Clone, Debug, PartialEq)]
pub enum DisplayPolicy {
    /// Every record shows all `n` items.
    Full,
    /// A uniformly random pair.
    AllPairs,
    /// A uniformly random subset among all subsets of size at least `m`.
    SubsetsAtLeast(usize),
    /// A uniformly random entry of a fixed list.
    List(Vec<DisplaySet>),
}

impl FromStr for DisplayPolicy {
    type Err = Error;

    /// Parses `full`, `all-pairs` or `all-subsets-ge:M`. Fixed lists are
    /// built with [`DisplayPolicy::List`] directly.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Self::Full),
            "all-pairs" => Ok(Self::AllPairs),
            _ => {
                let m = s
                    .strip_prefix("all-subsets-ge:")
                    .and_then(|m| m.parse::<usize>().ok())
                    .ok_or_else(|| Error::Precondition(format!("unknown display policy {s:?}")))?;
                Ok(Self::SubsetsAtLeast(m))
            }
        }
    }
}

impl DisplayPolicy {
    /// Smallest display set the policy can produce over `n` items.
    pub fn min_size(&self, n: usize) -> Result<usize> {
        match self {
            Self::Full => Ok(n),
            Self::AllPairs => Ok(2),
            Self::SubsetsAtLeast(m) => Ok((*m).max(2)),
            Self::List(sets) => sets
                .iter()
                .map(DisplaySet::len)
                .min()
                .ok_or_else(|| Error::Precondition("empty display list".into())),
        }
    }

    fn check(&self, n: usize, k: usize) -> Result<()> {
        if n < 2 {
            return Err(Error::Precondition("need at least two items".into()));
        }
        if let Self::SubsetsAtLeast(m) = self {
            if *m > n {
                return Err(Error::Precondition(format!("no subsets of size >= {m} among {n} items")));
            }
        }
        if let Self::List(sets) = self {
            if let Some(s) = sets.iter().find(|s| s.n() != n) {
                return Err(Error::SizeMismatch { expected: n, actual: s.n() });
            }
        }
        let min = self.min_size(n)?;
        if k == 0 || k > min {
            return Err(Error::Precondition(format!(
                "k = {k} must be in 1..={min}, the smallest display size of this policy"
            )));
        }
        Ok(())
    }

    fn draw<R: Rng + ?Sized>(&self, n: usize, size_weights: &[f64], rng: &mut R) -> DisplaySet {
        match self {
            Self::Full => DisplaySet::full(n),
            Self::AllPairs => {
                let pick = index::sample(rng, n, 2).into_vec();
                DisplaySet::new(pick, n).expect("distinct pair")
            }
            Self::SubsetsAtLeast(_) => {
                let size = draw_index(size_weights, rng);
                DisplaySet::new(index::sample(rng, n, size).into_vec(), n).expect("distinct subset")
            }
            Self::List(sets) => sets.choose(rng).expect("non-empty list").clone(),
        }
    }
}

/// Relative weight of each subset size `s` among subsets of size `>= m`,
/// proportional to `C(n, s)`; zero below `m`.
fn subset_size_weights(n: usize, m: usize) -> Vec<f64> {
    let ln_binom = |s: usize| -> f64 {
        (1..=s).map(|i| ((n - s + i) as f64).ln() - (i as f64).ln()).sum()
    };
    let lo = m.max(2);
    let top = (lo..=n).map(ln_binom).fold(f64::NEG_INFINITY, f64::max);
    (0..=n).map(|s| if s < lo { 0.0 } else { (ln_binom(s) - top).exp() }).collect()
}

fn draw_index<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.gen::<f64>() * total;
    let mut last = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            last = i;
            if u < w {
                return i;
            }
            u -= w;
        }
    }
    last
}

/// Draws `t` records: a component by weight, a display set by `policy`, then
/// the component's top-`k` of that display.
pub fn generate<R: Rng + ?Sized>(
    mix: &MixtureModel,
    policy: &DisplayPolicy,
    k: usize,
    t: usize,
    rng: &mut R,
) -> Result<Vec<ChoiceObservation>> {
    let n = mix.n();
    policy.check(n, k)?;
    let size_weights = match policy {
        DisplayPolicy::SubsetsAtLeast(m) => subset_size_weights(n, *m),
        _ => Vec::new(),
    };
    let weights: Vec<f64> = mix.components().iter().map(|c| c.weight).collect();
    let mut out = Vec::with_capacity(t);
    for _ in 0..t {
        let component = &mix.components()[draw_index(&weights, rng)];
        let display = policy.draw(n, &size_weights, rng);
        let response = component.model.sample_in_display(&display, k, rng)?;
        out.push(ChoiceObservation::new(display, response)?);
    }
    Ok(out)
}
