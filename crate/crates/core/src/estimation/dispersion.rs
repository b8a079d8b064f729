//! One-dimensional MLE for the concentration `α = -ln q` given a centre.
//!
//! The negative log-likelihood is
//! `α·D + Σ_t Σ_{i=|S_t|-k_t+1}^{|S_t|} ln Σ_{j<i} e^{-jα}`, where `D` is the
//! total disagreement of the data with the centre. It is convex in `α`; its
//! derivative `D - Σ E_i(α)` is increasing, so the minimizer is found by
//! bisection on the sign of the derivative.

use crate::choice::ChoiceObservation;
use crate::error::{Error, Result};
use crate::ranking::{check_same_n, Ranking};

pub const ALPHA_MIN: f64 = 1e-6;
pub const ALPHA_MAX: f64 = 50.0;
const BISECTION_WIDTH: f64 = 1e-12;

/// Sufficient statistics for the dispersion problem.
#[derive(Clone, Debug, PartialEq)]
pub struct DispersionStats {
    /// Weighted total disagreement `D`.
    pub disagreement: f64,
    /// `size_weights[i]`: total weight of `ln [i]_q` terms in the normalizer.
    pub size_weights: Vec<f64>,
}

impl DispersionStats {
    pub fn from_data(
        center: &Ranking,
        data: &[ChoiceObservation],
        multipliers: Option<&[f64]>,
    ) -> Result<Self> {
        if let Some(m) = multipliers {
            check_same_n(data.len(), m.len())?;
        }
        let mut disagreement = 0.0;
        let mut size_weights = vec![0.0; center.n() + 1];
        for (t, obs) in data.iter().enumerate() {
            check_same_n(center.n(), obs.n())?;
            let c = multipliers.map_or(1.0, |m| m[t]);
            if c == 0.0 {
                continue;
            }
            disagreement += c * obs.disagreement_unchecked(center.positions()) as f64;
            let size = obs.display().len();
            for i in size - obs.k() + 1..=size {
                size_weights[i] += c;
            }
        }
        Ok(Self {
            disagreement,
            size_weights,
        })
    }

    /// Negative log-likelihood up to a constant.
    pub fn loss(&self, alpha: f64) -> f64 {
        let ln_norm: f64 = self
            .size_weights
            .iter()
            .enumerate()
            .filter(|(_, &h)| h != 0.0)
            .map(|(i, &h)| h * ln_geometric_sum(i, alpha))
            .sum();
        alpha * self.disagreement + ln_norm
    }

    pub fn derivative(&self, alpha: f64) -> f64 {
        let expected: f64 = self
            .size_weights
            .iter()
            .enumerate()
            .filter(|(_, &h)| h != 0.0)
            .map(|(i, &h)| h * expected_offset(i, alpha))
            .sum();
        self.disagreement - expected
    }

    /// Largest attainable expected disagreement (the `α → 0` limit).
    pub fn max_expected(&self) -> f64 {
        self.size_weights
            .iter()
            .enumerate()
            .map(|(i, &h)| h * (i.saturating_sub(1)) as f64 / 2.0)
            .sum()
    }

    /// Minimizer over `[ALPHA_MIN, ALPHA_MAX]`.
    pub fn solve(&self) -> DispersionEstimate {
        let alpha = if self.derivative(ALPHA_MIN) >= 0.0 {
            ALPHA_MIN
        } else if self.derivative(ALPHA_MAX) <= 0.0 {
            ALPHA_MAX
        } else {
            let (mut lo, mut hi) = (ALPHA_MIN, ALPHA_MAX);
            while hi - lo > BISECTION_WIDTH {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if self.derivative(mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        DispersionEstimate {
            alpha,
            q: (-alpha).exp(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DispersionEstimate {
    pub alpha: f64,
    pub q: f64,
}

/// MLE of the dispersion for a fixed centre.
pub fn solve_dispersion(center: &Ranking, data: &[ChoiceObservation]) -> Result<DispersionEstimate> {
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    Ok(DispersionStats::from_data(center, data, None)?.solve())
}

/// `ln Σ_{j<i} e^{-jα}`.
fn ln_geometric_sum(i: usize, alpha: f64) -> f64 {
    let r = (-alpha).exp();
    let mut sum = 0.0;
    let mut term = 1.0;
    for _ in 0..i {
        sum += term;
        term *= r;
    }
    sum.ln()
}

/// Mean of `j` under weights `e^{-jα}`, `j ∈ 0..i`.
fn expected_offset(i: usize, alpha: f64) -> f64 {
    let r = (-alpha).exp();
    let (mut num, mut den, mut term) = (0.0, 0.0, 1.0);
    for j in 0..i {
        num += j as f64 * term;
        den += term;
        term *= r;
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ranking::DisplaySet;

    fn data_with_top_choices(center: &Ranking) -> Vec<ChoiceObservation> {
        let n = center.n();
        (0..5)
            .map(|t| {
                let items: Vec<usize> = (0..n).filter(|&x| x != t % n).collect();
                let s = DisplaySet::new(items, n).unwrap();
                let best = *s
                    .items()
                    .iter()
                    .min_by_key(|&&x| center.position_of(x))
                    .unwrap();
                ChoiceObservation::single(s, best).unwrap()
            })
            .collect()
    }

    #[test]
    fn zero_disagreement_hits_the_small_q_clamp() {
        let center = Ranking::new(vec![3, 1, 4, 0, 2]).unwrap();
        let est = solve_dispersion(&center, &data_with_top_choices(&center)).unwrap();
        assert_eq!(est.alpha, ALPHA_MAX);
        assert_eq!(est.q, (-50.0f64).exp());
    }

    #[test]
    fn maximal_disagreement_hits_the_large_q_clamp() {
        // always choosing the worst item exceeds the α → 0 expectation
        let center = Ranking::identity(4);
        let worst = Ranking::reversal(4);
        let est = solve_dispersion(&center, &data_with_top_choices(&worst)).unwrap();
        assert_eq!(est.alpha, ALPHA_MIN);
    }

    #[test]
    fn empty_data_is_rejected() {
        assert_eq!(
            solve_dispersion(&Ranking::identity(3), &[]),
            Err(Error::EmptyData)
        );
    }

    #[test]
    fn loss_is_convex_on_a_grid() {
        let stats = DispersionStats {
            disagreement: 17.0,
            size_weights: vec![0.0, 0.0, 4.0, 3.0, 0.0, 9.0],
        };
        let grid: Vec<f64> = (0..=400).map(|i| ALPHA_MIN + i as f64 * 0.05).collect();
        for w in grid.windows(3) {
            let second = stats.loss(w[0]) - 2.0 * stats.loss(w[1]) + stats.loss(w[2]);
            assert!(second >= -1e-9, "second difference {second} at {}", w[1]);
        }
    }

    #[test]
    fn interior_solution_zeroes_the_derivative() {
        let stats = DispersionStats {
            disagreement: 10.0,
            size_weights: vec![0.0, 0.0, 0.0, 0.0, 20.0],
        };
        let est = stats.solve();
        assert!(est.alpha > ALPHA_MIN && est.alpha < ALPHA_MAX);
        assert!(stats.derivative(est.alpha).abs() < 1e-8);
        // closed form for one size: E_4(α) = 0.5 → q + 2q² + 3q³ = 0.5(1 + q + q² + q³)
        let q = est.q;
        let lhs = q + 2.0 * q * q + 3.0 * q * q * q;
        let rhs = 0.5 * (1.0 + q + q * q + q * q * q);
        assert!((lhs - rhs).abs() < 1e-9);
    }
}
