//! q-analogue helpers: `[i]_q = 1 + q + … + q^{i-1}` and the normalizer
//! `ψ(n, q) = ∏_{i=1}^{n} [i]_q`, with log-space variants.

use crate::error::{Error, Result};

pub const Q_MIN: f64 = 1e-9;
pub const Q_MAX: f64 = 1.0 - 1e-9;

/// Accepts `q` in `[Q_MIN, Q_MAX]`.
pub fn validate_q(q: f64) -> Result<f64> {
    if (Q_MIN..=Q_MAX).contains(&q) {
        Ok(q)
    } else {
        Err(Error::InvalidDispersion(q))
    }
}

/// Clamps `q` into the accepted range. NaN maps to `Q_MAX`.
pub fn clamp_q(q: f64) -> f64 {
    if q.is_nan() {
        Q_MAX
    } else {
        q.clamp(Q_MIN, Q_MAX)
    }
}

/// `[i]_q = 1 + q + … + q^{i-1}`; `[0]_q = 0`.
pub fn q_int(i: usize, q: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0;
    for _ in 0..i {
        sum += term;
        term *= q;
    }
    sum
}

/// `ln [i]_q` for `i ≥ 1`, accurate for `q` near 0 and near 1.
pub fn ln_q_int(i: usize, q: f64) -> f64 {
    debug_assert!(i >= 1);
    if i == 1 {
        return 0.0;
    }
    let ln_q = q.ln();
    // (1 - q^i) / (1 - q)
    (-(i as f64 * ln_q).exp_m1()).ln() - (-ln_q.exp_m1()).ln()
}

pub fn psi(n: usize, q: f64) -> Result<f64> {
    validate_q(q)?;
    Ok((1..=n).map(|i| q_int(i, q)).product())
}

pub fn ln_psi(n: usize, q: f64) -> Result<f64> {
    validate_q(q)?;
    Ok(ln_psi_unchecked(n, q))
}

/// `ln ψ(n, q) - ln ψ(n - k, q) = Σ_{i=n-k+1}^{n} ln [i]_q`.
pub(crate) fn ln_psi_tail(n: usize, k: usize, q: f64) -> f64 {
    (n - k + 1..=n).map(|i| ln_q_int(i, q)).sum()
}

pub(crate) fn ln_psi_unchecked(n: usize, q: f64) -> f64 {
    (1..=n).map(|i| ln_q_int(i, q)).sum()
}
