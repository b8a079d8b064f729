use crate::error::{Error, Result};
use crate::qmath::{psi, validate_q};
use crate::ranking::TopKList;

use super::enumerate::MallowsSpec;

/// Largest universe for the closed-form Mallows top-k pmf.
pub const MALLOWS_TOPK_CAP: usize = 12;

/// Kendall distance of a top-k list to the identity, counting inversions
/// within the list and against every unlisted item.
pub fn kendall_tau_topk(pi_k: &TopKList) -> u64 {
    let items = pi_k.items();
    let complement = pi_k.complement();
    let mut d = 0u64;
    for (i, &z) in items.iter().enumerate() {
        d += items[i + 1..].iter().filter(|&&y| z > y).count() as u64;
        d += complement.iter().filter(|&&y| z > y).count() as u64;
    }
    d
}

/// `Pr(π_k) = q^{d_K(π_k)} ψ(n−k) / ψ(n)` under the identity-centred Mallows model.
pub fn mallows_topk_pmf(spec: &MallowsSpec, pi_k: &TopKList) -> Result<f64> {
    validate_q(spec.q)?;
    if spec.n > MALLOWS_TOPK_CAP {
        return Err(Error::TooLarge { n: spec.n, cap: MALLOWS_TOPK_CAP });
    }
    if pi_k.n() != spec.n {
        return Err(Error::SizeMismatch { expected: spec.n, actual: pi_k.n() });
    }
    let k = pi_k.k();
    Ok(spec.q.powi(kendall_tau_topk(pi_k) as i32) * psi(spec.n - k, spec.q)? / psi(spec.n, spec.q)?)
}
