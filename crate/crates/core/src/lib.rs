//! The reverse-major-index (RMJ) ranking model and the choice models it induces.
//!
//! A ranking is drawn with probability proportional to `q^{d_R(π*, π)}`,
//! where `d_R` adds `n − i` for every descent at position `i`. The model
//! gives closed forms for the probability of any top-k list, for choices out
//! of a display set and for ranked choices, and its maximum-likelihood
//! estimate reduces to a weighted feedback arc set plus a convex 1-D problem.
//!
//! Items are `0..n` throughout. A [`Ranking`] lists items from most to least
//! preferred.
//!
//! ```
//! use rmj::{choice_prob, DisplaySet, Ranking, RmjModel};
//!
//! let model = RmjModel::new(Ranking::identity(4), 0.5)?;
//! let s = DisplaySet::new(vec![1, 2, 3], 4)?;
//! // relative ranks 0, 1, 2 get weights 1, q, q² over 1 + q + q²
//! assert!((choice_prob(&model, &s, 3)? - 0.25 / 1.75).abs() < 1e-15);
//! # Ok::<(), rmj::Error>(())
//! ```

pub mod choice;
pub mod distance;
pub mod error;
pub mod estimation;
pub mod io;
pub mod mixture;
pub mod model;
pub mod oracle;
pub mod qmath;
pub mod ranking;
pub mod synth;

pub use choice::{
    choice_prob, ln_ranked_choice_prob, log_likelihood, mixture_log_likelihood, observation_log_probs,
    ranked_choice_prob, uniform_log_likelihood, ChoiceObservation, ChoiceRecord,
};
pub use distance::{kendall_tau, l_count, l_set, major_index, rmj, rmj_set, rmj_topk};
pub use error::{Error, Result};
pub use estimation::{fit, FitOptions, FitResult, SolverStatus};
pub use mixture::{fit_mixture, Component, EmOptions, MixtureFit, MixtureModel};
pub use model::RmjModel;
pub use qmath::{ln_psi, psi};
pub use ranking::{DisplaySet, Ranking, TopKList};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/distances.md")]
    mod distances {}
    #[doc = include_str!("../../../book/src/model.md")]
    mod model {}
    #[doc = include_str!("../../../book/src/choice.md")]
    mod choice {}
    #[doc = include_str!("../../../book/src/estimation.md")]
    mod estimation {}
    #[doc = include_str!("../../../book/src/mixtures.md")]
    mod mixtures {}
    #[doc = include_str!("../../../book/src/inconsistency.md")]
    mod inconsistency {}
}
