//! Brute-force ground truth over small permutation universes.
//!
//! Everything here enumerates all `n!` rankings, so it is only usable for
//! `n ≤ 8`. The closed forms elsewhere in the crate are tested against it.

mod enumerate;
mod inconsistency;
mod mallows;
mod verify;

pub use enumerate::{
    aggregate_choice, all_arrangements, all_rankings, all_subsets, compatible, kemeny_from_pairwise,
    pairwise_marginals, MallowsSpec, PairwiseMarginals, RankingDistribution, ORACLE_CAP,
};
pub use inconsistency::{
    build_tilde_lambda, class_probabilities, class_probabilities_by_enumeration, demo_inconsistency, f_n,
    group1_mass, group1_mass_by_enumeration, group_of, ClassProbabilities, DemoOutcome, Group,
    InconsistencyReport, DEMO_TOLERANCE,
};
pub use mallows::{kendall_tau_topk, mallows_topk_pmf, MALLOWS_TOPK_CAP};
pub use verify::{run_verification, scrambled_center, CheckResult, VerificationReport, CONDITIONAL_CAP, VERIFY_TOLERANCE};
