//! Maximum-likelihood estimation from (ranked) choice data.
//!
//! The centre is the minimum feedback arc set of the pairwise weight matrix
//! built from the data; the dispersion then solves a convex 1-D problem.

mod coverage;
mod dispersion;
mod fas;
mod fit;
mod weights;

pub use coverage::{coverage_report, PairCoverage};
pub use dispersion::{solve_dispersion, DispersionEstimate, DispersionStats, ALPHA_MAX, ALPHA_MIN};
pub use fas::{
    insertion_local_search, score_order, solve_center_exact, solve_center_heuristic,
    CenterSolution, SolverStatus, DEFAULT_EXACT_CAP, DEFAULT_RESTARTS,
};
pub use fit::{fit, universe_size, FitOptions, FitResult};
pub use weights::{
    accumulate_weights_k1, accumulate_weights_topk, accumulate_weights_weighted, WeightMatrix,
};
