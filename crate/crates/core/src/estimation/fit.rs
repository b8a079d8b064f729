use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::dispersion::DispersionStats;
use super::fas::{solve_center_exact, solve_center_heuristic, SolverStatus, DEFAULT_EXACT_CAP, DEFAULT_RESTARTS};
use super::weights::accumulate_weights_topk;
use crate::choice::{log_likelihood, ChoiceObservation};
use crate::error::{Error, Result};
use crate::model::RmjModel;
use crate::ranking::{check_same_n, Ranking};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Largest `n` handed to the exact solver.
    pub exact_cap: usize,
    /// Restarts for the heuristic solver when `n > exact_cap`.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            exact_cap: DEFAULT_EXACT_CAP,
            restarts: DEFAULT_RESTARTS,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub center: Ranking,
    /// Dispersion estimate, clamped into the range accepted by [`RmjModel`].
    pub q_hat: f64,
    /// Minimized `Σ_{i ≻ j} w[j][i]`.
    pub objective: f64,
    pub solver_status: SolverStatus,
    pub log_likelihood: f64,
}

impl FitResult {
    pub fn model(&self) -> RmjModel {
        RmjModel::new(self.center.clone(), self.q_hat).expect("q_hat is clamped")
    }
}

/// Universe size shared by every observation.
pub fn universe_size(data: &[ChoiceObservation]) -> Result<usize> {
    let n = data.first().ok_or(Error::EmptyData)?.n();
    for obs in data {
        check_same_n(n, obs.n())?;
    }
    Ok(n)
}

/// Maximum-likelihood centre and dispersion.
pub fn fit(data: &[ChoiceObservation], options: &FitOptions) -> Result<FitResult> {
    let n = universe_size(data)?;
    let w = accumulate_weights_topk(n, data)?;
    let solution = if n <= options.exact_cap {
        solve_center_exact(&w, options.exact_cap)?
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
        solve_center_heuristic(&w, &mut rng, options.restarts)
    };
    let estimate = DispersionStats::from_data(&solution.ranking, data, None)?.solve();
    let model = RmjModel::new_clamped(solution.ranking.clone(), estimate.q);
    Ok(FitResult {
        log_likelihood: log_likelihood(&model, data)?,
        q_hat: model.q(),
        center: solution.ranking,
        objective: solution.objective,
        solver_status: solution.status,
    })
}
