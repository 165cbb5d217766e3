#[cfg(feature = "parallel")]
use alloc::vec::Vec;

use super::{haar_random, parameterized, GlobalUnitary, Minimum, NelderMeadOptions};
use crate::detection::hankel_from_values;
use crate::linalg::{matrix_power_traces, CMatrix};
use crate::maps::PositiveMapSpec;
use crate::states::DensityMatrix;
use crate::tolerances::TOL;
use crate::{rng, Error, Result};

/// Quantity maximized over unitaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Objective {
    /// `s2^2 - s3`.
    ThmOne,
    /// `-det H_m`.
    HankelDet(usize),
    /// `s2`, the quantity bounded by the sufficient APPT condition.
    SecondMoment,
}

impl Objective {
    fn moment_order(self) -> usize {
        match self {
            Objective::ThmOne => 3,
            Objective::HankelDet(m) => 2 * m + 1,
            Objective::SecondMoment => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    pub objective: Objective,
    /// Objective evaluations per restart.
    pub budget: usize,
    pub restarts: usize,
    pub seed: u64,
    pub initial_step: f64,
    /// Stop once a restart reaches this score; later restarts are skipped.
    pub stop_above: Option<f64>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { objective: Objective::ThmOne, budget: 2000, restarts: 20, seed: 42, initial_step: 0.3, stop_above: None }
    }
}

#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct UnitarySearchResult {
    pub objective: Objective,
    pub best_unitary: GlobalUnitary,
    pub best_score: f64,
    pub evaluations: usize,
    pub converged: bool,
    pub best_restart: usize,
}

/// Objective value of `u` for `state` under `map`; `-inf` when the
/// normalizer vanishes or the output cannot be diagonalized.
pub fn score(state: &DensityMatrix, map: &PositiveMapSpec, objective: Objective, u: &CMatrix) -> f64 {
    score_inner(state, map, objective, u).unwrap_or(f64::NEG_INFINITY)
}

fn score_inner(state: &DensityMatrix, map: &PositiveMapSpec, objective: Objective, u: &CMatrix) -> Result<f64> {
    let rotated = state.matrix().conjugate_by(u);
    let out = map.action().apply_one_sided(&rotated, state.dim_a())?;
    let trace = out.trace().re;
    if trace.abs() <= TOL.zero_normalizer {
        return Err(Error::ZeroNormalizer { trace });
    }
    let values = matrix_power_traces(&out.scale_real(1.0 / trace), objective.moment_order())?;
    Ok(match objective {
        Objective::ThmOne => values[1] * values[1] - values[2],
        Objective::HankelDet(m) => -hankel_from_values(m, &values).determinant(),
        Objective::SecondMoment => values[1],
    })
}

struct Restart {
    minimum: Minimum,
    base: CMatrix,
}

/// Maximizes the objective over `U = exp(iH(x)) U0` with Nelder-Mead.
///
/// Restart 0 starts at `U0 = I`; restart `r > 0` starts at a Haar-random
/// `U0` drawn from a seed derived from `(seed, r)`. The best restart wins,
/// with the lower index kept on ties.
pub fn search_violating_unitary(
    state: &DensityMatrix,
    map: &PositiveMapSpec,
    cfg: &SearchConfig,
) -> Result<UnitarySearchResult> {
    if cfg.budget == 0 {
        return Err(Error::ParamOutOfRange { name: "budget", value: 0.0 });
    }
    if map.input_dim() != state.dim_b() {
        return Err(Error::DimensionMismatch { expected: map.input_dim(), found: state.dim_b() });
    }
    let dim = state.dim();
    let restarts = cfg.restarts.max(1);

    let run = |r: usize| -> Restart {
        let base = if r == 0 {
            CMatrix::identity(dim)
        } else {
            haar_random(dim, rng::derive_seed(cfg.seed, r as u64)).matrix().clone()
        };
        let opts = NelderMeadOptions {
            max_evals: cfg.budget,
            diameter_tol: 1e-8,
            initial_step: cfg.initial_step,
            stop_below: cfg.stop_above.map(|t| -t),
        };
        let x0 = alloc::vec![0.0; dim * dim];
        let minimum = super::minimize(
            |x| match parameterized(x, dim) {
                Ok(u) => -score(state, map, cfg.objective, &(u.matrix() * &base)),
                Err(_) => f64::INFINITY,
            },
            &x0,
            &opts,
        );
        Restart { minimum, base }
    };

    let mut best: Option<(usize, Restart)> = None;
    let mut evaluations = 0usize;
    let mut consider = |r: usize, outcome: Restart| -> bool {
        evaluations += outcome.minimum.evaluations;
        let value = -outcome.minimum.value;
        let better = best.as_ref().is_none_or(|(_, b)| value > -b.minimum.value);
        if better {
            best = Some((r, outcome));
        }
        cfg.stop_above.is_some_and(|t| value >= t)
    };

    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let chunk = rayon::current_num_threads().max(1);
        let mut start = 0;
        'outer: while start < restarts {
            let end = (start + chunk).min(restarts);
            let outcomes: Vec<Restart> = (start..end).into_par_iter().map(run).collect();
            for (offset, outcome) in outcomes.into_iter().enumerate() {
                if consider(start + offset, outcome) {
                    break 'outer;
                }
            }
            start = end;
        }
    }
    #[cfg(not(feature = "parallel"))]
    for r in 0..restarts {
        if consider(r, run(r)) {
            break;
        }
    }

    let (best_restart, outcome) = best.expect("at least one restart");
    let rotation = parameterized(&outcome.minimum.x, dim)?;
    let best_unitary = GlobalUnitary::new(rotation.matrix() * &outcome.base, "search")?;
    Ok(UnitarySearchResult {
        objective: cfg.objective,
        best_unitary,
        best_score: -outcome.minimum.value,
        evaluations,
        converged: outcome.minimum.converged,
        best_restart,
    })
}

/// Searches with `cfg` and, when that finds no violation of `s_2^2 <= s_3`,
/// retries on `-det H_m` for `hankel_m >= 2`. Returns the first violating
/// result, or the first result if neither violates.
pub fn search_staged(
    state: &DensityMatrix,
    map: &PositiveMapSpec,
    cfg: &SearchConfig,
    hankel_m: usize,
) -> Result<UnitarySearchResult> {
    let first = search_violating_unitary(state, map, cfg)?;
    if first.best_score > TOL.strict || cfg.objective != Objective::ThmOne || hankel_m < 2 {
        return Ok(first);
    }
    let second = search_violating_unitary(state, map, &SearchConfig { objective: Objective::HankelDet(hankel_m), ..*cfg })?;
    Ok(if second.best_score > TOL.strict { second } else { first })
}
