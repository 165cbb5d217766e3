//! Moment vectors, Hankel matrices and the state-level criteria.
//!
//! Every criterion works on the unit-trace operator `S = (id ⊗ Λ)(UρU†)/Tr`
//! and its power traces `s_n = Tr S^n`. A violated criterion means `ρ` is not
//! absolutely separable (or not absolutely PPT when `Λ` is decomposable).

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::{det_small, eigvals_hermitian, matrix_power_traces, CMatrix};
use crate::maps::{MapKind, NormalizedOutput, PositiveMapSpec};
use crate::states::DensityMatrix;
use crate::tolerances::TOL;
use crate::unitaries::{
    haar_random, score, search_staged, search_violating_unitary, GlobalUnitary, Objective, SearchConfig, UnitarySearchResult,
};
use crate::{rng, Error, Result, C64};

/// Power traces `(s_1, ..., s_n)` of a unit-trace operator.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MomentVector {
    values: Vec<f64>,
}

impl MomentVector {
    pub fn from_values(values: Vec<f64>) -> Self {
        MomentVector { values }
    }

    pub fn order(&self) -> usize {
        self.values.len()
    }

    /// `s_n`, 1-based.
    pub fn get(&self, n: usize) -> Option<f64> {
        n.checked_sub(1).and_then(|i| self.values.get(i).copied())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// `s_1 .. s_{n_max}` of the normalized operator (`n_max` is raised to 1).
pub fn moments(n: &NormalizedOutput, n_max: usize) -> MomentVector {
    operator_moments(&n.operator, n_max).expect("normalized operators are square")
}

/// Power traces of any square operator.
pub fn operator_moments(op: &CMatrix, n_max: usize) -> Result<MomentVector> {
    Ok(MomentVector { values: matrix_power_traces(op, n_max.max(1))? })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ThmOneOutcome {
    /// `s_2^2 - s_3`.
    pub margin: f64,
    pub violated: bool,
}

/// `s_2^2 <= s_3`, violated when the margin exceeds the strict slack.
pub fn thm1_test(m: &MomentVector) -> Result<ThmOneOutcome> {
    if m.order() < 3 {
        return Err(Error::OrderTooLow { needed: 3, got: m.order() });
    }
    let margin = m.values[1] * m.values[1] - m.values[2];
    Ok(ThmOneOutcome { margin, violated: margin > TOL.strict })
}

/// Real symmetric `(m+1) x (m+1)` matrix with `[H]_ij = s_{i+j+1}`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HankelMatrix {
    m: usize,
    entries: Vec<f64>,
}

impl HankelMatrix {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn size(&self) -> usize {
        self.m + 1
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.size() + j]
    }

    pub fn to_matrix(&self) -> CMatrix {
        let n = self.size();
        CMatrix::from_fn(n, n, |i, j| C64::new(self.entry(i, j), 0.0))
    }

    pub fn determinant(&self) -> f64 {
        det_small(&self.to_matrix()).expect("square").re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        eigvals_hermitian(&self.to_matrix()).map(|v| v[v.len() - 1]).unwrap_or(f64::NAN)
    }
}

/// Fills `H_m` from `values[k] = s_{k+1}`; the caller guarantees the order.
pub(crate) fn hankel_from_values(m: usize, values: &[f64]) -> HankelMatrix {
    let n = m + 1;
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            entries[i * n + j] = values[i + j];
        }
    }
    HankelMatrix { m, entries }
}

pub fn hankel(m_order: usize, moments: &MomentVector) -> Result<HankelMatrix> {
    let needed = 2 * m_order + 1;
    if moments.order() < needed {
        return Err(Error::OrderTooLow { needed, got: moments.order() });
    }
    Ok(hankel_from_values(m_order, &moments.values))
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HankelOutcome {
    pub m: usize,
    pub determinant: f64,
    pub min_eigenvalue: f64,
    /// `det H_m < -strict`.
    pub violated: bool,
}

impl HankelOutcome {
    pub fn from_moments(m_order: usize, moments: &MomentVector) -> Result<Self> {
        let h = hankel(m_order, moments)?;
        let determinant = h.determinant();
        Ok(HankelOutcome { m: m_order, determinant, min_eigenvalue: h.min_eigenvalue(), violated: determinant < -TOL.strict })
    }
}

/// `det H_m(S) >= 0` for the given unitary. A violation means "not
/// absolutely separable", or "not absolutely PPT" for a decomposable map.
pub fn hankel_test(
    state: &DensityMatrix,
    map: &PositiveMapSpec,
    u: &GlobalUnitary,
    m_order: usize,
) -> Result<HankelOutcome> {
    let s = map.normalized_output(state, u)?;
    HankelOutcome::from_moments(m_order, &moments(&s, 2 * m_order + 1))
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Thm9Outcome {
    /// Largest `r_2 = Tr R^2` seen over probes and search.
    pub max_r2: f64,
    /// `1 / (N - 1)` with `N` the total dimension.
    pub bound: f64,
    pub sufficient_appt: bool,
    /// The maximum is searched, not proven.
    pub heuristic: bool,
}

/// Sufficient absolute-PPT test: the purity of the partially transposed,
/// rotated state stays below `1/(N-1)` for every sampled or searched `U`.
///
/// A unit-trace Hermitian `X` on `C^N` with `Tr X^2 <= 1/(N-1)` is PSD, so a
/// bound holding for all `U` certifies absolute PPT in any dimension.
pub fn thm9_test(state: &DensityMatrix, samples: usize, seed: u64) -> Result<Thm9Outcome> {
    let map = PositiveMapSpec::transpose(state.dim_b());
    let dim = state.dim();
    let mut max_r2 = score(state, &map, Objective::SecondMoment, &CMatrix::identity(dim));
    for i in 0..samples {
        let u = haar_random(dim, rng::derive_seed(seed, i as u64));
        max_r2 = max_r2.max(score(state, &map, Objective::SecondMoment, u.matrix()));
    }
    let cfg = SearchConfig { objective: Objective::SecondMoment, budget: 400, restarts: 2, seed, ..Default::default() };
    max_r2 = max_r2.max(search_violating_unitary(state, &map, &cfg)?.best_score);
    let bound = 1.0 / (dim as f64 - 1.0);
    Ok(Thm9Outcome { max_r2, bound, sufficient_appt: max_r2 <= bound - TOL.strict, heuristic: true })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BallOutcome {
    pub purity: f64,
    /// `1 / (d^2 - 1)`.
    pub radius_bound: f64,
    pub inside: bool,
}

/// Maximal ball of absolutely separable states, `Tr ρ² <= 1/(d²-1)`, for
/// equal local dimensions.
pub fn ball_test(state: &DensityMatrix) -> Result<BallOutcome> {
    if state.dim_a() != state.dim_b() {
        return Err(Error::DimensionMismatch { expected: state.dim_a(), found: state.dim_b() });
    }
    let purity = state.purity();
    let radius_bound = 1.0 / (state.dim() as f64 - 1.0);
    Ok(BallOutcome { purity, radius_bound, inside: purity <= radius_bound + TOL.trace })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OracleOutcome {
    /// `λ1 - λ_{2d-1} - 2 sqrt(λ_{2d-2} λ_{2d})`, eigenvalues descending.
    pub value: f64,
    pub absolutely_separable: bool,
}

/// Exact absolute-separability test for `2 ⊗ d` states.
pub fn eigenvalue_oracle_2xd(state: &DensityMatrix) -> Result<OracleOutcome> {
    if state.dim_a() != 2 {
        return Err(Error::NotTwoByD { dim_a: state.dim_a(), dim_b: state.dim_b() });
    }
    Ok(oracle_from_eigenvalues(&state.eigenvalues()))
}

/// Oracle value from `2d` eigenvalues sorted in descending order.
pub fn oracle_from_eigenvalues(ev: &[f64]) -> OracleOutcome {
    let n = ev.len();
    let value = ev[0] - ev[n - 2] - 2.0 * (ev[n - 3].max(0.0) * ev[n - 1].max(0.0)).sqrt();
    OracleOutcome { value, absolutely_separable: value <= 1e-12 }
}

/// Which property is being refuted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Question {
    AbsoluteSeparability,
    AbsolutePpt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Verdict {
    NotAbsolutelySeparable,
    #[cfg_attr(feature = "serde", serde(rename = "NotAbsolutelyPPT"))]
    NotAbsolutelyPpt,
    #[cfg_attr(feature = "serde", serde(rename = "AbsolutelyPPT_Sufficient"))]
    AbsolutelyPptSufficient,
    Inconclusive,
}

impl Verdict {
    pub fn is_detection(self) -> bool {
        !matches!(self, Verdict::Inconclusive)
    }
}

/// Where the unitary comes from.
#[derive(Debug, Clone)]
pub enum UnitaryChoice {
    Fixed(GlobalUnitary),
    /// Staged search: `cfg.objective` first, then the largest Hankel order.
    Search(SearchConfig),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionOptions {
    /// Hankel orders to test; the moment order is raised to cover the largest.
    pub hankel_orders: Vec<usize>,
    pub moment_order: usize,
    /// Haar probes for the sufficient absolute-PPT test; 0 skips it.
    pub thm9_samples: usize,
    pub seed: u64,
}

impl Default for DetectionOptions {
    fn default() -> Self {
        DetectionOptions { hankel_orders: vec![1, 2], moment_order: 5, thm9_samples: 100, seed: 42 }
    }
}

#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SearchSummary {
    pub objective: Objective,
    pub best_score: f64,
    pub evaluations: usize,
    pub converged: bool,
    pub best_restart: usize,
}

impl From<&UnitarySearchResult> for SearchSummary {
    fn from(r: &UnitarySearchResult) -> Self {
        SearchSummary {
            objective: r.objective,
            best_score: r.best_score,
            evaluations: r.evaluations,
            converged: r.converged,
            best_restart: r.best_restart,
        }
    }
}

/// Everything needed to re-check a verdict with the library alone.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DetectionReport {
    pub state_id: String,
    pub dim_a: usize,
    pub dim_b: usize,
    pub map: MapKind,
    pub question: Question,
    pub unitary: GlobalUnitary,
    pub search: Option<SearchSummary>,
    pub normalizer: f64,
    pub moments: MomentVector,
    pub thm1: ThmOneOutcome,
    pub hankel: Vec<HankelOutcome>,
    pub thm9: Option<Thm9Outcome>,
    pub ball: Option<BallOutcome>,
    pub oracle: Option<OracleOutcome>,
    pub verdict: Verdict,
    /// Criterion that decided the verdict, or `none`.
    pub certified_by: String,
}

/// Runs every applicable criterion and assembles a verdict.
///
/// Precedence: the `2 ⊗ d` eigenvalue oracle, then Hankel determinants, then
/// `s_2^2 <= s_3`, then the sufficient ball and purity tests (PPT question
/// only). For the PPT question the map must be decomposable.
pub fn detect(
    state_id: &str,
    state: &DensityMatrix,
    map: &PositiveMapSpec,
    unitary: &UnitaryChoice,
    question: Question,
    opts: &DetectionOptions,
) -> Result<DetectionReport> {
    if question == Question::AbsolutePpt && !map.is_decomposable() {
        return Err(Error::NotDecomposable);
    }
    let max_m = opts.hankel_orders.iter().copied().max().unwrap_or(0);
    let (u, search) = match unitary {
        UnitaryChoice::Fixed(u) => (u.clone(), None),
        UnitaryChoice::Search(cfg) => {
            let result = search_staged(state, map, cfg, max_m)?;
            (result.best_unitary.clone(), Some(SearchSummary::from(&result)))
        }
    };
    let order = opts.moment_order.max(2 * max_m + 1).max(3);
    let s = map.normalized_output(state, &u)?;
    let m = moments(&s, order);
    let thm1 = thm1_test(&m)?;
    let hankel = opts
        .hankel_orders
        .iter()
        .map(|&k| HankelOutcome::from_moments(k, &m))
        .collect::<Result<Vec<_>>>()?;
    let oracle = if state.dim_a() == 2 { Some(eigenvalue_oracle_2xd(state)?) } else { None };
    let (ball, thm9) = if question == Question::AbsolutePpt {
        let ball = if state.dim_a() == state.dim_b() { Some(ball_test(state)?) } else { None };
        let thm9 = if opts.thm9_samples > 0 { Some(thm9_test(state, opts.thm9_samples, opts.seed)?) } else { None };
        (ball, thm9)
    } else {
        (None, None)
    };

    let refuted = match question {
        Question::AbsoluteSeparability => Verdict::NotAbsolutelySeparable,
        Question::AbsolutePpt => Verdict::NotAbsolutelyPpt,
    };
    let (verdict, certified_by): (Verdict, String) = if let Some(o) = oracle {
        if o.absolutely_separable {
            if question == Question::AbsolutePpt {
                (Verdict::AbsolutelyPptSufficient, "eigenvalue_oracle".into())
            } else {
                (Verdict::Inconclusive, "eigenvalue_oracle".into())
            }
        } else {
            (refuted, "eigenvalue_oracle".into())
        }
    } else if let Some(h) = hankel.iter().find(|h| h.violated) {
        (refuted, alloc::format!("hankel_m{}", h.m))
    } else if thm1.violated {
        (refuted, "thm1".into())
    } else if ball.is_some_and(|b| b.inside) {
        (Verdict::AbsolutelyPptSufficient, "ball".into())
    } else if thm9.as_ref().is_some_and(|t| t.sufficient_appt) {
        (Verdict::AbsolutelyPptSufficient, "thm9_heuristic".into())
    } else {
        (Verdict::Inconclusive, "none".into())
    };

    Ok(DetectionReport {
        state_id: state_id.into(),
        dim_a: state.dim_a(),
        dim_b: state.dim_b(),
        map: map.kind(),
        question,
        unitary: u,
        search,
        normalizer: s.normalizer,
        moments: m,
        thm1,
        hankel,
        thm9,
        ball,
        oracle,
        verdict,
        certified_by,
    })
}
