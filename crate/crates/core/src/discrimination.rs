//! Channel discrimination with a positive map turned into two channels.
//!
//! A positive map `Λ` is rescaled and padded with a flag level so that it
//! preserves trace (`Λ_TP`). Subtracting `Tr(ρ)|f><f|` on a second flag gives
//! a trace-annihilating map `Λ_TA`, which splits as `E1 - E2 = k Λ_TA` for
//! channels `E1, E2`. Probing the pair with
//! `U σ U†` gives distance `k(‖(id ⊗ Λ_TP)(UσU†)‖₁ + 1)`, which equals `2k`
//! exactly when the output of `Λ_TP` is PSD and exceeds it otherwise.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::channels::QuantumChannel;
use crate::linalg::{eig_hermitian, trace_norm, CMatrix};
use crate::maps::{LinearMap, PositiveMapSpec};
use crate::states::DensityMatrix;
use crate::tolerances::TOL;
use crate::unitaries::GlobalUnitary;
use crate::{Error, Result};

/// `Λ_TP(ρ) = Λ'(ρ) ⊕ [Tr ρ - Tr Λ'(ρ)]` with `Λ' = Λ/μ`, on `C^(d+1)`.
#[derive(Debug, Clone)]
pub struct TracePreservingMap {
    base: PositiveMapSpec,
    mu: f64,
    action: LinearMap,
}

impl TracePreservingMap {
    pub fn base(&self) -> &PositiveMapSpec {
        &self.base
    }

    /// `max_ρ Tr Λ(ρ) = λ_max(Λ†(I))`.
    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn input_dim(&self) -> usize {
        self.action.input_dim()
    }

    /// `d + 1`.
    pub fn extended_output_dim(&self) -> usize {
        self.action.output_dim()
    }

    pub fn action(&self) -> &LinearMap {
        &self.action
    }
}

/// Probes used to confirm positivity of the base map.
const POSITIVITY_PROBES: usize = 64;

pub fn make_trace_preserving(map: &PositiveMapSpec) -> Result<TracePreservingMap> {
    let min_eigenvalue = map.action().positivity_witness(POSITIVITY_PROBES, 0x7a9)?;
    if min_eigenvalue < TOL.psd_floor {
        return Err(Error::NotPositive { min_eigenvalue });
    }
    let (d, dout) = (map.input_dim(), map.output_dim());
    let mu = eig_hermitian(&map.action().dual_of_identity().hermitian_part())?.max();
    if mu <= TOL.zero_normalizer {
        return Err(Error::DegenerateMap);
    }
    let flag = dout;
    let action = LinearMap::from_fn(d, dout + 1, |e| {
        let image = map.action().apply(e).expect("matrix unit of input size").scale_real(1.0 / mu);
        let mut out = image.embed(dout + 1);
        out[(flag, flag)] += e.trace() - image.trace();
        out
    })?;
    Ok(TracePreservingMap { base: map.clone(), mu, action })
}

/// `Λ_TA(ρ) = Λ_TP(ρ) - Tr(ρ)|f><f|` on `C^(d+2)`, with `f` a second flag
/// orthogonal to the range of `Λ_TP`.
pub fn trace_annihilating(tp: &TracePreservingMap) -> LinearMap {
    let n = tp.extended_output_dim();
    let flag = n;
    LinearMap::from_fn(tp.input_dim(), n + 1, |e| {
        let mut out = tp.action.apply(e).expect("matrix unit of input size").embed(n + 1);
        out[(flag, flag)] -= e.trace();
        out
    })
    .expect("images have the output size")
}

/// Channels with `E1 - E2 = k Λ_TA`.
#[derive(Debug, Clone)]
pub struct ChannelPair {
    pub e1: QuantumChannel,
    pub e2: QuantumChannel,
    /// `1 / λ_max(Tr_out J+)`.
    pub k: f64,
    /// `λ_max(Tr_out J+)`, the smallest constant completing both halves.
    pub lambda: f64,
    pub sigma0: CMatrix,
}

/// Splits the Choi matrix `J` of `ta` into `J+ - J-` and completes each half
/// to a trace-preserving Choi matrix with `(λI - M) ⊗ σ0`, `M = Tr_out J±`.
///
/// `sigma0` defaults to the flag state `|f><f|` (last output level).
pub fn channel_pair(ta: &LinearMap, sigma0: Option<&CMatrix>) -> Result<ChannelPair> {
    let (d, dout) = (ta.input_dim(), ta.output_dim());
    let sigma0 = match sigma0 {
        Some(s) => {
            DensityMatrix::validate(s.clone(), 1, dout)?;
            s.clone()
        }
        None => CMatrix::unit(dout, dout - 1, dout - 1),
    };
    let spectrum = eig_hermitian(&ta.choi().hermitian_part())?;
    let n = d * dout;
    let mut plus = CMatrix::zeros(n, n);
    let mut minus = CMatrix::zeros(n, n);
    for (idx, &lam) in spectrum.eigenvalues.iter().enumerate() {
        let v = spectrum.eigenvectors.column(idx);
        if lam >= -1e-12 {
            plus = &plus + &CMatrix::outer(&v).scale_real(lam);
        } else {
            minus = &minus + &CMatrix::outer(&v).scale_real(-lam);
        }
    }
    let m_plus = plus.partial_trace_second(d, dout);
    let m_minus = minus.partial_trace_second(d, dout);
    let residual = m_plus.max_abs_diff(&m_minus);
    if residual > 1e-9 {
        return Err(Error::NotTracePreserving { residual });
    }
    let m = (&m_plus + &m_minus).scale_real(0.5).hermitian_part();
    let lambda = eig_hermitian(&m)?.max();
    if lambda <= TOL.zero_normalizer {
        return Err(Error::DegenerateMap);
    }
    let completion = (&CMatrix::identity(d).scale_real(lambda) - &m).kron(&sigma0);
    let choi1 = (&plus + &completion).scale_real(1.0 / lambda).hermitian_part();
    let choi2 = (&minus + &completion).scale_real(1.0 / lambda).hermitian_part();
    Ok(ChannelPair {
        e1: QuantumChannel::from_choi(&choi1, d, dout, "E1")?,
        e2: QuantumChannel::from_choi(&choi2, d, dout, "E2")?,
        k: 1.0 / lambda,
        lambda,
        sigma0,
    })
}

/// Trace-preserving map, trace-annihilating map and channel pair for `map`.
#[derive(Debug, Clone)]
pub struct Discrimination {
    pub tp: TracePreservingMap,
    pub ta: LinearMap,
    pub pair: ChannelPair,
}

impl Discrimination {
    pub fn new(map: &PositiveMapSpec, sigma0: Option<&CMatrix>) -> Result<Self> {
        let tp = make_trace_preserving(map)?;
        let ta = trace_annihilating(&tp);
        let pair = channel_pair(&ta, sigma0)?;
        Ok(Discrimination { tp, ta, pair })
    }

    /// Largest deviation of `E1 - E2` from `k Λ_TA` over all matrix units.
    pub fn faithfulness_residual(&self) -> Result<f64> {
        let d = self.ta.input_dim();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let e = CMatrix::unit(d, i, j);
                let diff = &self.pair.e1.apply_matrix(&e)? - &self.pair.e2.apply_matrix(&e)?;
                let target = self.ta.apply(&e)?.scale_real(self.pair.k);
                worst = worst.max(diff.max_abs_diff(&target));
            }
        }
        Ok(worst)
    }

    pub fn advantage_test(&self, state: &DensityMatrix, u: &GlobalUnitary) -> Result<AdvantageReport> {
        advantage_test(state, u, &self.tp, &self.pair)
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct AdvantageReport {
    pub unitary: GlobalUnitary,
    /// `‖(id ⊗ E1)(UσU†) - (id ⊗ E2)(UσU†)‖₁`.
    pub distance: f64,
    /// `2k`, the value every absolutely separable probe gives.
    pub baseline: f64,
    pub advantage: f64,
    pub k: f64,
    pub mu: f64,
    /// `k(‖(id ⊗ Λ_TP)(UσU†)‖₁ + 1)`.
    pub identity_value: f64,
    pub identity_residual: f64,
    /// Smallest eigenvalue of `(id ⊗ Λ_TP)(UσU†)`.
    pub tp_min_eigenvalue: f64,
    /// `advantage > 0` exactly when that eigenvalue is negative.
    pub eig_cross_check: bool,
    /// Helstrom success probability `(1 + distance/2)/2`.
    pub p_success: f64,
    pub p_success_baseline: f64,
}

pub fn advantage_test(
    state: &DensityMatrix,
    u: &GlobalUnitary,
    tp: &TracePreservingMap,
    pair: &ChannelPair,
) -> Result<AdvantageReport> {
    if state.dim_b() != tp.input_dim() || pair.e1.input_dim() != tp.input_dim() {
        return Err(Error::DimensionMismatch { expected: tp.input_dim(), found: state.dim_b() });
    }
    if u.dim() != state.dim() {
        return Err(Error::DimensionMismatch { expected: state.dim(), found: u.dim() });
    }
    let x = state.matrix().conjugate_by(u.matrix());
    let da = state.dim_a();
    let out1 = pair.e1.apply_one_sided(&x, da)?;
    let out2 = pair.e2.apply_one_sided(&x, da)?;
    let distance = trace_norm(&(&out1 - &out2).hermitian_part())?;
    let tp_out = tp.action.apply_one_sided(&x, da)?.hermitian_part();
    let tp_spectrum = eig_hermitian(&tp_out)?;
    let tp_norm: f64 = tp_spectrum.eigenvalues.iter().map(|v| v.abs()).sum();
    let identity_value = pair.k * (tp_norm + 1.0);
    let baseline = 2.0 * pair.k;
    let advantage = distance - baseline;
    let tp_min_eigenvalue = tp_spectrum.min();
    let negative = tp_min_eigenvalue < -1e-10;
    let eig_cross_check = (advantage > 1e-9 * pair.k.max(1.0)) == negative || advantage.abs() <= 1e-8;
    Ok(AdvantageReport {
        unitary: u.clone(),
        distance,
        baseline,
        advantage,
        k: pair.k,
        mu: tp.mu,
        identity_value,
        identity_residual: (distance - identity_value).abs(),
        tp_min_eigenvalue,
        eig_cross_check,
        p_success: 0.5 * (1.0 + 0.5 * distance),
        p_success_baseline: 0.5 * (1.0 + 0.5 * baseline),
    })
}

/// Zero map on `M_d`, which has no channel-pair decomposition.
pub fn zero_map(d: usize) -> LinearMap {
    LinearMap::from_images(d, d + 2, (0..d * d).map(|_| CMatrix::zeros(d + 2, d + 2)).collect::<Vec<_>>())
        .expect("d*d images")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{example_state, schmidt_state, ExampleState};
    use crate::unitaries::{example_unitary, haar_random, ExampleUnitary};

    #[test]
    fn mu_values() {
        assert!((make_trace_preserving(&PositiveMapSpec::transpose(2)).unwrap().mu() - 1.0).abs() < 1e-12);
        assert!((make_trace_preserving(&PositiveMapSpec::reduction(2)).unwrap().mu() - 1.0).abs() < 1e-12);
        assert!((make_trace_preserving(&PositiveMapSpec::reduction(3)).unwrap().mu() - 2.0).abs() < 1e-12);
        let scaled = PositiveMapSpec::transpose(2).scaled(2.0).unwrap();
        let tp = make_trace_preserving(&scaled).unwrap();
        assert!((tp.mu() - 2.0).abs() < 1e-12);
        let e = CMatrix::unit(2, 0, 1);
        assert!(tp.action().apply(&e).unwrap().max_abs_diff(&CMatrix::unit(2, 1, 0).embed(3)) < 1e-12);
    }

    #[test]
    fn trace_annihilation_on_probes() {
        let tp = make_trace_preserving(&PositiveMapSpec::reduction(3)).unwrap();
        let ta = trace_annihilating(&tp);
        for seed in 0..10 {
            let rho = crate::states::random_density(1, 3, seed);
            assert!((tp.action().apply(rho.matrix()).unwrap().trace().re - 1.0).abs() < 1e-12);
            assert!(ta.apply(rho.matrix()).unwrap().trace().norm() < 1e-12);
        }
        let mixed = CMatrix::identity(2).scale_real(0.5);
        let out = trace_annihilating(&make_trace_preserving(&PositiveMapSpec::transpose(2)).unwrap()).apply(&mixed).unwrap();
        assert!((trace_norm(&out).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn pair_is_faithful() {
        for d in [2, 3] {
            let disc = Discrimination::new(&PositiveMapSpec::transpose(d), None).unwrap();
            assert!(disc.faithfulness_residual().unwrap() < 1e-9);
            for ch in [&disc.pair.e1, &disc.pair.e2] {
                let (tp, min) = ch.cptp_residuals().unwrap();
                assert!(tp < 1e-10 && min > -1e-10);
            }
        }
    }

    #[test]
    fn zero_map_is_degenerate() {
        assert_eq!(channel_pair(&zero_map(2), None).unwrap_err(), Error::DegenerateMap);
    }

    #[test]
    fn bell_gives_three_k() {
        let disc = Discrimination::new(&PositiveMapSpec::transpose(2), None).unwrap();
        let r = disc.advantage_test(&schmidt_state(&[0.5, 0.5]).unwrap(), &GlobalUnitary::identity(4)).unwrap();
        assert!((r.distance - 3.0 * r.k).abs() < 1e-9, "{r:?}");
        assert!(r.eig_cross_check && r.advantage > 0.0);
    }

    #[test]
    fn separable_probes_give_two_k() {
        let disc = Discrimination::new(&PositiveMapSpec::reduction(2), None).unwrap();
        let mm = DensityMatrix::maximally_mixed(2, 2);
        for seed in 0..5 {
            let r = disc.advantage_test(&mm, &haar_random(4, seed)).unwrap();
            assert!((r.distance - r.baseline).abs() < 1e-8);
        }
    }

    #[test]
    fn first_example_beats_baseline() {
        let disc = Discrimination::new(&PositiveMapSpec::transpose(2), None).unwrap();
        let rho = example_state(ExampleState::Rho1).unwrap();
        let r = disc.advantage_test(&rho, &example_unitary(ExampleUnitary::U1).unwrap()).unwrap();
        assert!(r.advantage > 1e-9 && r.identity_residual < 1e-8 && r.eig_cross_check);
    }
}
