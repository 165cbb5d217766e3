//! Quantum channels on two-qudit systems and the entanglement-annihilation
//! criterion `q_2^2 <= q_3` on their outputs.
//!
//! A channel is absolutely separating when every output is absolutely
//! separable. A violated `q_2^2 <= q_3` on `Q = (id ⊗ Λ)(E(ψ))/Tr` for some
//! input `ψ` refutes that. Convexity reduces the search to pure inputs, which
//! are swept over their Schmidt coefficients.

use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::detection::{moments, thm1_test, MomentVector};
use crate::linalg::{eig_hermitian, CMatrix};
use crate::maps::{LinearMap, PositiveMapSpec};
use crate::states::{ginibre, DensityMatrix, SchmidtPureState};
use crate::tolerances::TOL;
use crate::unitaries::haar_with;
use crate::{rng, Error, Result, C64};

/// Completely positive, trace-preserving map given by Kraus operators.
#[derive(Debug, Clone)]
pub struct QuantumChannel {
    input_dim: usize,
    output_dim: usize,
    kraus: Vec<CMatrix>,
    label: String,
}

impl QuantumChannel {
    /// Checks shapes and `sum K†K = I`.
    pub fn from_kraus(kraus: Vec<CMatrix>, label: impl Into<String>) -> Result<Self> {
        let first = kraus.first().ok_or(Error::LengthMismatch { expected: 1, found: 0 })?;
        let (output_dim, input_dim) = (first.rows(), first.cols());
        for k in &kraus {
            if k.rows() != output_dim || k.cols() != input_dim {
                return Err(Error::DimensionMismatch { expected: output_dim, found: k.rows() });
            }
        }
        let channel = QuantumChannel { input_dim, output_dim, kraus, label: label.into() };
        let residual = channel.trace_preservation_residual();
        if residual > TOL.reconstruction {
            return Err(Error::NotTracePreserving { residual });
        }
        Ok(channel)
    }

    /// Channel with Choi matrix `J = sum_ij E_ij ⊗ E(E_ij)`. Requires `J`
    /// PSD and `Tr_out J = I`.
    pub fn from_choi(choi: &CMatrix, input_dim: usize, output_dim: usize, label: impl Into<String>) -> Result<Self> {
        let n = input_dim * output_dim;
        if choi.rows() != n || choi.cols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: choi.rows() });
        }
        let spectrum = eig_hermitian(choi)?;
        let min_eigenvalue = spectrum.min();
        if min_eigenvalue < TOL.psd_floor {
            return Err(Error::NotCompletelyPositive { min_eigenvalue });
        }
        let mut kraus = Vec::new();
        for (k, &lambda) in spectrum.eigenvalues.iter().enumerate() {
            if lambda <= TOL.zero_normalizer {
                continue;
            }
            let amp = lambda.sqrt();
            let v = spectrum.eigenvectors.column(k);
            kraus.push(CMatrix::from_fn(output_dim, input_dim, |j, i| v[i * output_dim + j] * amp));
        }
        if kraus.is_empty() {
            return Err(Error::NotTracePreserving { residual: 1.0 });
        }
        Self::from_kraus(kraus, label)
    }

    pub fn identity(dim: usize) -> Self {
        QuantumChannel { input_dim: dim, output_dim: dim, kraus: alloc::vec![CMatrix::identity(dim)], label: "identity".into() }
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// `max |sum K†K - I|`.
    pub fn trace_preservation_residual(&self) -> f64 {
        let mut sum = CMatrix::zeros(self.input_dim, self.input_dim);
        for k in &self.kraus {
            sum = &sum + &(&k.dagger() * k);
        }
        sum.max_abs_diff(&CMatrix::identity(self.input_dim))
    }

    /// `sum K X K†` on the full input space.
    pub fn apply_matrix(&self, x: &CMatrix) -> Result<CMatrix> {
        if x.rows() != self.input_dim || x.cols() != self.input_dim {
            return Err(Error::DimensionMismatch { expected: self.input_dim, found: x.rows() });
        }
        let mut out = CMatrix::zeros(self.output_dim, self.output_dim);
        for k in &self.kraus {
            out = &out + &(&(k * x) * &k.dagger());
        }
        Ok(out)
    }

    /// Output state, keeping the input's bipartition. Needs equal input and
    /// output dimensions.
    pub fn apply(&self, state: &DensityMatrix) -> Result<DensityMatrix> {
        if self.output_dim != self.input_dim {
            return Err(Error::DimensionMismatch { expected: self.input_dim, found: self.output_dim });
        }
        let out = self.apply_matrix(state.matrix())?;
        DensityMatrix::validate(out.hermitian_part(), state.dim_a(), state.dim_b())
    }

    pub fn as_linear_map(&self) -> LinearMap {
        let d = self.input_dim;
        LinearMap::from_fn(d, self.output_dim, |e| self.apply_matrix(e).expect("matrix unit of input size"))
            .expect("images have the output size")
    }

    /// `(id_A ⊗ E)(X)` for `X` on `C^dim_a ⊗ C^input_dim`.
    pub fn apply_one_sided(&self, x: &CMatrix, dim_a: usize) -> Result<CMatrix> {
        self.as_linear_map().apply_one_sided(x, dim_a)
    }

    pub fn choi(&self) -> CMatrix {
        self.as_linear_map().choi()
    }

    /// Trace-preservation residual and the smallest Choi eigenvalue.
    pub fn cptp_residuals(&self) -> Result<(f64, f64)> {
        Ok((self.trace_preservation_residual(), eig_hermitian(&self.choi().hermitian_part())?.min()))
    }
}

/// Clock-and-shift operator `X^a Z^b` on `C^n`.
pub fn weyl(n: usize, a: usize, b: usize) -> CMatrix {
    let omega = 2.0 * core::f64::consts::PI / n as f64;
    CMatrix::from_fn(n, n, |row, col| {
        if row == (col + a) % n {
            let phase = omega * ((b * col) % n) as f64;
            C64::new(phase.cos(), phase.sin())
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Global depolarizing channel `p ρ + (1-p) Tr(ρ) I/D` on two qudits,
/// `D = local_dim²`, written with the `D²` clock-and-shift operators.
pub fn depolarizing(local_dim: usize, p: f64) -> Result<QuantumChannel> {
    if !(2..=3).contains(&local_dim) {
        return Err(Error::ParamOutOfRange { name: "local_dim", value: local_dim as f64 });
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ParamOutOfRange { name: "p", value: p });
    }
    let dim = local_dim * local_dim;
    let mut kraus = Vec::with_capacity(dim * dim + 1);
    if p > 0.0 {
        kraus.push(CMatrix::identity(dim).scale_real(p.sqrt()));
    }
    if p < 1.0 {
        let w = ((1.0 - p) / (dim * dim) as f64).sqrt();
        for a in 0..dim {
            for b in 0..dim {
                kraus.push(weyl(dim, a, b).scale_real(w));
            }
        }
    }
    QuantumChannel::from_kraus(kraus, alloc::format!("dep{local_dim}({p})"))
}

/// Qubit amplitude damping on the first factor, identity on a `other_dim`
/// second factor. Not unitarily covariant for `gamma > 0`.
pub fn amplitude_damping_first(gamma: f64, other_dim: usize) -> Result<QuantumChannel> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::ParamOutOfRange { name: "gamma", value: gamma });
    }
    let k0 = CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, (1.0 - gamma).sqrt()]]);
    let k1 = CMatrix::from_real_rows(&[&[0.0, gamma.sqrt()], &[0.0, 0.0]]);
    let id = CMatrix::identity(other_dim);
    QuantumChannel::from_kraus(alloc::vec![k0.kron(&id), k1.kron(&id)], alloc::format!("amp_damp({gamma})⊗id"))
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CovarianceOutcome {
    pub max_residual: f64,
    pub plausibly_covariant: bool,
}

/// Largest `‖U E(ρ) U† - E(UρU†)‖_F` over seeded Haar `U` and Ginibre `ρ`.
pub fn covariance_check(channel: &QuantumChannel, samples: usize, seed: u64) -> Result<CovarianceOutcome> {
    if channel.input_dim != channel.output_dim {
        return Err(Error::DimensionMismatch { expected: channel.input_dim, found: channel.output_dim });
    }
    let n = channel.input_dim;
    let mut max_residual: f64 = 0.0;
    for i in 0..samples {
        let mut r = rng::seeded(rng::derive_seed(seed, i as u64));
        let u = haar_with(n, &mut r);
        let g = ginibre(n, &mut r);
        let w = &g * &g.dagger();
        let rho = w.scale_real(1.0 / w.trace().re);
        let lhs = channel.apply_matrix(&rho)?.conjugate_by(u.matrix());
        let rhs = channel.apply_matrix(&rho.conjugate_by(u.matrix()))?;
        max_residual = max_residual.max((&lhs - &rhs).frobenius_norm());
    }
    Ok(CovarianceOutcome { max_residual, plausibly_covariant: max_residual <= 1e-8 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ChannelVerdict {
    NotAbsolutelySeparating,
    Inconclusive,
}

#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ChannelCriterionReport {
    pub channel: String,
    pub p: Option<f64>,
    /// Schmidt coefficients of the input with the largest margin.
    pub worst_input: Vec<f64>,
    /// 0 for computational local bases, `k > 0` for the `k`-th Haar pair.
    pub worst_basis: usize,
    pub moments: MomentVector,
    /// `q_2^2 - q_3` at the worst input.
    pub margin: f64,
    pub verdict: ChannelVerdict,
    pub points: usize,
    /// Inputs skipped because `Tr (id ⊗ Λ)(E(ψ))` vanished.
    pub skipped: usize,
    pub covariant: bool,
    /// The maximally entangled input attains the worst margin (within 1e-12).
    pub worst_at_max_entangled: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    /// Points on `[0, 1]` for qubits; a cap on the simplex point count for
    /// qutrits (the barycenter is always added).
    pub grid: usize,
    /// Haar local-basis pairs per grid point for non-covariant channels.
    pub basis_samples: usize,
    pub seed: u64,
    /// `None` decides with [`covariance_check`].
    pub covariant: Option<bool>,
    /// Recorded in the report.
    pub p: Option<f64>,
}

impl SweepOptions {
    pub fn for_local_dim(d: usize) -> Self {
        SweepOptions { grid: if d == 2 { 101 } else { 45 }, basis_samples: 20, seed: 42, covariant: None, p: None }
    }
}

/// Schmidt-coefficient grid for `d ∈ {2, 3}`.
pub fn schmidt_grid(d: usize, grid: usize) -> Vec<Vec<f64>> {
    let mut points = Vec::new();
    if d == 2 {
        let n = grid.max(2) - 1;
        for i in 0..=n {
            let q = i as f64 / n as f64;
            points.push(alloc::vec![q, 1.0 - q]);
        }
    } else {
        let mut n = 1;
        while (n + 2) * (n + 3) / 2 <= grid {
            n += 1;
        }
        for i in 0..=n {
            for j in 0..=(n - i) {
                let (a, b) = (i as f64 / n as f64, j as f64 / n as f64);
                points.push(alloc::vec![a, b, (1.0 - a - b).max(0.0)]);
            }
        }
        if n % 3 != 0 {
            points.push(alloc::vec![1.0 / 3.0; 3]);
        }
    }
    points
}

struct PointResult {
    index: usize,
    basis: usize,
    margin: f64,
    moments: MomentVector,
}

/// Sweeps pure inputs over Schmidt coefficients and reports the largest
/// `q_2^2 - q_3`. Any margin above the strict slack refutes absolute
/// separation.
pub fn annihilation_sweep(channel: &QuantumChannel, map: &PositiveMapSpec, opts: &SweepOptions) -> Result<ChannelCriterionReport> {
    let dim = channel.input_dim;
    let d = match dim {
        4 => 2,
        9 => 3,
        _ => return Err(Error::ParamOutOfRange { name: "channel dimension", value: dim as f64 }),
    };
    if channel.output_dim != dim || map.input_dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: map.input_dim() });
    }
    let covariant = match opts.covariant {
        Some(c) => c,
        None => covariance_check(channel, 8, opts.seed)?.plausibly_covariant,
    };
    let grid = schmidt_grid(d, opts.grid);
    let bases: Vec<Option<(CMatrix, CMatrix)>> = core::iter::once(None)
        .chain((1..=if covariant { 0 } else { opts.basis_samples }).map(|k| {
            let mut r = rng::seeded(rng::derive_seed(opts.seed, k as u64));
            Some((haar_with(d, &mut r).matrix().clone(), haar_with(d, &mut r).matrix().clone()))
        }))
        .collect();

    let eval_point = |index: usize| -> Result<Vec<Option<PointResult>>> {
        let mut out = Vec::with_capacity(bases.len());
        for (basis, pair) in bases.iter().enumerate() {
            let psi = match pair {
                None => SchmidtPureState::new(&grid[index])?,
                Some((a, b)) => SchmidtPureState::with_bases(&grid[index], a.clone(), b.clone())?,
            };
            let output = channel.apply_matrix(&CMatrix::outer(&psi.vector()))?;
            match map.normalize_operator(&output, d) {
                Ok(q) => {
                    let m = moments(&q, 3);
                    let margin = thm1_test(&m)?.margin;
                    out.push(Some(PointResult { index, basis, margin, moments: m }));
                }
                Err(Error::ZeroNormalizer { .. }) => out.push(None),
                Err(e) => return Err(e),
            }
        }
        Ok(out)
    };

    #[cfg(feature = "parallel")]
    let results: Vec<Vec<Option<PointResult>>> = {
        use rayon::prelude::*;
        (0..grid.len()).into_par_iter().map(eval_point).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<Vec<Option<PointResult>>> = (0..grid.len()).map(eval_point).collect::<Result<_>>()?;

    let me_index = grid.iter().position(|q| q.iter().all(|&x| (x - 1.0 / d as f64).abs() < 1e-12));
    let mut me_margin = f64::NEG_INFINITY;
    let mut skipped = 0;
    let mut points = 0;
    let mut worst: Option<PointResult> = None;
    for r in results.into_iter().flatten() {
        points += 1;
        let Some(r) = r else {
            skipped += 1;
            continue;
        };
        if Some(r.index) == me_index {
            me_margin = me_margin.max(r.margin);
        }
        if worst.as_ref().is_none_or(|w| r.margin > w.margin) {
            worst = Some(r);
        }
    }
    let worst = worst.ok_or(Error::ZeroNormalizer { trace: 0.0 })?;
    Ok(ChannelCriterionReport {
        channel: channel.label.clone(),
        p: opts.p,
        worst_input: grid[worst.index].clone(),
        worst_basis: worst.basis,
        margin: worst.margin,
        moments: worst.moments,
        verdict: if worst.margin > TOL.strict { ChannelVerdict::NotAbsolutelySeparating } else { ChannelVerdict::Inconclusive },
        points,
        skipped,
        covariant,
        worst_at_max_entangled: me_margin >= worst.margin - 1e-12,
    })
}

/// Two-qudit global depolarizing families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Family {
    Dep2,
    Dep3,
}

impl Family {
    pub fn local_dim(self) -> usize {
        match self {
            Family::Dep2 => 2,
            Family::Dep3 => 3,
        }
    }

    pub fn channel(self, p: f64) -> Result<QuantumChannel> {
        depolarizing(self.local_dim(), p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ThresholdOutcome {
    pub p_star: f64,
    pub lower: f64,
    pub upper: f64,
    pub iterations: usize,
}

/// Sweep verdict at `p` for a family, with covariance taken as known.
pub fn family_verdict(family: Family, map: &PositiveMapSpec, p: f64) -> Result<ChannelCriterionReport> {
    let d = family.local_dim();
    let opts = SweepOptions { covariant: Some(true), p: Some(p), ..SweepOptions::for_local_dim(d) };
    annihilation_sweep(&family.channel(p)?, map, &opts)
}

/// Smallest `p` at which the sweep refutes absolute separation, located by
/// bisection to an interval of width `tol`.
///
/// A 21-point pre-scan must show a single switch from inconclusive to
/// refuted; anything else is reported as [`Error::NoSignChange`].
pub fn threshold_scan(family: Family, map: &PositiveMapSpec, tol: f64) -> Result<ThresholdOutcome> {
    if tol.is_nan() || tol < 1e-9 {
        return Err(Error::ParamOutOfRange { name: "tol", value: tol });
    }
    let refuted = |p: f64| -> Result<bool> {
        Ok(family_verdict(family, map, p)?.verdict == ChannelVerdict::NotAbsolutelySeparating)
    };
    let scan: Vec<bool> = (0..=20).map(|i| refuted(i as f64 / 20.0)).collect::<Result<_>>()?;
    let first = scan.iter().position(|&v| v).ok_or(Error::NoSignChange)?;
    if first == 0 || !scan[first..].iter().all(|&v| v) {
        return Err(Error::NoSignChange);
    }
    let (mut lo, mut hi) = ((first - 1) as f64 / 20.0, first as f64 / 20.0);
    let mut iterations = 0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if refuted(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    Ok(ThresholdOutcome { p_star: 0.5 * (lo + hi), lower: lo, upper: hi, iterations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::schmidt_state;

    #[test]
    fn depolarizing_extremes_and_midpoint() {
        let bell = schmidt_state(&[0.5, 0.5]).unwrap();
        let id = depolarizing(2, 1.0).unwrap().apply(&bell).unwrap();
        assert!(id.matrix().max_abs_diff(bell.matrix()) < 1e-12);
        let flat = depolarizing(2, 0.0).unwrap().apply(&bell).unwrap();
        assert!(flat.matrix().max_abs_diff(&CMatrix::identity(4).scale_real(0.25)) < 1e-12);
        let half = depolarizing(2, 0.5).unwrap().apply(&bell).unwrap();
        let expect = &bell.matrix().scale_real(0.5) + &CMatrix::identity(4).scale_real(0.125);
        assert!(half.matrix().max_abs_diff(&expect) < 1e-12);
        assert!(depolarizing(2, 1.5).is_err());
    }

    #[test]
    fn choi_round_trip() {
        let ch = depolarizing(2, 0.3).unwrap();
        let back = QuantumChannel::from_choi(&ch.choi(), 4, 4, "rt").unwrap();
        assert!(back.choi().max_abs_diff(&ch.choi()) < 1e-10);
        let (tp, min) = back.cptp_residuals().unwrap();
        assert!(tp < 1e-10 && min > -1e-10);
    }

    #[test]
    fn covariance() {
        assert!(covariance_check(&depolarizing(3, 0.4).unwrap(), 5, 3).unwrap().max_residual < 1e-10);
        assert_eq!(covariance_check(&QuantumChannel::identity(4), 5, 3).unwrap().max_residual, 0.0);
        assert!(covariance_check(&amplitude_damping_first(0.6, 2).unwrap(), 5, 3).unwrap().max_residual > 1e-3);
    }

    #[test]
    fn grid_shapes() {
        assert_eq!(schmidt_grid(2, 101).len(), 101);
        let g = schmidt_grid(3, 45);
        assert_eq!(g.len(), 46);
        assert!(g.iter().all(|q| (q.iter().sum::<f64>() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn sweep_examples() {
        let t2 = PositiveMapSpec::transpose(2);
        assert_eq!(family_verdict(Family::Dep2, &t2, 0.5).unwrap().verdict, ChannelVerdict::NotAbsolutelySeparating);
        let low = family_verdict(Family::Dep2, &t2, 0.2).unwrap();
        assert_eq!(low.verdict, ChannelVerdict::Inconclusive);
        assert!(low.worst_at_max_entangled);
        let t3 = PositiveMapSpec::transpose(3);
        assert_eq!(family_verdict(Family::Dep3, &t3, 0.3).unwrap().verdict, ChannelVerdict::NotAbsolutelySeparating);
    }

    #[test]
    fn coarse_threshold() {
        let r = threshold_scan(Family::Dep2, &PositiveMapSpec::transpose(2), 1e-3).unwrap();
        assert!((r.p_star - 1.0 / 3.0).abs() < 1e-3);
    }
}
