//! Positive but not completely positive maps, applied to one side of a
//! bipartite operator.
//!
//! Every map is stored as its action on the matrix units `E_ij` of the input
//! space. Applying `id ⊗ Λ` is then a block-wise linear combination of those
//! images.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::{eig_hermitian, CMatrix};
use crate::states::DensityMatrix;
use crate::tolerances::TOL;
use crate::unitaries::GlobalUnitary;
use crate::{rng, Error, Result, C64};

/// Linear map `M_in -> M_out` given by the images of matrix units.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMap {
    input_dim: usize,
    output_dim: usize,
    /// `images[i * input_dim + j] = Λ(E_ij)`.
    images: Vec<CMatrix>,
}

impl LinearMap {
    pub fn from_images(input_dim: usize, output_dim: usize, images: Vec<CMatrix>) -> Result<Self> {
        if images.len() != input_dim * input_dim {
            return Err(Error::LengthMismatch { expected: input_dim * input_dim, found: images.len() });
        }
        if let Some(bad) = images.iter().find(|m| m.rows() != output_dim || m.cols() != output_dim) {
            return Err(Error::DimensionMismatch { expected: output_dim, found: bad.rows() });
        }
        Ok(LinearMap { input_dim, output_dim, images })
    }

    /// Tabulates `f` on the matrix units.
    pub fn from_fn(input_dim: usize, output_dim: usize, f: impl Fn(&CMatrix) -> CMatrix) -> Result<Self> {
        let mut images = Vec::with_capacity(input_dim * input_dim);
        for i in 0..input_dim {
            for j in 0..input_dim {
                images.push(f(&CMatrix::unit(input_dim, i, j)));
            }
        }
        Self::from_images(input_dim, output_dim, images)
    }

    #[inline]
    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    #[inline]
    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn image(&self, i: usize, j: usize) -> &CMatrix {
        &self.images[i * self.input_dim + j]
    }

    pub fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        let d = self.input_dim;
        if x.rows() != d || x.cols() != d {
            return Err(Error::DimensionMismatch { expected: d, found: x.rows() });
        }
        let mut out = CMatrix::zeros(self.output_dim, self.output_dim);
        self.accumulate(x, 0, 0, d, &mut out, 0, 0);
        Ok(out)
    }

    // out[row0.., col0..] += Λ(x[r0..r0+d, c0..c0+d])
    #[allow(clippy::too_many_arguments)]
    fn accumulate(&self, x: &CMatrix, r0: usize, c0: usize, d: usize, out: &mut CMatrix, row0: usize, col0: usize) {
        let e = self.output_dim;
        for i in 0..d {
            for j in 0..d {
                let coeff = x[(r0 + i, c0 + j)];
                if coeff == C64::new(0.0, 0.0) {
                    continue;
                }
                let img = &self.images[i * d + j];
                for k in 0..e {
                    for l in 0..e {
                        out[(row0 + k, col0 + l)] += coeff * img[(k, l)];
                    }
                }
            }
        }
    }

    /// `(id_A ⊗ Λ)(x)` for an operator `x` on `C^dim_a ⊗ C^input_dim`.
    pub fn apply_one_sided(&self, x: &CMatrix, dim_a: usize) -> Result<CMatrix> {
        let d = self.input_dim;
        let n = dim_a * d;
        if x.rows() != n || x.cols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: x.rows() });
        }
        let e = self.output_dim;
        let mut out = CMatrix::zeros(dim_a * e, dim_a * e);
        for a in 0..dim_a {
            for b in 0..dim_a {
                self.accumulate(x, a * d, b * d, d, &mut out, a * e, b * e);
            }
        }
        Ok(out)
    }

    /// Choi matrix `sum_ij E_ij ⊗ Λ(E_ij)` (input factor first).
    pub fn choi(&self) -> CMatrix {
        let (d, e) = (self.input_dim, self.output_dim);
        let mut j = CMatrix::zeros(d * e, d * e);
        for a in 0..d {
            for b in 0..d {
                let img = self.image(a, b);
                for k in 0..e {
                    for l in 0..e {
                        j[(a * e + k, b * e + l)] = img[(k, l)];
                    }
                }
            }
        }
        j
    }

    /// Inverse of [`LinearMap::choi`].
    pub fn from_choi(choi: &CMatrix, input_dim: usize, output_dim: usize) -> Result<Self> {
        let n = input_dim * output_dim;
        if choi.rows() != n || choi.cols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: choi.rows() });
        }
        let mut images = Vec::with_capacity(input_dim * input_dim);
        for a in 0..input_dim {
            for b in 0..input_dim {
                images.push(choi.block(a, b, output_dim));
            }
        }
        Self::from_images(input_dim, output_dim, images)
    }

    /// Dual applied to the identity: `Tr Λ(ρ) = Tr(ρ Λ†(I))`.
    pub fn dual_of_identity(&self) -> CMatrix {
        let d = self.input_dim;
        CMatrix::from_fn(d, d, |j, i| self.image(i, j).trace())
    }

    pub fn scaled(&self, s: f64) -> LinearMap {
        LinearMap {
            input_dim: self.input_dim,
            output_dim: self.output_dim,
            images: self.images.iter().map(|m| m.scale_real(s)).collect(),
        }
    }

    /// Smallest eigenvalue of `Λ(ρ)` over `samples` seeded random states
    /// (half pure, half full rank).
    pub fn positivity_witness(&self, samples: usize, seed: u64) -> Result<f64> {
        let d = self.input_dim;
        let mut rng = rng::seeded(seed);
        let mut worst = f64::INFINITY;
        for s in 0..samples {
            let g = crate::states::ginibre(d, &mut rng);
            let probe = if s % 2 == 0 {
                CMatrix::outer(&g.column(0))
            } else {
                &g * &g.dagger()
            };
            let probe = probe.scale_real(1.0 / probe.trace().re);
            let out = self.apply(&probe)?.hermitian_part();
            worst = worst.min(eig_hermitian(&out)?.min());
        }
        Ok(worst)
    }
}

/// Which map a [`PositiveMapSpec`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum MapKind {
    Transpose,
    /// `X -> Tr(X) I - X`.
    Reduction,
    Custom,
}

/// Positive, not completely positive map on `M_d`.
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveMapSpec {
    kind: MapKind,
    decomposable: bool,
    action: LinearMap,
}

/// Probe count used when accepting a custom map.
pub const POSITIVITY_PROBES: usize = 200;

impl PositiveMapSpec {
    pub fn transpose(d: usize) -> Self {
        let action = LinearMap::from_fn(d, d, CMatrix::transpose).expect("square images");
        PositiveMapSpec { kind: MapKind::Transpose, decomposable: true, action }
    }

    pub fn reduction(d: usize) -> Self {
        let action = LinearMap::from_fn(d, d, |x| &CMatrix::identity(d).scale(x.trace()) - x).expect("square images");
        PositiveMapSpec { kind: MapKind::Reduction, decomposable: true, action }
    }

    pub fn by_kind(kind: MapKind, d: usize) -> Option<Self> {
        match kind {
            MapKind::Transpose => Some(Self::transpose(d)),
            MapKind::Reduction => Some(Self::reduction(d)),
            MapKind::Custom => None,
        }
    }

    /// Wraps an arbitrary action after checking positivity on
    /// [`POSITIVITY_PROBES`] seeded probes.
    pub fn custom(action: LinearMap, decomposable: bool) -> Result<Self> {
        let min_eigenvalue = action.positivity_witness(POSITIVITY_PROBES, 0x5eed)?;
        if min_eigenvalue < TOL.psd_floor {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(PositiveMapSpec { kind: MapKind::Custom, decomposable, action })
    }

    /// `s * Λ` for `s > 0`, tagged as a custom map.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        if s.is_nan() || s <= 0.0 {
            return Err(Error::ParamOutOfRange { name: "scale", value: s });
        }
        Ok(PositiveMapSpec { kind: MapKind::Custom, decomposable: self.decomposable, action: self.action.scaled(s) })
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    pub fn is_decomposable(&self) -> bool {
        self.decomposable
    }

    pub fn input_dim(&self) -> usize {
        self.action.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.action.output_dim
    }

    pub fn action(&self) -> &LinearMap {
        &self.action
    }

    /// `(id_A ⊗ Λ)(ρ)`.
    pub fn apply_one_sided(&self, state: &DensityMatrix) -> Result<CMatrix> {
        self.check_input(state)?;
        self.action.apply_one_sided(state.matrix(), state.dim_a())
    }

    fn check_input(&self, state: &DensityMatrix) -> Result<()> {
        if state.dim_b() != self.input_dim() {
            Err(Error::DimensionMismatch { expected: self.input_dim(), found: state.dim_b() })
        } else {
            Ok(())
        }
    }

    /// `(id ⊗ Λ)(U ρ U†)` divided by its trace.
    pub fn normalized_output(&self, state: &DensityMatrix, u: &GlobalUnitary) -> Result<NormalizedOutput> {
        self.check_input(state)?;
        let m = u.matrix();
        if m.rows() != state.dim() {
            return Err(Error::DimensionMismatch { expected: state.dim(), found: m.rows() });
        }
        let rotated = state.matrix().conjugate_by(m);
        self.normalize_operator(&rotated, state.dim_a())
    }

    /// Same as [`normalized_output`](Self::normalized_output) for an operator
    /// that is already rotated (or a channel output).
    pub fn normalize_operator(&self, op: &CMatrix, dim_a: usize) -> Result<NormalizedOutput> {
        let out = self.action.apply_one_sided(op, dim_a)?;
        NormalizedOutput::new(out)
    }
}

/// Unit-trace operator `S_Λ`, `R_Λ` or `Q_Λ` together with its normalizer.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct NormalizedOutput {
    pub operator: CMatrix,
    pub normalizer: f64,
    pub is_psd: bool,
    pub min_eig: f64,
}

impl NormalizedOutput {
    /// Normalizes a Hermitian operator by its trace.
    pub fn new(out: CMatrix) -> Result<Self> {
        let normalizer = out.trace().re;
        if normalizer.abs() <= TOL.zero_normalizer {
            return Err(Error::ZeroNormalizer { trace: normalizer });
        }
        let operator = out.scale_real(1.0 / normalizer).hermitian_part();
        let min_eig = eig_hermitian(&operator)?.min();
        Ok(NormalizedOutput { operator, normalizer, is_psd: min_eig >= TOL.psd_floor, min_eig })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{random_density, schmidt_state};

    #[test]
    fn transpose_of_bell_is_flip() {
        let bell = schmidt_state(&[0.5, 0.5]).unwrap();
        let pt = PositiveMapSpec::transpose(2).apply_one_sided(&bell).unwrap();
        let ev = eig_hermitian(&pt).unwrap().eigenvalues;
        for (a, b) in ev.iter().zip([0.5, 0.5, 0.5, -0.5]) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn transpose_keeps_product_state() {
        let p = DensityMatrix::product_zero(2, 2);
        let out = PositiveMapSpec::transpose(2).apply_one_sided(&p).unwrap();
        assert_eq!(&out, p.matrix());
    }

    #[test]
    fn reduction_on_maximally_mixed() {
        // Each block X -> Tr(X) I - X; for I/4 every diagonal block is I/4,
        // mapped to I/2 - I/4 = I/4.
        let m = DensityMatrix::maximally_mixed(2, 2);
        let out = PositiveMapSpec::reduction(2).apply_one_sided(&m).unwrap();
        assert!(out.max_abs_diff(m.matrix()) < 1e-16);
    }

    #[test]
    fn one_sided_transpose_is_involution() {
        let r = random_density(2, 3, 11);
        let t = PositiveMapSpec::transpose(3);
        let once = t.action().apply_one_sided(r.matrix(), 2).unwrap();
        let twice = t.action().apply_one_sided(&once, 2).unwrap();
        assert!(twice.max_abs_diff(r.matrix()) < 1e-16);
    }

    #[test]
    fn normalizers() {
        let r = random_density(2, 3, 3);
        let u = GlobalUnitary::identity(6);
        let t = PositiveMapSpec::transpose(3).normalized_output(&r, &u).unwrap();
        assert!((t.normalizer - 1.0).abs() < 1e-12);
        let red = PositiveMapSpec::reduction(3).normalized_output(&r, &u).unwrap();
        assert!((red.normalizer - 2.0).abs() < 1e-12);
        assert!((red.operator.trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn maximally_mixed_is_invariant() {
        let m = DensityMatrix::maximally_mixed(2, 2);
        let u = crate::unitaries::haar_random(4, 99);
        let out = PositiveMapSpec::transpose(2).normalized_output(&m, &u).unwrap();
        assert!((out.normalizer - 1.0).abs() < 1e-14);
        assert!(out.operator.max_abs_diff(m.matrix()) < 1e-14);
    }

    #[test]
    fn bell_partial_transpose_min_eig() {
        let bell = schmidt_state(&[0.5, 0.5]).unwrap();
        let out = PositiveMapSpec::transpose(2).normalized_output(&bell, &GlobalUnitary::identity(4)).unwrap();
        assert!((out.min_eig + 0.5).abs() < 1e-14);
        assert!(!out.is_psd);
    }

    #[test]
    fn zero_map_gives_zero_normalizer() {
        let zero = LinearMap::from_fn(2, 2, |_| CMatrix::zeros(2, 2)).unwrap();
        let map = PositiveMapSpec::custom(zero, true).unwrap();
        let r = random_density(2, 2, 1);
        let e = map.normalized_output(&r, &GlobalUnitary::identity(4));
        assert!(matches!(e, Err(Error::ZeroNormalizer { .. })));
    }

    #[test]
    fn dimension_checks() {
        let r = random_density(2, 3, 1);
        assert!(matches!(
            PositiveMapSpec::transpose(2).apply_one_sided(&r),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn custom_rejects_non_positive() {
        let neg = LinearMap::from_fn(2, 2, |x| x.scale_real(-1.0)).unwrap();
        assert!(matches!(PositiveMapSpec::custom(neg, false), Err(Error::NotPositive { .. })));
    }

    #[test]
    fn standard_maps_are_positive() {
        for d in 2..=4 {
            assert!(PositiveMapSpec::transpose(d).action().positivity_witness(200, 1).unwrap() > -1e-10);
            assert!(PositiveMapSpec::reduction(d).action().positivity_witness(200, 2).unwrap() > -1e-10);
        }
    }

    #[test]
    fn choi_round_trip() {
        let t = PositiveMapSpec::reduction(3);
        let back = LinearMap::from_choi(&t.action().choi(), 3, 3).unwrap();
        assert_eq!(&back, t.action());
    }

    #[test]
    fn dual_identity_of_reduction() {
        let r = PositiveMapSpec::reduction(2);
        assert!(r.action().dual_of_identity().max_abs_diff(&CMatrix::identity(2)) < 1e-16);
    }
}
