//! Validated bipartite density matrices and the standard example states.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{eig_hermitian, CMatrix};
use crate::tolerances::TOL;
use crate::{rng, Error, Result, C64};

/// Positive semidefinite, unit-trace operator on `C^dim_a ⊗ C^dim_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim_a: usize,
    dim_b: usize,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Checks dimensions, hermiticity, positivity and trace.
    pub fn validate(raw: CMatrix, dim_a: usize, dim_b: usize) -> Result<Self> {
        let n = dim_a * dim_b;
        if raw.rows() != n || raw.cols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: raw.rows().max(raw.cols()) });
        }
        let deviation = raw.hermiticity_deviation();
        if deviation > TOL.hermiticity {
            return Err(Error::NonHermitian { deviation });
        }
        let matrix = raw.hermitian_part();
        let min_eigenvalue = eig_hermitian(&matrix)?.min();
        if min_eigenvalue < TOL.psd_floor {
            return Err(Error::NotPsd { min_eigenvalue });
        }
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > TOL.trace {
            return Err(Error::TraceNotOne { trace });
        }
        Ok(DensityMatrix { dim_a, dim_b, matrix })
    }

    #[inline]
    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    #[inline]
    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// Eigenvalues in non-increasing order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        // Validation already ran the eigensolver on this matrix.
        eig_hermitian(&self.matrix).map(|s| s.eigenvalues).unwrap_or_default()
    }

    pub fn purity(&self) -> f64 {
        let m = &self.matrix;
        m.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    /// `U rho U^dagger`; `u` must act on the full space.
    pub fn conjugated(&self, u: &CMatrix) -> Result<DensityMatrix> {
        if u.rows() != self.dim() || u.cols() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: u.rows() });
        }
        DensityMatrix::validate(self.matrix.conjugate_by(u), self.dim_a, self.dim_b)
    }

    pub fn maximally_mixed(dim_a: usize, dim_b: usize) -> DensityMatrix {
        let n = dim_a * dim_b;
        DensityMatrix { dim_a, dim_b, matrix: CMatrix::identity(n).scale_real(1.0 / n as f64) }
    }

    /// Pure product state `|00><00|`.
    pub fn product_zero(dim_a: usize, dim_b: usize) -> DensityMatrix {
        DensityMatrix { dim_a, dim_b, matrix: CMatrix::unit(dim_a * dim_b, 0, 0) }
    }
}

/// The four worked example states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExampleState {
    /// Two-qubit separable state with mass on `|00>,|11>` and `|01>,|10>` coherences.
    Rho1,
    /// Qubit-ququart separable state.
    Rho2,
    /// Two-qutrit isotropic state.
    Rho3 { p: f64 },
    /// Two-qutrit mixture of the bound-entangled family `rho_b` with white noise.
    Rho4 { p: f64, b: f64 },
}

pub fn example_state(id: ExampleState) -> Result<DensityMatrix> {
    match id {
        ExampleState::Rho1 => {
            let q = 0.25;
            let raw = CMatrix::from_real_rows(&[
                &[q, 0.0, 0.0, q],
                &[0.0, q, q, 0.0],
                &[0.0, q, q, 0.0],
                &[q, 0.0, 0.0, q],
            ]);
            DensityMatrix::validate(raw, 2, 2)
        }
        ExampleState::Rho2 => {
            let mut raw = CMatrix::zeros(8, 8);
            for (i, j) in [(0, 0), (0, 2), (2, 0), (2, 2), (5, 5), (5, 7), (7, 5), (7, 7)] {
                raw[(i, j)] = C64::new(0.25, 0.0);
            }
            DensityMatrix::validate(raw, 2, 4)
        }
        ExampleState::Rho3 { p } => isotropic(3, p),
        ExampleState::Rho4 { p, b } => rho4(p, b),
    }
}

fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::ParamOutOfRange { name, value })
    }
}

/// Maximally entangled vector `(1/sqrt d) sum_i |ii>`.
pub fn max_entangled_vector(d: usize) -> Vec<C64> {
    let mut v = alloc::vec![C64::new(0.0, 0.0); d * d];
    let amp = 1.0 / (d as f64).sqrt();
    for i in 0..d {
        v[i * d + i] = C64::new(amp, 0.0);
    }
    v
}

/// `p |phi+><phi+| + (1 - p) I / d^2`.
pub fn isotropic(d: usize, p: f64) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(Error::ParamOutOfRange { name: "d", value: d as f64 });
    }
    check_probability("p", p)?;
    let n = d * d;
    let phi = CMatrix::outer(&max_entangled_vector(d));
    let raw = &phi.scale_real(p) + &CMatrix::identity(n).scale_real((1.0 - p) / n as f64);
    DensityMatrix::validate(raw, d, d)
}

fn rho4(p: f64, b: f64) -> Result<DensityMatrix> {
    check_probability("p", p)?;
    if !(1.0..=4.0).contains(&b) {
        return Err(Error::ParamOutOfRange { name: "b", value: b });
    }
    let basis = |i: usize, j: usize| CMatrix::unit(9, 3 * i + j, 3 * i + j);
    let sigma_plus = (&(&basis(0, 1) + &basis(1, 2)) + &basis(2, 0)).scale_real(1.0 / 3.0);
    let sigma_minus = (&(&basis(1, 0) + &basis(2, 1)) + &basis(0, 2)).scale_real(1.0 / 3.0);
    let phi = CMatrix::outer(&max_entangled_vector(3));
    let rho_b = &(&phi.scale_real(2.0 / 7.0) + &sigma_plus.scale_real(b / 7.0))
        + &sigma_minus.scale_real((5.0 - b) / 7.0);
    let raw = &rho_b.scale_real(p) + &CMatrix::identity(9).scale_real((1.0 - p) / 9.0);
    DensityMatrix::validate(raw, 3, 3)
}

/// Pure state `sum_j sqrt(q_j) |a_j> ⊗ |b_j>` with explicit local bases.
#[derive(Debug, Clone)]
pub struct SchmidtPureState {
    coefficients: Vec<f64>,
    basis_a: CMatrix,
    basis_b: CMatrix,
}

impl SchmidtPureState {
    /// Computational local bases.
    pub fn new(coefficients: &[f64]) -> Result<Self> {
        let d = coefficients.len();
        Self::with_bases(coefficients, CMatrix::identity(d), CMatrix::identity(d))
    }

    /// Columns of `basis_a` / `basis_b` are the local Schmidt vectors.
    pub fn with_bases(coefficients: &[f64], basis_a: CMatrix, basis_b: CMatrix) -> Result<Self> {
        let d = coefficients.len();
        if coefficients.iter().any(|&q| q < 0.0 || !q.is_finite()) {
            return Err(Error::NotNormalized { sum: f64::NAN });
        }
        let sum: f64 = coefficients.iter().sum();
        if (sum - 1.0).abs() > TOL.trace {
            return Err(Error::NotNormalized { sum });
        }
        for basis in [&basis_a, &basis_b] {
            if basis.rows() != d || basis.cols() != d {
                return Err(Error::DimensionMismatch { expected: d, found: basis.rows() });
            }
            crate::linalg::require_unitary(basis)?;
        }
        Ok(SchmidtPureState { coefficients: coefficients.to_vec(), basis_a, basis_b })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn vector(&self) -> Vec<C64> {
        let d = self.coefficients.len();
        let mut psi = alloc::vec![C64::new(0.0, 0.0); d * d];
        for (j, &q) in self.coefficients.iter().enumerate() {
            let amp = q.sqrt();
            for a in 0..d {
                for b in 0..d {
                    psi[a * d + b] += self.basis_a[(a, j)] * self.basis_b[(b, j)] * amp;
                }
            }
        }
        psi
    }

    pub fn density(&self) -> Result<DensityMatrix> {
        let d = self.coefficients.len();
        DensityMatrix::validate(CMatrix::outer(&self.vector()), d, d)
    }
}

/// `|psi><psi|` for `|psi> = sum_j sqrt(q_j) |jj>`.
pub fn schmidt_state(coeffs: &[f64]) -> Result<DensityMatrix> {
    SchmidtPureState::new(coeffs)?.density()
}

/// `G G^dagger / Tr(G G^dagger)` for a seeded complex Gaussian `G`.
pub fn random_density(dim_a: usize, dim_b: usize, seed: u64) -> DensityMatrix {
    let n = dim_a * dim_b;
    let mut rng = rng::seeded(seed);
    let g = ginibre(n, &mut rng);
    let w = &g * &g.dagger();
    let tr = w.trace().re;
    let matrix = w.scale_real(1.0 / tr).hermitian_part();
    DensityMatrix { dim_a, dim_b, matrix }
}

pub(crate) fn ginibre(n: usize, rng: &mut rng::Rng) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im) * core::f64::consts::FRAC_1_SQRT_2
    })
}
