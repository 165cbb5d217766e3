//! Global unitaries: the explicit example gates, Haar sampling, a smooth
//! chart of the unitary group and the search for criterion-violating gates.

mod nelder_mead;
mod search;

use alloc::string::{String, ToString};
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::{expm_hermitian_generator, polar_unitary, qr, CMatrix};
use crate::tolerances::TOL;
use crate::{rng, Error, Result, C64};

pub use nelder_mead::{minimize, Minimum, NelderMeadOptions};
pub use search::{score, search_staged, search_violating_unitary, Objective, SearchConfig, UnitarySearchResult};

/// Residual above which the verbatim U4 formula is replaced by its polar factor.
pub const POLAR_CORRECTION_THRESHOLD: f64 = 1e-8;

/// Unitary acting on the whole bipartite space.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct GlobalUnitary {
    matrix: CMatrix,
    label: String,
    /// Unitarity residual of the raw matrix when a polar correction was applied.
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none"))]
    correction: Option<f64>,
}

impl GlobalUnitary {
    pub fn new(matrix: CMatrix, label: impl Into<String>) -> Result<Self> {
        let residual = matrix.unitarity_residual();
        if residual > TOL.unitarity {
            return Err(Error::NotUnitary { residual });
        }
        Ok(GlobalUnitary { matrix, label: label.into(), correction: None })
    }

    /// Accepts `raw` if unitary, otherwise replaces it by the nearest unitary
    /// when the residual exceeds [`POLAR_CORRECTION_THRESHOLD`].
    pub fn with_polar_correction(raw: CMatrix, label: impl Into<String>) -> Result<Self> {
        let residual = raw.unitarity_residual();
        if residual <= POLAR_CORRECTION_THRESHOLD {
            let matrix = if residual <= TOL.unitarity { raw } else { polar_unitary(&raw)? };
            return Ok(GlobalUnitary { matrix, label: label.into(), correction: None });
        }
        let fixed = polar_unitary(&raw)?;
        let after = fixed.unitarity_residual();
        if after > POLAR_CORRECTION_THRESHOLD {
            return Err(Error::NotUnitary { residual: after });
        }
        Ok(GlobalUnitary { matrix: fixed, label: label.into(), correction: Some(residual) })
    }

    pub fn identity(dim: usize) -> Self {
        GlobalUnitary { matrix: CMatrix::identity(dim), label: "identity".to_string(), correction: None }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn correction(&self) -> Option<f64> {
        self.correction
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn compose(&self, other: &GlobalUnitary) -> GlobalUnitary {
        GlobalUnitary { matrix: &self.matrix * &other.matrix, label: self.label.clone(), correction: None }
    }
}

/// The explicit unitaries of the worked examples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExampleUnitary {
    U1,
    U2,
    U3,
    U4 { phi1: f64, phi2: f64 },
}

pub fn example_unitary(id: ExampleUnitary) -> Result<GlobalUnitary> {
    let h = core::f64::consts::FRAC_1_SQRT_2;
    match id {
        ExampleUnitary::U1 => {
            let m = CMatrix::from_real_rows(&[
                &[h, 0.0, 0.0, h],
                &[0.0, 1.0, 0.0, 0.0],
                &[0.0, 0.0, 1.0, 0.0],
                &[-h, 0.0, 0.0, h],
            ]);
            GlobalUnitary::new(m, "U1")
        }
        ExampleUnitary::U2 => GlobalUnitary::new(u2_repaired(), "U2"),
        ExampleUnitary::U3 => {
            let mut m = CMatrix::identity(9);
            let shrink = (core::f64::consts::SQRT_2 - 1.0) / core::f64::consts::SQRT_2;
            m[(0, 0)] -= shrink;
            m[(8, 8)] -= shrink;
            m[(0, 8)] += h;
            m[(8, 0)] -= h;
            GlobalUnitary::new(m, "U3")
        }
        ExampleUnitary::U4 { phi1, phi2 } => {
            let label = alloc::format!("U4({phi1},{phi2})");
            GlobalUnitary::with_polar_correction(u4_verbatim(phi1, phi2), label)
        }
    }
}

/// The 8x8 gate as typeset, with a stray `1/4` at (0, 2) and a stray `1` at
/// (7, 5). It is not unitary; [`ExampleUnitary::U2`] drops both entries.
pub fn u2_as_printed() -> CMatrix {
    let mut m = u2_repaired();
    let h = core::f64::consts::FRAC_1_SQRT_2;
    m[(0, 2)] = C64::new(0.25 * h, 0.0);
    m[(7, 5)] = C64::new(h, 0.0);
    m
}

// Rotation by pi/4 in the |0>,|7> plane, identity elsewhere.
fn u2_repaired() -> CMatrix {
    let h = core::f64::consts::FRAC_1_SQRT_2;
    let mut m = CMatrix::identity(8);
    m[(0, 0)] = C64::new(h, 0.0);
    m[(0, 7)] = C64::new(h, 0.0);
    m[(7, 0)] = C64::new(-h, 0.0);
    m[(7, 7)] = C64::new(h, 0.0);
    m
}

pub(crate) fn pauli(which: char) -> CMatrix {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let v = match which {
        'x' => [z, one, one, z],
        'y' => [z, -i, i, z],
        'z' => [one, z, z, -one],
        _ => [one, z, z, one],
    };
    CMatrix::from_vec(2, 2, v.to_vec()).expect("2x2")
}

fn pauli3(a: char, b: char, c: char) -> CMatrix {
    pauli(a).kron(&pauli(b)).kron(&pauli(c))
}

/// `cos φ1 XYZ + sin φ1 sin φ2 YZX + sin φ1 cos φ2 ZXY ⊕ [1]`, unnormalized.
pub fn u4_verbatim(phi1: f64, phi2: f64) -> CMatrix {
    let a = pauli3('x', 'y', 'z').scale_real(phi1.cos());
    let b = pauli3('y', 'z', 'x').scale_real(phi1.sin() * phi2.sin());
    let c = pauli3('z', 'x', 'y').scale_real(phi1.sin() * phi2.cos());
    (&(&a + &b) + &c).direct_sum(&CMatrix::identity(1))
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the
/// diagonal of `R` made positive.
pub fn haar_random(dim: usize, seed: u64) -> GlobalUnitary {
    let mut r = rng::seeded(seed);
    haar_with(dim, &mut r)
}

pub(crate) fn haar_with(dim: usize, r: &mut rng::Rng) -> GlobalUnitary {
    loop {
        let g = crate::states::ginibre(dim, r);
        let (q, rr) = qr(&g).expect("square");
        // A zero pivot has probability zero; redraw if it happens.
        if (0..dim).all(|i| rr[(i, i)].re > 1e-12) {
            return GlobalUnitary { matrix: q, label: "haar".to_string(), correction: None };
        }
    }
}

/// Hermitian matrix from `dim^2` reals: diagonal first, then `(re, im)` of
/// each upper off-diagonal entry in row-major order.
pub fn hermitian_from_params(params: &[f64], dim: usize) -> Result<CMatrix> {
    if params.len() != dim * dim {
        return Err(Error::LengthMismatch { expected: dim * dim, found: params.len() });
    }
    let mut h = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        h[(i, i)] = C64::new(params[i], 0.0);
    }
    let mut k = dim;
    for i in 0..dim {
        for j in (i + 1)..dim {
            let z = C64::new(params[k], params[k + 1]);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
            k += 2;
        }
    }
    Ok(h)
}

/// `exp(i H(params))`.
pub fn parameterized(params: &[f64], dim: usize) -> Result<GlobalUnitary> {
    let h = hermitian_from_params(params, dim)?;
    let matrix = expm_hermitian_generator(&h, 1.0)?;
    Ok(GlobalUnitary { matrix, label: "parameterized".to_string(), correction: None })
}

/// Parameters for a diagonal generator (handy for tests and seeds).
pub fn diagonal_params(diag: &[f64]) -> Vec<f64> {
    let d = diag.len();
    let mut p = alloc::vec![0.0; d * d];
    p[..d].copy_from_slice(diag);
    p
}
