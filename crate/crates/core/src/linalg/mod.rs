//! Dense complex linear algebra sized for operators up to a few dozen rows.

mod eigen;
mod matrix;

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

pub use eigen::{eig_hermitian, eigvals_hermitian, Spectrum};
pub use matrix::CMatrix;

use crate::tolerances::TOL;
use crate::{Error, Result, C64};

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm(m: &CMatrix) -> Result<f64> {
    Ok(eigvals_hermitian(m)?.iter().map(|l| l.abs()).sum())
}

/// Schatten p-norm of a Hermitian matrix, `(sum |lambda|^p)^(1/p)`.
pub fn schatten_norm(m: &CMatrix, p: f64) -> Result<f64> {
    let s: f64 = eigvals_hermitian(m)?.iter().map(|l| l.abs().powf(p)).sum();
    Ok(s.powf(1.0 / p))
}

/// `(Tr M, Tr M^2, ..., Tr M^n_max)` by repeated multiplication.
///
/// Only the real parts are returned; for Hermitian input the imaginary parts
/// are rounding noise.
pub fn matrix_power_traces(m: &CMatrix, n_max: usize) -> Result<Vec<f64>> {
    m.require_square()?;
    let mut out = Vec::with_capacity(n_max);
    if n_max == 0 {
        return Ok(out);
    }
    let mut power = m.clone();
    out.push(power.trace().re);
    for _ in 1..n_max {
        power = &power * m;
        out.push(power.trace().re);
    }
    Ok(out)
}

/// `exp(i t H)` for Hermitian `H`, through its eigendecomposition.
pub fn expm_hermitian_generator(h: &CMatrix, t: f64) -> Result<CMatrix> {
    let spec = eig_hermitian(h)?;
    Ok(spec.map(|l| C64::from_polar(1.0, t * l)))
}

/// Determinant by LU factorization with partial pivoting.
pub fn det_small(m: &CMatrix) -> Result<C64> {
    let n = m.require_square()?;
    let mut a = m.clone();
    let mut det = C64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[(i, col)].norm().total_cmp(&a[(j, col)].norm()))
            .unwrap_or(col);
        if a[(pivot, col)].norm() == 0.0 {
            return Ok(C64::new(0.0, 0.0));
        }
        if pivot != col {
            for k in 0..n {
                let tmp = a[(col, k)];
                a[(col, k)] = a[(pivot, k)];
                a[(pivot, k)] = tmp;
            }
            det = -det;
        }
        let p = a[(col, col)];
        det *= p;
        for i in (col + 1)..n {
            let f = a[(i, col)] / p;
            if f == C64::new(0.0, 0.0) {
                continue;
            }
            for k in col..n {
                let sub = f * a[(col, k)];
                a[(i, k)] -= sub;
            }
        }
    }
    Ok(det)
}

/// Thin QR of a square matrix by twice-iterated modified Gram-Schmidt.
///
/// The diagonal of `R` comes out real and non-negative, which is the phase
/// convention Haar sampling needs.
pub fn qr(m: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    let n = m.require_square()?;
    let mut q: Vec<Vec<C64>> = (0..n).map(|j| m.column(j)).collect();
    let mut r = CMatrix::zeros(n, n);
    for j in 0..n {
        for _pass in 0..2 {
            for i in 0..j {
                let proj: C64 = q[i].iter().zip(&q[j]).map(|(a, b)| a.conj() * b).sum();
                r[(i, j)] += proj;
                let qi = q[i].clone();
                for (x, y) in q[j].iter_mut().zip(&qi) {
                    *x -= proj * y;
                }
            }
        }
        let norm = q[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        r[(j, j)] = C64::new(norm, 0.0);
        if norm > 0.0 {
            for x in q[j].iter_mut() {
                *x /= norm;
            }
        }
    }
    let qm = CMatrix::from_fn(n, n, |i, j| q[j][i]);
    Ok((qm, r))
}

/// Nearest unitary in Frobenius norm, `M (M^dagger M)^(-1/2)`.
pub fn polar_unitary(m: &CMatrix) -> Result<CMatrix> {
    m.require_square()?;
    let gram = (&m.dagger() * m).hermitian_part();
    let spec = eig_hermitian(&gram)?;
    if spec.min() <= 1e-14 * spec.max().max(1e-300) {
        return Err(Error::NotUnitary { residual: f64::INFINITY });
    }
    let inv_sqrt = spec.map(|l| C64::new(1.0 / l.sqrt(), 0.0));
    Ok(m * &inv_sqrt)
}

/// Returns `m` unchanged if unitary within tolerance.
pub fn require_unitary(m: &CMatrix) -> Result<()> {
    let residual = m.unitarity_residual();
    if residual > TOL.unitarity {
        Err(Error::NotUnitary { residual })
    } else {
        Ok(())
    }
}
