use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::CMatrix;
use crate::tolerances::TOL;
use crate::{Error, Result, C64};

/// Eigen-decomposition of a Hermitian matrix, eigenvalues in non-increasing
/// order and eigenvectors stored as the matching columns.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl Spectrum {
    pub fn min(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    /// `V diag(f(lambda)) V^dagger`.
    pub fn map(&self, f: impl Fn(f64) -> C64) -> CMatrix {
        let v = &self.eigenvectors;
        let n = v.rows();
        let fl: Vec<C64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        CMatrix::from_fn(n, n, |i, j| (0..n).map(|k| v[(i, k)] * fl[k] * v[(j, k)].conj()).sum())
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.map(|l| C64::new(l, 0.0))
    }
}

/// Cyclic Jacobi eigensolver for complex Hermitian matrices.
///
/// Each rotation first removes the phase of the pivot `a_pq`, then applies the
/// real symmetric Jacobi rotation that zeroes it. Sweeps run until the
/// off-diagonal mass falls below `1e-30` of the total, with a cap of
/// [`Tolerances::max_jacobi_sweeps`](crate::Tolerances).
pub fn eig_hermitian(m: &CMatrix) -> Result<Spectrum> {
    let n = m.require_square()?;
    let deviation = m.hermiticity_deviation();
    if deviation > TOL.hermiticity {
        return Err(Error::NonHermitian { deviation });
    }
    let mut a = m.hermitian_part();
    let mut v = CMatrix::identity(n);
    let total: f64 = a.as_slice().iter().map(|z| z.norm_sqr()).sum();
    let target = total * 1e-30;

    let mut converged = n <= 1;
    for _ in 0..TOL.max_jacobi_sweeps {
        if off_diagonal_sq(&a) <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_sq(&a) > target {
        return Err(Error::NoConvergence { sweeps: TOL.max_jacobi_sweeps });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Ok(Spectrum { eigenvalues, eigenvectors })
}

/// Eigenvalues only, non-increasing.
pub fn eigvals_hermitian(m: &CMatrix) -> Result<Vec<f64>> {
    eig_hermitian(m).map(|s| s.eigenvalues)
}

fn off_diagonal_sq(a: &CMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s
}

fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Pivot negligible against both diagonal entries: zeroing it changes nothing.
    if app.abs() + g * 1e18 == app.abs() && aqq.abs() + g * 1e18 == aqq.abs() {
        a[(p, q)] = C64::new(0.0, 0.0);
        a[(q, p)] = C64::new(0.0, 0.0);
        return;
    }
    let phase = apq / g;
    let theta = (aqq - app) / (2.0 * g);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // V = diag(1, conj(phase)) * [[c, s], [-s, c]] on the (p, q) plane.
    let vpp = C64::new(c, 0.0);
    let vpq = C64::new(s, 0.0);
    let vqp = -phase.conj() * s;
    let vqq = phase.conj() * c;

    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * vpp + akq * vqp;
        a[(k, q)] = akp * vpq + akq * vqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = vpp.conj() * apk + vqp.conj() * aqk;
        a[(q, k)] = vpq.conj() * apk + vqq.conj() * aqk;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * vpp + vkq * vqp;
        v[(k, q)] = vkp * vpq + vkq * vqq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_spectrum() {
        let s = eig_hermitian(&CMatrix::identity(4)).unwrap();
        assert_eq!(s.eigenvalues, [1.0; 4]);
    }

    #[test]
    fn diagonal_is_sorted_descending() {
        let s = eig_hermitian(&CMatrix::from_real_diag(&[0.5, -0.5, 0.5, 0.5])).unwrap();
        assert_eq!(s.eigenvalues, [0.5, 0.5, 0.5, -0.5]);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(eig_hermitian(&m), Err(Error::NonHermitian { .. })));
    }

    #[test]
    fn rejects_non_square() {
        assert!(matches!(eig_hermitian(&CMatrix::zeros(2, 3)), Err(Error::NonSquare { .. })));
    }

    #[test]
    fn complex_two_by_two_closed_form() {
        // [[1, i], [-i, 1]] has eigenvalues 2 and 0.
        let m = CMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => C64::new(0.0, 1.0),
            (1, 0) => C64::new(0.0, -1.0),
            _ => C64::new(1.0, 0.0),
        });
        let s = eig_hermitian(&m).unwrap();
        assert!((s.eigenvalues[0] - 2.0).abs() < 1e-14);
        assert!(s.eigenvalues[1].abs() < 1e-14);
        assert!((s.reconstruct() - m).frobenius_norm() < 1e-14);
    }

    #[test]
    fn zero_matrix() {
        let s = eig_hermitian(&CMatrix::zeros(3, 3)).unwrap();
        assert_eq!(s.eigenvalues, [0.0; 3]);
    }
}
