//! Small dense linear algebra helpers shared by the determinant criteria
//! and the stability classifier.

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};

/// Determinant via LU with partial pivoting.
pub fn det(mat: &DMatrix<f64>) -> f64 {
    mat.clone().lu().determinant()
}

/// Eigenvalues of a real square matrix through Hessenberg reduction and
/// shifted QR iterations (real Schur form). Fails if the QR sweep does not
/// converge within `max_iter` iterations.
pub fn eigenvalues(mat: &DMatrix<f64>, max_iter: usize) -> Result<Vec<Complex<f64>>> {
    let schur = mat
        .clone()
        .try_schur(f64::EPSILON, max_iter)
        .ok_or_else(|| {
            Error::numeric(format!("QR iteration did not converge within {max_iter} sweeps"))
        })?;
    let eigs = schur.complex_eigenvalues();
    Ok(eigs.iter().copied().collect())
}

/// Jacobian of `f` at `x` by central differences with the given step.
pub fn jacobian_fd<F>(f: F, x: &[f64], step: f64) -> DMatrix<f64>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let n = x.len();
    let f0 = f(x);
    let m = f0.len();
    let mut jac = DMatrix::zeros(m, n);
    let mut xp = x.to_vec();
    let mut xm = x.to_vec();
    for j in 0..n {
        xp[j] = x[j] + step;
        xm[j] = x[j] - step;
        let fp = f(&xp);
        let fm = f(&xm);
        for i in 0..m {
            jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * step);
        }
        xp[j] = x[j];
        xm[j] = x[j];
    }
    jac
}
