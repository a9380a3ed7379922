//! Dense complex linear-algebra kernels.

mod dense;
pub mod factor;
pub mod io;
mod jacobi;
pub mod random;
mod schur;

use std::cmp::Ordering;

use num_complex::Complex64;

pub use dense::DenseMatrix;
pub use factor::{cholesky_upper, condition_estimate, inverse, qr_thin, Lu};
pub use jacobi::{herm_eig, spectral_norm, svd, Svd};
pub use random::{haar_orthonormal, haar_orthonormal_with};
pub use schur::general_eig;

use crate::error::{Error, Result};

/// Largest condition estimate of `B` accepted when reducing a pencil to a
/// standard problem.
pub const MAX_REDUCTION_CONDITION: f64 = 1e12;

/// Relative Hermitian tolerance used by [`is_hermitian_definite`].
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Crate-wide eigenvalue order: descending magnitude, ties broken by
/// descending real part, then descending imaginary part.
pub fn eigenvalue_order(a: &Complex64, b: &Complex64) -> Ordering {
    b.norm()
        .total_cmp(&a.norm())
        .then(b.re.total_cmp(&a.re))
        .then(b.im.total_cmp(&a.im))
}

pub fn sort_eigenvalues(values: &mut [Complex64]) {
    values.sort_by(eigenvalue_order);
}

fn hermitian_defect(m: &DenseMatrix) -> Result<f64> {
    let d = m - &m.adjoint();
    if d.max_abs() == 0.0 {
        Ok(0.0)
    } else {
        spectral_norm(&d)
    }
}

/// `A`, `B` Hermitian to `HERMITIAN_TOL * max(||A||, ||B||)` and `B`
/// admits a Cholesky factorization.
pub fn is_hermitian_definite(a: &DenseMatrix, b: &DenseMatrix) -> Result<bool> {
    if !a.is_square() || !b.is_square() || a.rows() != b.rows() {
        return Ok(false);
    }
    let da = hermitian_defect(a)?;
    let db = hermitian_defect(b)?;
    if da > 0.0 || db > 0.0 {
        let scale = spectral_norm(a)?.max(spectral_norm(b)?);
        if da > HERMITIAN_TOL * scale || db > HERMITIAN_TOL * scale {
            return Ok(false);
        }
    }
    Ok(cholesky_upper(&b.hermitian_part()).is_some())
}

/// Eigenvalues of the pencil `A - lambda B` with invertible `B`.
///
/// When `hermitian_definite` is set and the pair passes
/// [`is_hermitian_definite`], the pencil is reduced by the Cholesky factor
/// `B = R^H R` to the Hermitian matrix `R^-H A R^-1`. Otherwise the standard
/// problem `B^-1 A` is solved.
pub fn generalized_eig(a: &DenseMatrix, b: &DenseMatrix, hermitian_definite: bool) -> Result<Vec<Complex64>> {
    if !a.is_square() || !b.is_square() || a.rows() != b.rows() {
        return Err(Error::invalid(format!(
            "pencil needs square matrices of equal size, got {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    if hermitian_definite && is_hermitian_definite(a, b)? {
        let r = cholesky_upper(&b.hermitian_part()).expect("checked definite");
        let cond = condition_estimate(&r)?.powi(2);
        if cond > MAX_REDUCTION_CONDITION {
            return Err(Error::IllPosedReduction { cond });
        }
        // C = R^-H A R^-1, via two adjoint triangular solves
        let y = factor::solve_upper_adjoint(&r, &a.hermitian_part());
        let c = factor::solve_upper_adjoint(&r, &y.adjoint());
        let (_, lambdas) = herm_eig(&c)?;
        let mut eigs: Vec<Complex64> = lambdas.into_iter().map(|l| Complex64::new(l, 0.0)).collect();
        sort_eigenvalues(&mut eigs);
        return Ok(eigs);
    }
    let cond = condition_estimate(b)?;
    if cond > MAX_REDUCTION_CONDITION {
        return Err(Error::IllPosedReduction { cond });
    }
    let m = Lu::new(b)?.solve(a)?;
    general_eig(&m)
}
