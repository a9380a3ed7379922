//! Hermitian eigendecomposition (two-sided cyclic Jacobi) and singular value
//! decomposition (one-sided Hestenes-Jacobi). Both are accurate to a few
//! ulps relative to the matrix norm, which matters when the smallest
//! quantities of interest sit near 1e-4 of the largest.

use num_complex::Complex64;

use super::DenseMatrix;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Rotation `J = diag(1, conj(phase)) * [[c, s], [-s, c]]` that zeroes the
/// off-diagonal of the Hermitian 2x2 `[[alpha, gamma], [conj(gamma), beta]]`.
/// Returns `(c, s, conj(phase))`.
#[inline]
fn jacobi_rotation(alpha: f64, beta: f64, gamma: Complex64) -> (f64, f64, Complex64) {
    let g = gamma.norm();
    let phase_conj = (gamma / g).conj();
    let zeta = (beta - alpha) / (2.0 * g);
    let t = if zeta == 0.0 {
        1.0
    } else {
        zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    (c, c * t, phase_conj)
}

/// Applies `M <- M J` to columns `p`, `q`.
#[inline]
fn rotate_columns(m: &mut DenseMatrix, p: usize, q: usize, c: f64, s: f64, w: Complex64) {
    for i in 0..m.rows() {
        let xp = m[(i, p)];
        let xq = m[(i, q)] * w;
        m[(i, p)] = xp * c - xq * s;
        m[(i, q)] = xp * s + xq * c;
    }
}

/// Applies `M <- J^H M` to rows `p`, `q`.
#[inline]
fn rotate_rows(m: &mut DenseMatrix, p: usize, q: usize, c: f64, s: f64, w: Complex64) {
    let wc = w.conj();
    for j in 0..m.cols() {
        let xp = m[(p, j)];
        let xq = m[(q, j)] * wc;
        m[(p, j)] = xp * c - xq * s;
        m[(q, j)] = xp * s + xq * c;
    }
}

/// Eigendecomposition of a Hermitian matrix. The input is symmetrized as
/// `(H + H^H)/2` first. Returns `(Q, lambdas)` with `H Q = Q diag(lambdas)`,
/// `Q` unitary and `lambdas` sorted descending.
pub fn herm_eig(h: &DenseMatrix) -> Result<(DenseMatrix, Vec<f64>)> {
    if !h.is_square() {
        return Err(Error::invalid("herm_eig needs a square matrix"));
    }
    if !h.is_finite() {
        return Err(Error::invalid("herm_eig: non-finite input"));
    }
    let n = h.rows();
    let mut a = h.hermitian_part();
    let mut q = DenseMatrix::identity(n);
    let fro = a.frobenius_norm();

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum();
        if off.sqrt() <= 1e-3 * f64::EPSILON * fro || off == 0.0 {
            break;
        }
        for p in 0..n {
            for r in p + 1..n {
                let gamma = a[(p, r)];
                if gamma.norm() == 0.0 {
                    continue;
                }
                let (c, s, w) = jacobi_rotation(a[(p, p)].re, a[(r, r)].re, gamma);
                rotate_columns(&mut a, p, r, c, s, w);
                rotate_rows(&mut a, p, r, c, s, w);
                a[(p, r)] = Complex64::new(0.0, 0.0);
                a[(r, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)].im = 0.0;
                a[(r, r)].im = 0.0;
                rotate_columns(&mut q, p, r, c, s, w);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let lambdas = order.iter().map(|&i| a[(i, i)].re).collect();
    Ok((q.select_columns(&order), lambdas))
}

/// Thin singular value decomposition `M = U diag(sigmas) V^H`.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: DenseMatrix,
    pub sigmas: Vec<f64>,
    pub v: DenseMatrix,
}

/// Thin SVD of an `m x n` matrix; `U` is `m x k`, `V` is `n x k` with
/// `k = min(m, n)`, singular values nonincreasing.
pub fn svd(m: &DenseMatrix) -> Result<Svd> {
    if !m.is_finite() {
        return Err(Error::invalid("svd: non-finite input"));
    }
    if m.rows() < m.cols() {
        let t = svd(&m.adjoint())?;
        return Ok(Svd {
            u: t.v,
            sigmas: t.sigmas,
            v: t.u,
        });
    }
    let (rows, n) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut v = DenseMatrix::identity(n);

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = Complex64::new(0.0, 0.0);
                for i in 0..rows {
                    let (x, y) = (a[(i, p)], a[(i, q)]);
                    alpha += x.norm_sqr();
                    beta += y.norm_sqr();
                    gamma += x.conj() * y;
                }
                if gamma.norm() == 0.0 || gamma.norm() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let (c, s, w) = jacobi_rotation(alpha, beta, gamma);
                rotate_columns(&mut a, p, q, c, s, w);
                rotate_columns(&mut v, p, q, c, s, w);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = (0..n)
        .map(|j| (0..rows).map(|i| a[(i, j)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let sigmas: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let v = v.select_columns(&order);
    let top = sigmas[0];

    let mut u = DenseMatrix::zeros(rows, n);
    let mut deficient = Vec::new();
    for (k, &j) in order.iter().enumerate() {
        let s = norms[j];
        if s == 0.0 || s < 1e-200 * top {
            deficient.push(k);
            continue;
        }
        for i in 0..rows {
            u[(i, k)] = a[(i, j)] / s;
        }
    }
    for k in deficient {
        complete_column(&mut u, k);
    }
    Ok(Svd { u, sigmas, v })
}

/// Fills column `k` of `u` with a unit vector orthogonal to its other
/// nonzero columns.
fn complete_column(u: &mut DenseMatrix, k: usize) {
    let rows = u.rows();
    let filled: Vec<usize> = (0..u.cols())
        .filter(|&j| j != k && (0..rows).any(|i| u[(i, j)].norm() > 0.0))
        .collect();
    let mut best: Option<(f64, Vec<Complex64>)> = None;
    for e in 0..rows {
        let mut x = vec![Complex64::new(0.0, 0.0); rows];
        x[e] = Complex64::new(1.0, 0.0);
        // two passes of Gram-Schmidt
        for _ in 0..2 {
            for &j in &filled {
                let dot: Complex64 = (0..rows).map(|i| u[(i, j)].conj() * x[i]).sum();
                for i in 0..rows {
                    x[i] -= u[(i, j)] * dot;
                }
            }
        }
        let nrm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if best.as_ref().is_none_or(|(b, _)| nrm > *b) {
            best = Some((nrm, x));
        }
    }
    let (nrm, x) = best.expect("at least one row");
    for i in 0..rows {
        u[(i, k)] = x[i] / nrm;
    }
}

pub fn spectral_norm(m: &DenseMatrix) -> Result<f64> {
    Ok(svd(m)?.sigmas[0])
}
