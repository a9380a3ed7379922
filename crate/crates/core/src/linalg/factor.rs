//! LU, Cholesky and Householder QR factorizations.

use num_complex::Complex64;

use super::DenseMatrix;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// LU factorization with partial pivoting, `P M = L U`.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: DenseMatrix,
    perm: Vec<usize>,
}

impl Lu {
    pub fn new(m: &DenseMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::invalid("LU needs a square matrix"));
        }
        let n = m.rows();
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&a, &b| lu[(a, k)].norm().total_cmp(&lu[(b, k)].norm()))
                .unwrap();
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
            }
            let pivot = lu[(k, k)];
            if pivot == ZERO {
                continue;
            }
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= f * u;
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    pub fn is_singular(&self) -> bool {
        (0..self.dim()).any(|i| self.lu[(i, i)] == ZERO)
    }

    /// Solves `M X = rhs` for a matrix right-hand side.
    pub fn solve(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        let n = self.dim();
        if rhs.rows() != n {
            return Err(Error::invalid("LU solve: right-hand side has wrong row count"));
        }
        if self.is_singular() {
            return Err(Error::invalid("LU solve: matrix is exactly singular"));
        }
        let mut x = DenseMatrix::from_fn(n, rhs.cols(), |i, j| rhs[(self.perm[i], j)]);
        for c in 0..rhs.cols() {
            for i in 0..n {
                let mut s = x[(i, c)];
                for k in 0..i {
                    s -= self.lu[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[(i, c)];
                for k in i + 1..n {
                    s -= self.lu[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s / self.lu[(i, i)];
            }
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<DenseMatrix> {
        self.solve(&DenseMatrix::identity(self.dim()))
    }
}

pub fn inverse(m: &DenseMatrix) -> Result<DenseMatrix> {
    Lu::new(m)?.inverse()
}

/// 1-norm condition number `||M||_1 ||M^-1||_1`, infinite when `M` is
/// exactly singular.
pub fn condition_estimate(m: &DenseMatrix) -> Result<f64> {
    let lu = Lu::new(m)?;
    if lu.is_singular() {
        return Ok(f64::INFINITY);
    }
    let inv = lu.inverse()?;
    let c = m.norm_one() * inv.norm_one();
    Ok(if c.is_finite() { c } else { f64::INFINITY })
}

/// Upper-triangular Cholesky factor `R` with `M = R^H R`, or `None` when
/// `M` is not numerically positive definite. Only the upper triangle of
/// `M` is read.
pub fn cholesky_upper(m: &DenseMatrix) -> Option<DenseMatrix> {
    if !m.is_square() {
        return None;
    }
    let n = m.rows();
    let mut r = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = m[(j, j)].re;
        for k in 0..j {
            d -= r[(k, j)].norm_sqr();
        }
        if !(d > 0.0) || !d.is_finite() {
            return None;
        }
        let rjj = d.sqrt();
        r[(j, j)] = Complex64::new(rjj, 0.0);
        for i in j + 1..n {
            let mut s = m[(j, i)];
            for k in 0..j {
                s -= r[(k, j)].conj() * r[(k, i)];
            }
            r[(j, i)] = s / rjj;
        }
    }
    Some(r)
}

/// Solves `R^H X = rhs` with `R` upper triangular.
pub fn solve_upper_adjoint(r: &DenseMatrix, rhs: &DenseMatrix) -> DenseMatrix {
    let n = r.rows();
    let mut x = rhs.clone();
    for c in 0..rhs.cols() {
        for i in 0..n {
            let mut s = x[(i, c)];
            for k in 0..i {
                s -= r[(k, i)].conj() * x[(k, c)];
            }
            x[(i, c)] = s / r[(i, i)].conj();
        }
    }
    x
}

/// Householder vector for `x`: returns `(v, alpha)` with unit `v` such that
/// `(I - 2 v v^H) x = alpha e_1`, or `None` when `x` is zero.
pub(crate) fn householder(x: &[Complex64]) -> Option<(Vec<Complex64>, Complex64)> {
    let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return None;
    }
    let phase = if x[0].norm() == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        x[0] / x[0].norm()
    };
    let alpha = -phase * norm;
    let mut v = x.to_vec();
    v[0] -= alpha;
    let vn = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if vn == 0.0 {
        return None;
    }
    for z in &mut v {
        *z /= vn;
    }
    Some((v, alpha))
}

/// Thin QR of an `m x k` matrix (`k <= m`) by Householder reflections.
/// The diagonal of `R` is made real and nonnegative, which fixes the
/// column phases of `Q`.
pub fn qr_thin(m: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    let (rows, k) = (m.rows(), m.cols());
    if k > rows {
        return Err(Error::invalid(format!("thin QR needs cols <= rows, got {rows}x{k}")));
    }
    let mut r = m.clone();
    let mut reflectors: Vec<Option<Vec<Complex64>>> = Vec::with_capacity(k);
    for j in 0..k {
        let x: Vec<Complex64> = (j..rows).map(|i| r[(i, j)]).collect();
        let h = householder(&x);
        if let Some((v, _)) = &h {
            for c in j..k {
                let dot: Complex64 = (j..rows).map(|i| v[i - j].conj() * r[(i, c)]).sum();
                for i in j..rows {
                    r[(i, c)] -= v[i - j] * dot * 2.0;
                }
            }
        }
        reflectors.push(h.map(|(v, _)| v));
    }
    // Accumulate Q = H_0 H_1 ... H_{k-1} applied to the first k columns of I.
    let mut q = DenseMatrix::from_fn(rows, k, |i, j| {
        if i == j {
            Complex64::new(1.0, 0.0)
        } else {
            ZERO
        }
    });
    for j in (0..k).rev() {
        if let Some(v) = &reflectors[j] {
            for c in 0..k {
                let dot: Complex64 = (j..rows).map(|i| v[i - j].conj() * q[(i, c)]).sum();
                for i in j..rows {
                    q[(i, c)] -= v[i - j] * dot * 2.0;
                }
            }
        }
    }
    let mut r_thin = r.block(0, 0, k, k);
    for i in 0..k {
        for j in 0..i {
            r_thin[(i, j)] = ZERO;
        }
    }
    for j in 0..k {
        let d = r_thin[(j, j)];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            for i in 0..rows {
                q[(i, j)] *= phase;
            }
            for c in j + 1..k {
                r_thin[(j, c)] *= phase.conj();
            }
            r_thin[(j, j)] = Complex64::new(d.norm(), 0.0);
        }
    }
    Ok((q, r_thin))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize, m: usize) -> DenseMatrix {
        DenseMatrix::from_fn(n, m, |i, j| {
            Complex64::new(((i * 7 + j * 3) % 5) as f64 - 2.0 + 0.1 * j as f64, (i as f64 - j as f64) * 0.37)
        })
    }

    #[test]
    fn lu_solves_and_inverts() {
        let m = &sample(4, 4) + &DenseMatrix::identity(4).scale_real(3.0);
        let inv = inverse(&m).unwrap();
        let err = (&(&m * &inv) - &DenseMatrix::identity(4)).max_abs();
        assert!(err < 1e-13, "{err}");
    }

    #[test]
    fn singular_condition_is_infinite() {
        let m = DenseMatrix::from_real(2, 2, &[1.0, 2.0, 2.0, 4.0]).unwrap();
        assert!(condition_estimate(&m).unwrap() > 1e15);
        let z = DenseMatrix::zeros(3, 3);
        assert_eq!(condition_estimate(&z).unwrap(), f64::INFINITY);
    }

    #[test]
    fn cholesky_roundtrip_and_rejection() {
        let g = sample(4, 4);
        let spd = &(&g.adjoint() * &g) + &DenseMatrix::identity(4);
        let r = cholesky_upper(&spd).unwrap();
        let err = (&(&r.adjoint() * &r) - &spd).max_abs();
        assert!(err < 1e-12, "{err}");
        let indefinite = DenseMatrix::from_real_diag(&[1.0, -1.0]);
        assert!(cholesky_upper(&indefinite).is_none());
        let x = solve_upper_adjoint(&r, &spd);
        assert!((&(&r.adjoint() * &x) - &spd).max_abs() < 1e-12);
    }

    #[test]
    fn qr_thin_reconstructs() {
        let m = sample(6, 3);
        let (q, r) = qr_thin(&m).unwrap();
        assert!((&(&q * &r) - &m).max_abs() < 1e-13);
        assert!((&(&q.adjoint() * &q) - &DenseMatrix::identity(3)).max_abs() < 1e-13);
        for j in 0..3 {
            assert!(r[(j, j)].im == 0.0 && r[(j, j)].re >= 0.0);
        }
        assert!(qr_thin(&sample(2, 3)).is_err());
    }
}
