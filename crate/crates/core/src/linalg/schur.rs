//! Eigenvalues of a general complex matrix: diagonal balancing, Householder
//! reduction to upper Hessenberg form, then single-shift complex QR with
//! Wilkinson shifts and deflation.

use num_complex::Complex64;

use super::factor::householder;
use super::{sort_eigenvalues, DenseMatrix};
use crate::error::{Error, Result};

/// Total QR iterations allowed, per unit of dimension.
const SWEEPS_PER_DIM: usize = 30;

/// All `n` eigenvalues of a square matrix, in the crate ordering
/// (descending magnitude, ties by real then imaginary part).
pub fn general_eig(m: &DenseMatrix) -> Result<Vec<Complex64>> {
    if !m.is_square() {
        return Err(Error::invalid("general_eig needs a square matrix"));
    }
    if !m.is_finite() {
        return Err(Error::invalid("general_eig: non-finite input"));
    }
    let mut h = m.clone();
    balance(&mut h);
    hessenberg(&mut h);
    let mut eigs = hessenberg_qr(&mut h)?;
    sort_eigenvalues(&mut eigs);
    Ok(eigs)
}

#[inline]
fn abs1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Parlett-Reinsch diagonal similarity with powers of two.
fn balance(a: &mut DenseMatrix) {
    const RADIX: f64 = 2.0;
    let n = a.rows();
    let mut converged = false;
    while !converged {
        converged = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += abs1(a[(j, i)]);
                    r += abs1(a[(i, j)]);
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX * RADIX;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= RADIX * RADIX;
            }
            if (c + r) / f < 0.95 * s {
                converged = false;
                for j in 0..n {
                    a[(i, j)] /= f;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
    }
}

/// In-place unitary reduction to upper Hessenberg form.
fn hessenberg(a: &mut DenseMatrix) {
    let n = a.rows();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let x: Vec<Complex64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        let Some((v, _)) = householder(&x) else {
            continue;
        };
        // A <- P A
        for j in 0..n {
            let dot: Complex64 = (k + 1..n).map(|i| v[i - k - 1].conj() * a[(i, j)]).sum();
            for i in k + 1..n {
                a[(i, j)] -= v[i - k - 1] * dot * 2.0;
            }
        }
        // A <- A P
        for i in 0..n {
            let dot: Complex64 = (k + 1..n).map(|j| a[(i, j)] * v[j - k - 1]).sum();
            for j in k + 1..n {
                a[(i, j)] -= dot * v[j - k - 1].conj() * 2.0;
            }
        }
        for i in k + 2..n {
            a[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
}

/// Givens rotation `[[c, s], [-conj(s), c]]` mapping `(a, b)` to `(r, 0)`.
#[inline]
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let an = a.norm();
    if b.norm() == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if an == 0.0 {
        return (0.0, b.conj() / b.norm());
    }
    let r = an.hypot(b.norm());
    (an / r, (a / an) * b.conj() / r)
}

/// Eigenvalue of the trailing 2x2 block closer to its last diagonal entry.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mid = (a + d) * 0.5;
    let l1 = mid + disc;
    let l2 = mid - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

fn hessenberg_qr(h: &mut DenseMatrix) -> Result<Vec<Complex64>> {
    let n = h.rows();
    let budget = SWEEPS_PER_DIM * n;
    let mut total = 0usize;
    let mut since_deflation = 0usize;
    let mut hi = n - 1;
    let scale = h.max_abs();

    while hi > 0 {
        // locate the active unreduced block [lo, hi]
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            let reference = if diag == 0.0 { scale } else { diag };
            if sub <= f64::EPSILON * reference || sub < f64::MIN_POSITIVE {
                h[(lo, lo - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            since_deflation = 0;
            continue;
        }

        total += 1;
        since_deflation += 1;
        if total > budget {
            return Err(Error::NoConvergence {
                context: "Hessenberg QR iteration",
                residual: h[(hi, hi - 1)].norm(),
            });
        }

        let mu = if since_deflation.is_multiple_of(11) {
            // exceptional shift to break cycles
            h[(hi, hi)] + Complex64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };

        for k in lo..=hi {
            h[(k, k)] -= mu;
        }
        let mut rots = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..=hi {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = x * c + s * y;
                h[(k + 1, j)] = -s.conj() * x + y * c;
            }
            h[(k + 1, k)] = Complex64::new(0.0, 0.0);
            rots.push((c, s));
        }
        for (idx, &(c, s)) in rots.iter().enumerate() {
            let k = lo + idx;
            for i in lo..=(k + 1).min(hi) {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = x * c + y * s.conj();
                h[(i, k + 1)] = -x * s + y * c;
            }
        }
        for k in lo..=hi {
            h[(k, k)] += mu;
        }
    }
    Ok(h.diag())
}
