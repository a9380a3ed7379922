//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use multicond::linalg::random::{gaussian_matrix, seeded_rng, Field};
use multicond::pencil::{construct_hermitian_pair, construct_nonhermitian_pair, extract_cluster, CLUSTER_TOL};
use multicond::{Complex64, DenseMatrix, EigenStructure, MatrixPair, SigmaSpectrum};
use rand::Rng;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn random_matrix(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
    gaussian_matrix(rows, cols, &mut seeded_rng(seed))
}

/// Coefficients `c_0 .. c_n` of `det(z I - M) = sum c_k z^k` by the
/// Faddeev-LeVerrier recursion.
pub fn char_poly(m: &DenseMatrix) -> Vec<Complex64> {
    let n = m.rows();
    let mut coef = vec![Complex64::new(0.0, 0.0); n + 1];
    coef[n] = c(1.0);
    let mut mk = DenseMatrix::zeros(n, n);
    for k in 1..=n {
        let mut next = m * &mk;
        for i in 0..n {
            next[(i, i)] += coef[n - k + 1];
        }
        let am = m * &next;
        let trace: Complex64 = (0..n).map(|i| am[(i, i)]).sum();
        coef[n - k] = -trace / k as f64;
        mk = next;
    }
    coef
}

/// Roots of a monic polynomial by Durand-Kerner iteration.
pub fn poly_roots(coef: &[Complex64]) -> Vec<Complex64> {
    let n = coef.len() - 1;
    let bound = 1.0 + coef[..n].iter().map(|z| z.norm()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * bound * 0.5).collect();
    let eval = |z: Complex64| coef.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a);
    for _ in 0..2000 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let mut denom = c(1.0);
            for j in 0..n {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-15 * bound {
            break;
        }
    }
    roots
}

/// Smallest over all pairings of the largest distance between matched
/// entries.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    fn go(a: &[Complex64], b: &mut Vec<Complex64>, worst: f64, best: &mut f64) {
        if worst >= *best {
            return;
        }
        let Some((first, rest)) = a.split_first() else {
            *best = worst;
            return;
        };
        for k in 0..b.len() {
            let z = b.swap_remove(k);
            go(rest, b, worst.max((first - z).norm()), best);
            b.push(z);
            let last = b.len() - 1;
            b.swap(k, last);
        }
    }
    let mut best = f64::INFINITY;
    go(a, &mut b.to_vec(), 0.0, &mut best);
    best
}

/// Largest singular value by power iteration on `M^H M`.
pub fn power_norm(m: &DenseMatrix) -> f64 {
    let g = &m.adjoint() * m;
    let n = g.cols();
    let mut v = DenseMatrix::from_fn(n, 1, |i, _| Complex64::new(1.0 + i as f64 * 0.37, 0.5 - i as f64 * 0.11));
    let mut lambda = 0.0;
    for _ in 0..20_000 {
        let w = &g * &v;
        let norm = w.frobenius_norm();
        if norm == 0.0 {
            return 0.0;
        }
        let next = w.scale_real(1.0 / norm);
        let rq = (&(&next.adjoint() * &g) * &next)[(0, 0)].re;
        let done = (rq - lambda).abs() <= 1e-15 * rq;
        lambda = rq;
        v = next;
        if done {
            break;
        }
    }
    lambda.sqrt()
}

/// Singular values of `X1 Y1^H` straight from the `n x n` product.
pub fn direct_sigmas(x1: &DenseMatrix, y1: &DenseMatrix) -> Vec<f64> {
    let p = x1 * &y1.adjoint();
    let mut s = multicond::linalg::svd(&p).unwrap().sigmas;
    s.truncate(x1.cols());
    s
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Descending spectrum with log10 entries uniform in `[lo, hi)`.
pub fn spectrum_in(seed: u64, r: usize, lo: f64, hi: f64) -> SigmaSpectrum {
    let mut rng = seeded_rng(seed);
    let mut s: Vec<f64> = (0..r).map(|_| 10f64.powf(rng.random_range(lo..hi))).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    SigmaSpectrum::new(s).unwrap()
}

/// Random Hermitian definite pair with a planted eigenvalue of random multiplicity.
pub fn random_hermitian_pair(seed: u64) -> (MatrixPair, EigenStructure) {
    let mut rng = seeded_rng(seed);
    let n = rng.random_range(2..=6);
    let r = rng.random_range(1..=n);
    let lambda0: f64 = rng.random_range(-3.0..3.0);
    let mut lambda = vec![lambda0; r];
    lambda.extend((r..n).map(|k| lambda0 + 0.5 + k as f64));
    let w = &random_matrix(n, n, seed) + &DenseMatrix::identity(n).scale_real(rng.random_range(0.5..3.0));
    let pair = construct_hermitian_pair(&lambda, &w).unwrap();
    let es = extract_cluster(&pair, c(lambda0), r, CLUSTER_TOL).unwrap();
    (pair, es)
}

/// Random non-Hermitian pair with a planted complex eigenvalue of multiplicity up to 4.
pub fn random_nonhermitian_pair(seed: u64) -> (MatrixPair, EigenStructure) {
    let mut rng = seeded_rng(seed);
    let r = rng.random_range(1..=4);
    let lambda0 = Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
    // Y carries the sigma-scaled columns, so its conditioning caps sigma_1 / sigma_r
    let s = spectrum_in(seed, r, -3.0, 1.0);
    let z = &random_matrix(r, r, seed) + &DenseMatrix::identity(r).scale_real(2.0);
    construct_nonhermitian_pair(lambda0, &[lambda0 + 3.0], s.as_slice(), &z, Field::Complex, seed).unwrap()
}
