//! Condition numbers of a multiple eigenvalue.
//!
//! With `X1 Y1^H = U Sigma V^H` (thin SVD, `sigma_1 >= ... >= sigma_r > 0`)
//! the first-order displacements of the `r` eigenvalues emanating from
//! `lambda0` are the eigenvalues of `Y1^H (E - lambda0 F) X1`, which share
//! their nonzero spectrum with `Sigma V^H (E - lambda0 F) U`. The suprema of
//! their sorted magnitudes over `||E|| <= 1`, `||F|| <= tau` are
//!
//! * Hermitian `E`, `F` on a definite pair:
//!   `(1 + tau |lambda0|) min_{j <= i} sqrt(sigma_j sigma_{i-j+1})`
//! * general `E`, `F`: `(1 + tau |lambda0|) (sigma_1 ... sigma_i)^(1/i)`
//! * `n1 x n1` Jordan blocks: the general value raised to `1/n1`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{general_eig, herm_eig, qr_thin, svd, DenseMatrix};
use crate::pencil::EigenStructure;

/// `sigma_r / sigma_1` at or below which the spectrum counts as rank
/// deficient.
pub const DEGENERATE_RATIO: f64 = 1e-14;

/// Positive singular values `sigma_1 >= ... >= sigma_r > 0` of `X1 Y1^H`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SigmaSpectrum(Vec<f64>);

impl SigmaSpectrum {
    pub fn new(sigmas: Vec<f64>) -> Result<Self> {
        if sigmas.is_empty() {
            return Err(Error::invalid("empty singular spectrum"));
        }
        if sigmas.iter().any(|s| !s.is_finite() || *s < 0.0) {
            return Err(Error::invalid("singular values must be finite and nonnegative"));
        }
        if sigmas.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::invalid("singular values must be nonincreasing"));
        }
        let ratio = sigmas[sigmas.len() - 1] / sigmas[0];
        if !(ratio > DEGENERATE_RATIO) {
            return Err(Error::DegenerateSpectrum { ratio });
        }
        Ok(Self(sigmas))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.0.iter().map(|s| s * c).collect())
    }
}

impl TryFrom<Vec<f64>> for SigmaSpectrum {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SigmaSpectrum> for Vec<f64> {
    fn from(s: SigmaSpectrum) -> Self {
        s.0
    }
}

/// Which perturbation class the condition numbers refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Regime {
    HermitianStructured,
    General,
    Defective { n1: usize },
}

/// `kappa_1 >= ... >= kappa_r`, full precision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionNumbers {
    pub kappas: Vec<f64>,
    pub regime: Regime,
    pub tau: f64,
    pub lambda0: Complex64,
}

/// Singular values of `X1 Y1^H`.
///
/// Computed as the singular values of the `r x r` product `Rx Ry^H` of the
/// triangular factors of `X1 = Qx Rx`, `Y1 = Qy Ry`.
pub fn sigma_spectrum(x1: &DenseMatrix, y1: &DenseMatrix) -> Result<SigmaSpectrum> {
    if x1.rows() != y1.rows() || x1.cols() != y1.cols() || x1.cols() > x1.rows() {
        return Err(Error::invalid(format!(
            "X1 and Y1 must both be n x r with r <= n, got {}x{} and {}x{}",
            x1.rows(),
            x1.cols(),
            y1.rows(),
            y1.cols()
        )));
    }
    let (_, rx) = qr_thin(x1)?;
    let (_, ry) = qr_thin(y1)?;
    let s = svd(&(&rx * &ry.adjoint()))?;
    SigmaSpectrum::new(s.sigmas)
}

fn scale_factor(lambda0: Complex64, tau: f64) -> f64 {
    1.0 + tau * lambda0.norm()
}

fn check_tau(tau: f64) {
    assert!(tau.is_finite() && tau >= 0.0, "tau must be finite and nonnegative, got {tau}");
}

/// Structured condition numbers for Hermitian perturbations of a
/// Hermitian-definite pair.
pub fn kappa_hermitian(s: &SigmaSpectrum, lambda0: Complex64, tau: f64) -> ConditionNumbers {
    check_tau(tau);
    let sig = s.as_slice();
    let c = scale_factor(lambda0, tau);
    let kappas = (0..sig.len())
        .map(|i| {
            let m = (0..=i).map(|j| sig[j] * sig[i - j]).fold(f64::INFINITY, f64::min);
            c * m.sqrt()
        })
        .collect();
    ConditionNumbers {
        kappas,
        regime: Regime::HermitianStructured,
        tau,
        lambda0,
    }
}

/// Geometric means `(sigma_1 ... sigma_i)^(1/i)` through running log sums.
fn running_geometric_means(sig: &[f64]) -> Vec<f64> {
    let mut log_sum = 0.0;
    let mut out: Vec<f64> = Vec::with_capacity(sig.len());
    for (k, &s) in sig.iter().enumerate() {
        log_sum += s.ln();
        let g = (log_sum / (k + 1) as f64).exp();
        // the exact sequence is nonincreasing; keep rounding from breaking that
        let g = out.last().map_or(g, |&prev| g.min(prev));
        out.push(g);
    }
    if let Some(first) = out.first_mut() {
        *first = sig[0];
    }
    out
}

/// Condition numbers under general (non-Hermitian) perturbations.
pub fn kappa_nonhermitian(s: &SigmaSpectrum, lambda0: Complex64, tau: f64) -> ConditionNumbers {
    check_tau(tau);
    let c = scale_factor(lambda0, tau);
    ConditionNumbers {
        kappas: running_geometric_means(s.as_slice()).into_iter().map(|g| c * g).collect(),
        regime: Regime::General,
        tau,
        lambda0,
    }
}

/// Condition numbers with exponent `1/n1` for `r` Jordan blocks of size
/// `n1`; `n1 = 1` gives [`kappa_nonhermitian`].
pub fn kappa_defective(s: &SigmaSpectrum, lambda0: Complex64, tau: f64, n1: usize) -> ConditionNumbers {
    assert!(n1 >= 1, "Jordan block size must be at least 1");
    let mut k = kappa_nonhermitian(s, lambda0, tau);
    if n1 > 1 {
        let p = 1.0 / n1 as f64;
        for x in &mut k.kappas {
            *x = x.powf(p);
        }
        k.regime = Regime::Defective { n1 };
    }
    k
}

/// Eigenvalues of `Y1^H (E - lambda0 F) X1`, descending magnitude.
pub fn first_order_eigs(es: &EigenStructure, e: &DenseMatrix, f: &DenseMatrix) -> Result<Vec<Complex64>> {
    let n = es.x1.rows();
    for (name, m) in [("E", e), ("F", f)] {
        if m.rows() != n || m.cols() != n {
            return Err(Error::invalid(format!("{name} must be {n}x{n}")));
        }
    }
    let g = e - &f.scale(es.lambda0);
    let inner = &(&es.y1.adjoint() * &g) * &es.x1;
    general_eig(&inner)
}

fn check_index(i: usize, r: usize) -> Result<()> {
    if i == 0 || i > r {
        return Err(Error::IndexOutOfRange { index: i, max: r });
    }
    Ok(())
}

/// `F = -tau |lambda0| / lambda0 E`, so that `E - lambda0 F = (1 + tau |lambda0|) E`.
fn companion_f(e: &DenseMatrix, lambda0: Complex64, tau: f64) -> DenseMatrix {
    if lambda0.norm() == 0.0 || tau == 0.0 {
        return DenseMatrix::zeros(e.rows(), e.cols());
    }
    if lambda0.im == 0.0 {
        // keeps F exactly Hermitian when E is
        return e.scale_real(-tau * lambda0.re.signum());
    }
    e.scale(-(lambda0.norm() / lambda0) * tau)
}

/// Hermitian `(E, F)` with `||E|| = 1`, `||F|| = tau` whose i-th first-order
/// eigenvalue magnitude equals the i-th structured condition number
/// (`i` is 1-based).
///
/// The inner `r x r` perturbation is the `i x i` antidiagonal (exchange)
/// matrix padded with zeros, lifted through the eigenvectors of the
/// Hermitian positive semidefinite `X1 Y1^H`.
pub fn worst_case_hermitian(es: &EigenStructure, i: usize, tau: f64) -> Result<(DenseMatrix, DenseMatrix)> {
    check_index(i, es.r)?;
    check_tau(tau);
    if es.lambda0.im.abs() > 1e-12 * (1.0 + es.lambda0.norm()) {
        return Err(Error::invalid("Hermitian worst case needs a real eigenvalue"));
    }
    let p = &es.x1 * &es.y1.adjoint();
    let skew = (&p - &p.adjoint()).max_abs();
    if skew > 1e-10 * p.max_abs() {
        return Err(Error::invalid(
            "X1 Y1^H is not Hermitian; the structure does not come from a Hermitian-definite pair",
        ));
    }
    let (q, _) = herm_eig(&p)?;
    let r = es.r;
    let qr = q.block(0, 0, q.rows(), r);
    let mut h = DenseMatrix::zeros(r, r);
    for j in 0..i {
        h[(j, i - 1 - j)] = Complex64::new(1.0, 0.0);
    }
    let e = (&(&qr * &h) * &qr.adjoint()).hermitian_part();
    let lambda0 = Complex64::new(es.lambda0.re, 0.0);
    let f = companion_f(&e, lambda0, tau);
    Ok((e, f))
}

/// General `(E, F)` with `||E|| = 1`, `||F|| = tau` whose i-th first-order
/// eigenvalue magnitude equals the i-th general condition number
/// (`i` is 1-based).
///
/// With `X1 Y1^H = U Sigma V^H`, `E = V C U^H` where `C` is the cyclic shift
/// on the leading `i` coordinates. `Sigma C` then has `i` eigenvalues of
/// modulus `(sigma_1 ... sigma_i)^(1/i)`.
pub fn worst_case_nonhermitian(es: &EigenStructure, i: usize, tau: f64) -> Result<(DenseMatrix, DenseMatrix)> {
    check_index(i, es.r)?;
    check_tau(tau);
    let r = es.r;
    let s = svd(&(&es.x1 * &es.y1.adjoint()))?;
    let n = s.u.rows();
    let u = s.u.block(0, 0, n, r);
    let v = s.v.block(0, 0, n, r);
    let mut c = DenseMatrix::zeros(r, r);
    for k in 0..i {
        c[((k + 1) % i, k)] = Complex64::new(1.0, 0.0);
    }
    let e = &(&v * &c) * &u.adjoint();
    let f = companion_f(&e, es.lambda0, tau);
    Ok((e, f))
}
