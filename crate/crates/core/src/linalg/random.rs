use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::factor::qr_thin;
use super::DenseMatrix;
use crate::error::{Error, Result};

/// The generator used for every seeded draw in the crate.
pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian: real and imaginary parts i.i.d. N(0, 1/2).
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Scalar field of random draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Field {
    /// Standard normal entries.
    #[default]
    Real,
    /// Standard complex normal entries.
    Complex,
}

impl std::str::FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "real" => Ok(Field::Real),
            "complex" => Ok(Field::Complex),
            other => Err(Error::invalid(format!("unknown field `{other}` (expected real or complex)"))),
        }
    }
}

/// Gaussian matrix over `field`.
pub fn gaussian_matrix_in<R: Rng + ?Sized>(field: Field, rows: usize, cols: usize, rng: &mut R) -> DenseMatrix {
    match field {
        Field::Real => DenseMatrix::from_fn(rows, cols, |_, _| Complex64::new(rng.sample(StandardNormal), 0.0)),
        Field::Complex => gaussian_matrix(rows, cols, rng),
    }
}

/// `n x k` matrix with orthonormal columns drawn from the Haar measure.
pub fn haar_orthonormal_with<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<DenseMatrix> {
    haar_orthonormal_in(Field::Complex, n, k, rng)
}

/// Haar-distributed orthonormal columns over `field` (orthogonal for real).
pub fn haar_orthonormal_in<R: Rng + ?Sized>(field: Field, n: usize, k: usize, rng: &mut R) -> Result<DenseMatrix> {
    if k == 0 || k > n {
        return Err(Error::invalid(format!("haar_orthonormal needs 1 <= k <= n, got n={n}, k={k}")));
    }
    // The phase-fixed R diagonal is what makes Q exactly Haar distributed.
    let (q, _) = qr_thin(&gaussian_matrix_in(field, n, k, rng))?;
    Ok(q)
}

pub fn haar_orthonormal(n: usize, k: usize, seed: u64) -> Result<DenseMatrix> {
    haar_orthonormal_with(n, k, &mut seeded_rng(seed))
}
