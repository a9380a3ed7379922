//! Matrix pairs, the test-pair builders, and extraction of the normalized
//! eigenvector blocks `(X1, Y1)` of a multiple eigenvalue.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::random::{gaussian_matrix_in, haar_orthonormal_in, seeded_rng, Field};
use crate::linalg::{
    condition_estimate, generalized_eig, herm_eig, inverse, is_hermitian_definite, svd,
    DenseMatrix,
};

/// Default relative radius used to count the eigenvalues of a cluster.
pub const CLUSTER_TOL: f64 = 1e-8;

/// Largest condition estimate accepted for the random eigenvector bases.
pub const MAX_BASIS_CONDITION: f64 = 1e6;

/// Redraws allowed before a builder gives up on the conditioning cap.
pub const MAX_FILL_ATTEMPTS: usize = 100;

/// A square pencil `(A, B)`.
#[derive(Debug, Clone)]
pub struct MatrixPair {
    a: DenseMatrix,
    b: DenseMatrix,
    hermitian_definite: bool,
}

impl MatrixPair {
    /// Validates shapes; a pair flagged Hermitian-definite must actually be
    /// one.
    pub fn new(a: DenseMatrix, b: DenseMatrix, hermitian_definite: bool) -> Result<Self> {
        if !a.is_square() || !b.is_square() || a.rows() != b.rows() {
            return Err(Error::invalid(format!(
                "pair needs square matrices of equal size, got {}x{} and {}x{}",
                a.rows(),
                a.cols(),
                b.rows(),
                b.cols()
            )));
        }
        if hermitian_definite && !is_hermitian_definite(&a, &b)? {
            return Err(Error::invalid(
                "pair flagged Hermitian-definite but A, B are not Hermitian or B is not positive definite",
            ));
        }
        Ok(Self { a, b, hermitian_definite })
    }

    pub fn general(a: DenseMatrix, b: DenseMatrix) -> Result<Self> {
        Self::new(a, b, false)
    }

    pub fn a(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn b(&self) -> &DenseMatrix {
        &self.b
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn is_hermitian_definite(&self) -> bool {
        self.hermitian_definite
    }

    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        generalized_eig(&self.a, &self.b, self.hermitian_definite)
    }

    /// `(A + eps E, B + eps F)`. The definite flag survives only for a
    /// Hermitian perturbation; the eigensolver re-checks it anyway.
    pub fn perturbed(&self, e: &DenseMatrix, f: &DenseMatrix, eps: f64, hermitian_perturbation: bool) -> MatrixPair {
        MatrixPair {
            a: &self.a + &e.scale_real(eps),
            b: &self.b + &f.scale_real(eps),
            hermitian_definite: self.hermitian_definite && hermitian_perturbation,
        }
    }
}

/// Eigenvector blocks of a multiple eigenvalue `lambda0`.
///
/// Nondefective (`n1 == 1`): `Y1^H A X1 = lambda0 I` and `Y1^H B X1 = I`.
/// Defective (`n1 >= 2`): the columns of `X1`/`Y1` are the right/left
/// eigenvectors heading/closing each of the `r` Jordan chains.
#[derive(Debug, Clone)]
pub struct EigenStructure {
    pub lambda0: Complex64,
    pub r: usize,
    pub n1: usize,
    pub x1: DenseMatrix,
    pub y1: DenseMatrix,
}

impl EigenStructure {
    /// `(||Y1^H A X1 - lambda0 I||_2, ||Y1^H B X1 - I||_2)`. Only meaningful
    /// for `n1 = 1`: the eigenvectors of Jordan chains satisfy `Y1^H B X1 = 0`.
    pub fn normalization_residuals(&self, pair: &MatrixPair) -> Result<(f64, f64)> {
        let yh = self.y1.adjoint();
        let eye = DenseMatrix::identity(self.r);
        let ya = &(&yh * pair.a()) * &self.x1;
        let yb = &(&yh * pair.b()) * &self.x1;
        Ok((
            crate::linalg::spectral_norm(&(&ya - &eye.scale(self.lambda0)))?,
            crate::linalg::spectral_norm(&(&yb - &eye))?,
        ))
    }
}

/// `A = Y^-H core X^-1`, `B = Y^-H X^-1`, so that `Y^H A X = core` and
/// `Y^H B X = I`.
pub fn assemble_pair(x: &DenseMatrix, y: &DenseMatrix, core: &DenseMatrix) -> Result<MatrixPair> {
    let xinv = inverse(x)?;
    let yinv_h = inverse(y)?.adjoint();
    let b = &yinv_h * &xinv;
    let a = &(&yinv_h * core) * &xinv;
    MatrixPair::general(a, b)
}

/// `(W^H Lambda W, W^H W)`, flagged Hermitian-definite; its eigenvalues are
/// the entries of `lambda`.
pub fn construct_hermitian_pair(lambda: &[f64], w: &DenseMatrix) -> Result<MatrixPair> {
    if !w.is_square() || w.rows() != lambda.len() {
        return Err(Error::invalid(format!(
            "W must be {0}x{0} to match {0} eigenvalues",
            lambda.len()
        )));
    }
    if lambda.iter().any(|l| !l.is_finite()) {
        return Err(Error::invalid("eigenvalues must be finite"));
    }
    if condition_estimate(w)? > 1e12 {
        return Err(Error::invalid("W is singular"));
    }
    let wh = w.adjoint();
    let a = (&(&wh * &DenseMatrix::from_real_diag(lambda)) * w).hermitian_part();
    let b = (&wh * w).hermitian_part();
    MatrixPair::new(a, b, true)
}

fn check_sigmas(sigmas: &[f64]) -> Result<()> {
    if sigmas.is_empty() {
        return Err(Error::invalid("need at least one singular value"));
    }
    if sigmas.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
        return Err(Error::invalid("singular values must be finite and positive"));
    }
    if sigmas.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::invalid("singular values must be nonincreasing"));
    }
    Ok(())
}

fn check_z(z: &DenseMatrix, r: usize) -> Result<DenseMatrix> {
    if !z.is_square() || z.rows() != r {
        return Err(Error::invalid(format!("Z must be {r}x{r}")));
    }
    if condition_estimate(z)? > 1e12 {
        return Err(Error::invalid("Z is singular"));
    }
    inverse(z)
}

/// Draws `X`, `Y` with the prescribed eigenvector columns and Gaussian fill
/// until both meet the conditioning cap.
fn draw_bases<R: Rng + ?Sized>(
    n: usize,
    x_cols: &[usize],
    x1: &DenseMatrix,
    y_cols: &[usize],
    y1: &DenseMatrix,
    field: Field,
    rng: &mut R,
) -> Result<(DenseMatrix, DenseMatrix)> {
    let mut worst = f64::INFINITY;
    for _ in 0..MAX_FILL_ATTEMPTS {
        let mut x = gaussian_matrix_in(field, n, n, rng);
        let mut y = gaussian_matrix_in(field, n, n, rng);
        for (k, &c) in x_cols.iter().enumerate() {
            x.set_column(c, &x1.column(k));
        }
        for (k, &c) in y_cols.iter().enumerate() {
            y.set_column(c, &y1.column(k));
        }
        let cond = condition_estimate(&x)?.max(condition_estimate(&y)?);
        if cond <= MAX_BASIS_CONDITION {
            return Ok((x, y));
        }
        worst = worst.min(cond);
    }
    Err(Error::invalid(format!(
        "could not draw eigenvector bases under the conditioning cap {MAX_BASIS_CONDITION:e} \
         in {MAX_FILL_ATTEMPTS} attempts (best {worst:.3e})"
    )))
}

/// Non-Hermitian pair with a nondefective eigenvalue `lambda0` of
/// multiplicity `r = sigmas.len()`, simple eigenvalues `rest`, and
/// `sigma_i(X1 Y1^H) = sigmas`. `X1 = U Z^-1`, `Y1^H = Z Sigma V^H` with
/// Haar `U`, `V`; the remaining basis vectors are Gaussian. `field` picks
/// real or complex random draws.
pub fn construct_nonhermitian_pair(
    lambda0: Complex64,
    rest: &[Complex64],
    sigmas: &[f64],
    z: &DenseMatrix,
    field: Field,
    seed: u64,
) -> Result<(MatrixPair, EigenStructure)> {
    check_sigmas(sigmas)?;
    let r = sigmas.len();
    let zinv = check_z(z, r)?;
    if let Some(bad) = rest.iter().find(|&&mu| (mu - lambda0).norm() <= CLUSTER_TOL * (1.0 + lambda0.norm())) {
        return Err(Error::invalid(format!("lambda0 = {lambda0} coincides with remaining eigenvalue {bad}")));
    }
    if !lambda0.is_finite() || rest.iter().any(|z| !z.is_finite()) {
        return Err(Error::invalid("eigenvalues must be finite"));
    }
    let n = r + rest.len();
    let mut rng = seeded_rng(seed);
    let u = haar_orthonormal_in(field, n, r, &mut rng)?;
    let v = haar_orthonormal_in(field, n, r, &mut rng)?;
    let x1 = &u * &zinv;
    let y1 = &(&v * &DenseMatrix::from_real_diag(sigmas)) * &z.adjoint();

    let cols: Vec<usize> = (0..r).collect();
    let (x, y) = draw_bases(n, &cols, &x1, &cols, &y1, field, &mut rng)?;
    let mut core_diag = vec![lambda0; r];
    core_diag.extend_from_slice(rest);
    let pair = assemble_pair(&x, &y, &DenseMatrix::from_diag(&core_diag))?;
    Ok((
        pair,
        EigenStructure {
            lambda0,
            r,
            n1: 1,
            x1,
            y1,
        },
    ))
}

/// Defective pair with `r = sigmas.len()` Jordan blocks of size `n1` at
/// eigenvalue 1, followed by the simple eigenvalues `extra`. `Z = I`.
pub fn construct_defective_pair(
    sigmas: &[f64],
    n1: usize,
    extra: &[Complex64],
    field: Field,
    seed: u64,
) -> Result<(MatrixPair, EigenStructure)> {
    construct_defective_pair_with_z(sigmas, n1, extra, &DenseMatrix::identity(sigmas.len().max(1)), field, seed)
}

pub fn construct_defective_pair_with_z(
    sigmas: &[f64],
    n1: usize,
    extra: &[Complex64],
    z: &DenseMatrix,
    field: Field,
    seed: u64,
) -> Result<(MatrixPair, EigenStructure)> {
    check_sigmas(sigmas)?;
    if n1 < 2 {
        return Err(Error::invalid("a defective pair needs Jordan blocks of size n1 >= 2"));
    }
    let one = Complex64::new(1.0, 0.0);
    if extra.iter().any(|&mu| (mu - one).norm() <= CLUSTER_TOL * 2.0) {
        return Err(Error::invalid("extra eigenvalues must differ from the defective eigenvalue 1"));
    }
    let r = sigmas.len();
    let zinv = check_z(z, r)?;
    let n = n1 * r + extra.len();

    let mut core = DenseMatrix::zeros(n, n);
    for k in 0..n1 * r {
        core[(k, k)] = one;
        if k % n1 != n1 - 1 {
            core[(k, k + 1)] = one;
        }
    }
    for (k, &mu) in extra.iter().enumerate() {
        core[(n1 * r + k, n1 * r + k)] = mu;
    }

    let mut rng = seeded_rng(seed);
    let u = haar_orthonormal_in(field, n, r, &mut rng)?;
    let v = haar_orthonormal_in(field, n, r, &mut rng)?;
    let x1 = &u * &zinv;
    let y1 = &(&v * &DenseMatrix::from_real_diag(sigmas)) * &z.adjoint();
    // right eigenvectors head each chain, left eigenvectors close it
    let x_cols: Vec<usize> = (0..r).map(|k| k * n1).collect();
    let y_cols: Vec<usize> = (0..r).map(|k| k * n1 + n1 - 1).collect();
    let (x, y) = draw_bases(n, &x_cols, &x1, &y_cols, &y1, field, &mut rng)?;
    let pair = assemble_pair(&x, &y, &core)?;
    Ok((
        pair,
        EigenStructure {
            lambda0: one,
            r,
            n1,
            x1,
            y1,
        },
    ))
}

/// Right and left eigenvector blocks of the nondefective eigenvalue
/// `lambda0`, normalized so that `Y1^H B X1 = I`.
///
/// The blocks span the null spaces of `A - lambda0 B` and its adjoint. For a
/// Hermitian-definite pair `Y1 = X1` is made `B`-orthonormal.
pub fn extract_cluster(pair: &MatrixPair, lambda0: Complex64, r: usize, tol: f64) -> Result<EigenStructure> {
    let n = pair.n();
    if r == 0 || r > n {
        return Err(Error::invalid(format!("multiplicity must be in 1..={n}, got {r}")));
    }
    let eigs = pair.eigenvalues()?;
    let radius = tol * (1.0 + lambda0.norm());
    let found = eigs.iter().filter(|z| (**z - lambda0).norm() <= radius).count();
    if found != r {
        return Err(Error::ClusterMismatch {
            expected: r,
            found,
            lambda0,
        });
    }

    let shifted = pair.a() - &pair.b().scale(lambda0);
    let s = svd(&shifted)?;
    let null_cols: Vec<usize> = (n - r..n).collect();
    // a geometric multiplicity below r leaves a non-null direction in the block
    let null_sigma = s.sigmas[n - r];
    let scale = s.sigmas[0].max(crate::linalg::spectral_norm(pair.b())?);
    if null_sigma > 1e-8 * scale {
        return Err(Error::DefectiveCluster {
            smallest: null_sigma / scale,
        });
    }
    let x1 = s.v.select_columns(&null_cols);
    let b_norm = crate::linalg::spectral_norm(pair.b())?;

    if pair.is_hermitian_definite() {
        let nrm = (&(&x1.adjoint() * pair.b()) * &x1).hermitian_part();
        let (q, mu) = herm_eig(&nrm)?;
        let smallest = *mu.last().unwrap();
        if !(smallest > 1e-10 * b_norm) {
            return Err(Error::DefectiveCluster {
                smallest: smallest / b_norm,
            });
        }
        // X1 N^-1/2 (any square root works; this one keeps Q's basis)
        let inv_sqrt = DenseMatrix::from_real_diag(&mu.iter().map(|m| m.sqrt().recip()).collect::<Vec<_>>());
        let x1 = &(&x1 * &q) * &inv_sqrt;
        return Ok(EigenStructure {
            lambda0,
            r,
            n1: 1,
            y1: x1.clone(),
            x1,
        });
    }

    let y1 = s.u.select_columns(&null_cols);
    let nrm = &(&y1.adjoint() * pair.b()) * &x1;
    let smallest = *svd(&nrm)?.sigmas.last().unwrap();
    if !(smallest > 1e-10 * b_norm) {
        return Err(Error::DefectiveCluster {
            smallest: smallest / b_norm,
        });
    }
    let y1 = &y1 * &inverse(&nrm)?.adjoint();
    Ok(EigenStructure {
        lambda0,
        r,
        n1: 1,
        x1,
        y1,
    })
}

/// `(B, A)`: an infinite eigenvalue of `(A, B)` is a zero eigenvalue of the
/// swapped pair. The definite flag survives only if `A` is itself positive
/// definite.
pub fn swap_for_infinite(pair: &MatrixPair) -> Result<MatrixPair> {
    let flag = pair.is_hermitian_definite() && is_hermitian_definite(pair.b(), pair.a())?;
    Ok(MatrixPair {
        a: pair.b().clone(),
        b: pair.a().clone(),
        hermitian_definite: flag,
    })
}

/// `A = diag(2000, 2)`, `B = diag(1000, 1)`: double eigenvalue 2 with very
/// different sensitivities.
pub fn example1() -> MatrixPair {
    MatrixPair::new(
        DenseMatrix::from_real_diag(&[2000.0, 2.0]),
        DenseMatrix::from_real_diag(&[1000.0, 1.0]),
        true,
    )
    .expect("diagonal definite pair")
}

pub const EXAMPLE2_SIGMAS: [f64; 3] = [1.0, 0.25, 1e-4];

/// `(W^H Lambda W, W^H W)` with `Lambda = diag(1,1,1,2)`,
/// `W = diag(1,2,100,1)`.
pub fn example2_hermitian() -> MatrixPair {
    construct_hermitian_pair(&[1.0, 1.0, 1.0, 2.0], &DenseMatrix::from_real_diag(&[1.0, 2.0, 100.0, 1.0]))
        .expect("diagonal definite pair")
}

/// Real non-Hermitian 4x4 pair with triple eigenvalue 1, simple eigenvalue 2
/// and the same `sigma_i(X1 Y1^H)` as [`example2_hermitian`].
pub fn example2_nonhermitian(seed: u64) -> Result<(MatrixPair, EigenStructure)> {
    construct_nonhermitian_pair(
        Complex64::new(1.0, 0.0),
        &[Complex64::new(2.0, 0.0)],
        &EXAMPLE2_SIGMAS,
        &DenseMatrix::identity(3),
        Field::Real,
        seed,
    )
}

/// Real 7x7 pair with three 2x2 Jordan blocks at 1 and a simple eigenvalue 2.
pub fn defective_2x3(seed: u64) -> Result<(MatrixPair, EigenStructure)> {
    construct_defective_pair(&EXAMPLE2_SIGMAS, 2, &[Complex64::new(2.0, 0.0)], Field::Real, seed)
}

/// The named pair builders reachable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NamedBuilder {
    Example1,
    Example2Hermitian,
    Example2Nonhermitian,
    #[serde(rename = "defective-2x3")]
    Defective2x3,
}

/// A built pair together with the structure of its multiple eigenvalue.
#[derive(Debug, Clone)]
pub struct BuiltPair {
    pub pair: MatrixPair,
    pub structure: EigenStructure,
}

impl NamedBuilder {
    pub const ALL: [NamedBuilder; 4] = [
        NamedBuilder::Example1,
        NamedBuilder::Example2Hermitian,
        NamedBuilder::Example2Nonhermitian,
        NamedBuilder::Defective2x3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NamedBuilder::Example1 => "example1",
            NamedBuilder::Example2Hermitian => "example2-hermitian",
            NamedBuilder::Example2Nonhermitian => "example2-nonhermitian",
            NamedBuilder::Defective2x3 => "defective-2x3",
        }
    }

    /// `(lambda0, r, n1)` of the planted multiple eigenvalue.
    pub fn target(self) -> (Complex64, usize, usize) {
        match self {
            NamedBuilder::Example1 => (Complex64::new(2.0, 0.0), 2, 1),
            NamedBuilder::Example2Hermitian | NamedBuilder::Example2Nonhermitian => (Complex64::new(1.0, 0.0), 3, 1),
            NamedBuilder::Defective2x3 => (Complex64::new(1.0, 0.0), 3, 2),
        }
    }

    /// Builds the pair; `seed` only affects the random builders.
    pub fn build(self, seed: u64) -> Result<BuiltPair> {
        let (lambda0, r, _) = self.target();
        let (pair, structure) = match self {
            NamedBuilder::Example1 => {
                let pair = example1();
                let es = extract_cluster(&pair, lambda0, r, CLUSTER_TOL)?;
                (pair, es)
            }
            NamedBuilder::Example2Hermitian => {
                let pair = example2_hermitian();
                let es = extract_cluster(&pair, lambda0, r, CLUSTER_TOL)?;
                (pair, es)
            }
            NamedBuilder::Example2Nonhermitian => example2_nonhermitian(seed)?,
            NamedBuilder::Defective2x3 => defective_2x3(seed)?,
        };
        Ok(BuiltPair { pair, structure })
    }
}

impl fmt::Display for NamedBuilder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NamedBuilder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NamedBuilder::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| {
                Error::invalid(format!(
                    "unknown builder `{s}` (expected one of: {})",
                    NamedBuilder::ALL.map(|b| b.name()).join(", ")
                ))
            })
    }
}
