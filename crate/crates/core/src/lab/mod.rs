//! Seeded random-perturbation experiments.
//!
//! Each trial draws `(E, F)` with `||E||_2 = 1`, `||F||_2 = tau`, solves the
//! perturbed pencil `(A + eps E, B + eps F)` and records the sorted distances
//! of the eigenvalues nearest `lambda0`, scaled by `eps^(1/n1)`. Trial `k`
//! draws from ChaCha stream `k + 1` of the experiment seed, so a report does
//! not depend on how trials are scheduled across workers.

mod report;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::condnum::{kappa_defective, kappa_hermitian, kappa_nonhermitian, sigma_spectrum, ConditionNumbers, SigmaSpectrum};
use crate::error::{Error, Result};
use crate::linalg::random::{gaussian_matrix_in, seeded_rng, Field, SeededRng};
use crate::linalg::{spectral_norm, DenseMatrix};
use crate::linalg::io::read_matrix;
use crate::pencil::{extract_cluster, EigenStructure, MatrixPair, NamedBuilder, CLUSTER_TOL};

pub use report::{format_sig, render_report, render_table2, render_table3, samples_to_csv, Digits, Table2Report};

/// Nondefective experiments default to this perturbation size.
pub const DEFAULT_EPS: f64 = 1e-5;
/// Defective experiments default to this perturbation size.
pub const DEFAULT_EPS_DEFECTIVE: f64 = 1e-6;
pub const DEFAULT_TRIALS: usize = 10_000;
/// Largest admissible perturbation size.
pub const MAX_EPS: f64 = 1e-2;
/// Minimum trial count for the table reproductions.
pub const MIN_TABLE_TRIALS: usize = 1_000;

/// Perturbation class for `(E, F)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Structure {
    Hermitian,
    General,
}

impl std::str::FromStr for Structure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hermitian" => Ok(Structure::Hermitian),
            "general" => Ok(Structure::General),
            other => Err(Error::invalid(format!(
                "unknown structure `{other}` (expected hermitian or general)"
            ))),
        }
    }
}

fn unit_norm_draw<R: Rng + ?Sized>(n: usize, structure: Structure, field: Field, rng: &mut R) -> Result<DenseMatrix> {
    let mut g = gaussian_matrix_in(field, n, n, rng);
    if structure == Structure::Hermitian {
        g = g.hermitian_part();
    }
    let norm = spectral_norm(&g)?;
    Ok(g.scale_real(norm.recip()))
}

/// `(E, F)` with Gaussian entries over `field` (`(G + G^H)/2` when
/// Hermitian), rescaled to `||E||_2 = 1` and `||F||_2 = tau`.
pub fn random_perturbation_with<R: Rng + ?Sized>(
    n: usize,
    structure: Structure,
    field: Field,
    tau: f64,
    rng: &mut R,
) -> Result<(DenseMatrix, DenseMatrix)> {
    if n == 0 {
        return Err(Error::invalid("perturbation size must be at least 1"));
    }
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(Error::invalid(format!("tau must be finite and nonnegative, got {tau}")));
    }
    let e = unit_norm_draw(n, structure, field, rng)?;
    let f = unit_norm_draw(n, structure, field, rng)?.scale_real(tau);
    Ok((e, f))
}

pub fn random_perturbation(
    n: usize,
    structure: Structure,
    field: Field,
    tau: f64,
    seed: u64,
) -> Result<(DenseMatrix, DenseMatrix)> {
    random_perturbation_with(n, structure, field, tau, &mut seeded_rng(seed))
}

/// Outcome of one perturbed solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSample {
    pub trial_index: usize,
    /// `|lambda_hat_i - lambda0| / eps^(1/n1)`, nonincreasing.
    pub deltas: Vec<f64>,
    /// Defective only: largest within-group spread of distances, scaled
    /// like `deltas`.
    pub splitting: Option<f64>,
}

fn is_exactly_hermitian(m: &DenseMatrix) -> bool {
    m.is_square() && *m == m.adjoint()
}

/// Solves `(A + eps E, B + eps F)` and measures the `n1 * r` eigenvalues
/// closest to `lambda0`.
///
/// For `n1 > 1` the distances are sorted and cut into `r` groups of `n1`
/// consecutive values; each group is represented by its largest distance.
pub fn run_trial(
    pair: &MatrixPair,
    es: &EigenStructure,
    e: &DenseMatrix,
    f: &DenseMatrix,
    eps: f64,
) -> Result<PerturbationSample> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::invalid(format!("epsilon must be positive, got {eps}")));
    }
    let n = pair.n();
    for (name, m) in [("E", e), ("F", f)] {
        if m.rows() != n || m.cols() != n {
            return Err(Error::invalid(format!("{name} must be {n}x{n}")));
        }
    }
    let count = es.n1 * es.r;
    if count > n {
        return Err(Error::invalid(format!(
            "cluster of {count} eigenvalues does not fit a {n}x{n} pair"
        )));
    }
    let hermitian = is_exactly_hermitian(e) && is_exactly_hermitian(f);
    let eigs = pair.perturbed(e, f, eps, hermitian).eigenvalues()?;

    let mut dist: Vec<f64> = eigs.iter().map(|z| (z - es.lambda0).norm()).collect();
    dist.sort_by(f64::total_cmp);
    dist.truncate(count);
    dist.reverse();

    let scale = if es.n1 == 1 { eps } else { eps.powf(1.0 / es.n1 as f64) };
    if es.n1 == 1 {
        return Ok(PerturbationSample {
            trial_index: 0,
            deltas: dist.iter().map(|d| d / scale).collect(),
            splitting: None,
        });
    }
    let mut deltas = Vec::with_capacity(es.r);
    let mut spread: f64 = 0.0;
    for group in dist.chunks_exact(es.n1) {
        deltas.push(group[0] / scale);
        spread = spread.max(group[0] - group[es.n1 - 1]);
    }
    Ok(PerturbationSample {
        trial_index: 0,
        deltas,
        splitting: Some(spread / scale),
    })
}

/// Where an experiment's pair comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PairSource {
    /// A named builder, drawn with the experiment seed.
    Builder { name: NamedBuilder },
    /// `A` and `B` in the matrix text format.
    Files {
        a: std::path::PathBuf,
        b: std::path::PathBuf,
        #[serde(default)]
        definite: bool,
    },
}

impl std::fmt::Display for PairSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PairSource::Builder { name } => write!(f, "{name}"),
            PairSource::Files { a, b, .. } => write!(f, "({}, {})", a.display(), b.display()),
        }
    }
}

impl From<NamedBuilder> for PairSource {
    fn from(name: NamedBuilder) -> Self {
        PairSource::Builder { name }
    }
}

impl PairSource {
    pub fn load(&self, seed: u64) -> Result<MatrixPair> {
        match self {
            PairSource::Builder { name } => Ok(name.build(seed)?.pair),
            PairSource::Files { a, b, definite } => MatrixPair::new(read_matrix(a)?, read_matrix(b)?, *definite),
        }
    }
}

/// Pair and eigenvector blocks for the cluster `(lambda0, r, n1)`.
///
/// A builder asked for its planted target returns the planted structure;
/// anything else is extracted from the pair, which needs `n1 = 1`.
pub fn resolve_cluster(
    source: &PairSource,
    seed: u64,
    lambda0: Complex64,
    r: usize,
    n1: usize,
) -> Result<(MatrixPair, EigenStructure)> {
    if let PairSource::Builder { name } = source {
        let (l, rr, nn) = name.target();
        if (lambda0 - l).norm() <= 1e-12 * (1.0 + l.norm()) && r == rr && n1 == nn {
            let built = name.build(seed)?;
            return Ok((built.pair, built.structure));
        }
    }
    if n1 != 1 {
        return Err(Error::invalid(
            "defective clusters (n1 > 1) need planted eigenvector blocks; use the matching pair builder",
        ));
    }
    let pair = source.load(seed)?;
    let es = extract_cluster(&pair, lambda0, r, CLUSTER_TOL)?;
    Ok((pair, es))
}

fn default_tau() -> f64 {
    1.0
}

/// Everything that determines an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub pair: PairSource,
    pub lambda0: Complex64,
    pub r: usize,
    pub n1: usize,
    pub epsilon: f64,
    pub trials: usize,
    pub structure: Structure,
    #[serde(default = "default_tau")]
    pub tau: f64,
    /// Real or complex Gaussian draws for `(E, F)`.
    #[serde(default)]
    pub field: Field,
    pub seed: u64,
    /// Worker threads; 0 uses every available core. Does not affect results.
    #[serde(default)]
    pub workers: usize,
    /// Test hook: every trial uses `E = F = 0`.
    #[serde(default)]
    pub zero_perturbation: bool,
}

impl ExperimentConfig {
    /// Config for a named builder with its planted target, `tau = 1` and
    /// the default perturbation size for its defectiveness.
    pub fn for_builder(builder: NamedBuilder, structure: Structure, trials: usize, seed: u64) -> Self {
        let (lambda0, r, n1) = builder.target();
        Self {
            pair: builder.into(),
            lambda0,
            r,
            n1,
            epsilon: if n1 > 1 { DEFAULT_EPS_DEFECTIVE } else { DEFAULT_EPS },
            trials,
            structure,
            tau: 1.0,
            field: Field::Real,
            seed,
            workers: 0,
            zero_perturbation: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon <= MAX_EPS) {
            return Err(Error::invalid(format!(
                "epsilon must lie in (0, {MAX_EPS:e}], got {:e}",
                self.epsilon
            )));
        }
        if self.trials == 0 {
            return Err(Error::invalid("need at least one trial"));
        }
        if !(self.tau.is_finite() && self.tau >= 0.0) {
            return Err(Error::invalid(format!("tau must be finite and nonnegative, got {}", self.tau)));
        }
        if self.r == 0 || self.n1 == 0 {
            return Err(Error::invalid("multiplicity and Jordan size must be at least 1"));
        }
        if !self.lambda0.is_finite() {
            return Err(Error::invalid("lambda0 must be finite"));
        }
        Ok(())
    }
}

/// Aggregated statistics of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub sigmas: SigmaSpectrum,
    pub kappas: ConditionNumbers,
    pub avg: Vec<f64>,
    pub max: Vec<f64>,
    /// Defective only: maximum over trials of the within-group spread.
    pub splitting: Option<f64>,
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Condition numbers matching a perturbation class on a given pair.
pub fn matching_kappas(
    pair: &MatrixPair,
    es: &EigenStructure,
    structure: Structure,
    tau: f64,
) -> Result<(SigmaSpectrum, ConditionNumbers)> {
    let s = sigma_spectrum(&es.x1, &es.y1)?;
    let k = if es.n1 > 1 {
        kappa_defective(&s, es.lambda0, tau, es.n1)
    } else if structure == Structure::Hermitian && pair.is_hermitian_definite() {
        kappa_hermitian(&s, es.lambda0, tau)
    } else {
        kappa_nonhermitian(&s, es.lambda0, tau)
    };
    Ok((s, k))
}

fn trial_rng(seed: u64, trial_index: usize) -> SeededRng {
    let mut rng = seeded_rng(seed);
    // stream 0 is left to the pair builders
    rng.set_stream(trial_index as u64 + 1);
    rng
}

/// Runs the experiment and also returns every per-trial sample, in trial
/// order.
pub fn run_experiment_with_samples(config: &ExperimentConfig) -> Result<(ExperimentReport, Vec<PerturbationSample>)> {
    config.validate()?;
    let (pair, es) = resolve_cluster(&config.pair, config.seed, config.lambda0, config.r, config.n1)?;
    let (sigmas, kappas) = matching_kappas(&pair, &es, config.structure, config.tau)?;
    let n = pair.n();

    let one_trial = |k: usize| -> Result<PerturbationSample> {
        let (e, f) = if config.zero_perturbation {
            (DenseMatrix::zeros(n, n), DenseMatrix::zeros(n, n))
        } else {
            random_perturbation_with(n, config.structure, config.field, config.tau, &mut trial_rng(config.seed, k))?
        };
        let mut sample = run_trial(&pair, &es, &e, &f, config.epsilon).map_err(|err| Error::TrialFailed {
            index: k,
            source: Box::new(err),
        })?;
        sample.trial_index = k;
        Ok(sample)
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    let results: Vec<Result<PerturbationSample>> =
        pool.install(|| (0..config.trials).into_par_iter().map(one_trial).collect());
    let samples: Vec<PerturbationSample> = results.into_iter().collect::<Result<_>>()?;

    let r = es.r;
    let mut sum = vec![0.0; r];
    let mut max = vec![0.0f64; r];
    let mut splitting: Option<f64> = None;
    for s in &samples {
        for i in 0..r {
            sum[i] += s.deltas[i];
            max[i] = max[i].max(s.deltas[i]);
        }
        if let Some(sp) = s.splitting {
            splitting = Some(splitting.map_or(sp, |m: f64| m.max(sp)));
        }
    }
    let avg = sum.iter().map(|s| s / config.trials as f64).collect();
    let report = ExperimentReport {
        config: config.clone(),
        sigmas,
        kappas,
        avg,
        max,
        splitting,
    };
    Ok((report, samples))
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    Ok(run_experiment_with_samples(config)?.0)
}

pub const TABLE2_LABELS: [&str; 3] = ["Her + Her", "Her + NonHer", "NonHer + NonHer"];

/// The three nondefective configurations: Hermitian pair with Hermitian and
/// with general `(E, F)`, then the matched non-Hermitian pair with general
/// `(E, F)`. `lambda0 = 1`, `tau = 1`, `eps = 1e-5`.
pub fn table2_configs(trials: usize, seed: u64, workers: usize) -> [ExperimentConfig; 3] {
    let mk = |b, s| ExperimentConfig {
        workers,
        ..ExperimentConfig::for_builder(b, s, trials, seed)
    };
    [
        mk(NamedBuilder::Example2Hermitian, Structure::Hermitian),
        mk(NamedBuilder::Example2Hermitian, Structure::General),
        mk(NamedBuilder::Example2Nonhermitian, Structure::General),
    ]
}

/// Defective pair with three 2x2 Jordan blocks, `eps = 1e-6`, `tau = 1`.
pub fn table3_config(trials: usize, seed: u64, workers: usize, structure: Structure) -> ExperimentConfig {
    ExperimentConfig {
        workers,
        ..ExperimentConfig::for_builder(NamedBuilder::Defective2x3, structure, trials, seed)
    }
}

fn check_table_trials(trials: usize) -> Result<()> {
    if trials < MIN_TABLE_TRIALS {
        return Err(Error::invalid(format!(
            "table reproductions need at least {MIN_TABLE_TRIALS} trials, got {trials}"
        )));
    }
    Ok(())
}

pub fn reproduce_table2(trials: usize, seed: u64, workers: usize) -> Result<Table2Report> {
    check_table_trials(trials)?;
    let [a, b, c] = table2_configs(trials, seed, workers);
    Ok(Table2Report {
        cases: [run_experiment(&a)?, run_experiment(&b)?, run_experiment(&c)?],
    })
}

pub fn reproduce_table3(trials: usize, seed: u64, workers: usize) -> Result<ExperimentReport> {
    check_table_trials(trials)?;
    run_experiment(&table3_config(trials, seed, workers, Structure::General))
}
