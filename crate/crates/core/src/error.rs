use num_complex::Complex64;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{context} did not converge (residual {residual:.3e})")]
    NoConvergence {
        context: &'static str,
        residual: f64,
    },

    #[error("B is numerically singular (condition estimate {cond:.3e}); reduction to a standard problem is ill-posed")]
    IllPosedReduction { cond: f64 },

    #[error("expected {expected} eigenvalues clustered at {lambda0}, found {found}")]
    ClusterMismatch {
        expected: usize,
        found: usize,
        lambda0: Complex64,
    },

    #[error("left and right eigenvectors are B-orthogonal (smallest normalization singular value {smallest:.3e}); the eigenvalue looks defective, use the structure provided by a pair builder")]
    DefectiveCluster { smallest: f64 },

    #[error("singular spectrum is degenerate: sigma_r / sigma_1 = {ratio:.3e}")]
    DegenerateSpectrum { ratio: f64 },

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("trial {index} failed: {source}")]
    TrialFailed {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// The innermost error, looking through trial wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::TrialFailed { source, .. } => source.root(),
            other => other,
        }
    }
}
