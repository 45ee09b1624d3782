use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension must be positive")]
    EmptyDimension,

    #[error("non-finite value in amplitudes or matrix entries")]
    NonFinite,

    #[error("operator is not Hermitian (max |H_ij - conj(H_ji)| = {max_deviation:e})")]
    NotHermitian { max_deviation: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    ConvergenceFailure { sweeps: usize, off_norm: f64 },

    #[error("cannot normalize a vector of norm {norm:e}")]
    ZeroVector { norm: f64 },

    #[error("state is not normalized (norm = {norm})")]
    NotNormalized { norm: f64 },

    #[error("hbar must be positive and finite, got {0}")]
    InvalidHbar(f64),

    #[error("energy variance radicand {radicand:e} is negative beyond roundoff")]
    NegativeVariance { radicand: f64 },

    #[error("energy variance is zero: the speed-limit bound is vacuous")]
    ZeroVariance,

    #[error("overlap <psi(t)|psi(0)> = {overlap:e} at t = {t}: reference section undefined")]
    OrthogonalOverlap { t: f64, overlap: f64 },

    #[error("adaptive quadrature exceeded depth {max_depth} on [{a}, {b}]")]
    DepthExceeded { max_depth: u32, a: f64, b: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("coupling kappa must be positive, got {0}")]
    NonPositiveKappa(f64),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("every branch falls below the norm threshold {norm_min:e}")]
    AllPrecluded { norm_min: f64 },
}
