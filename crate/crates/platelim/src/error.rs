//! Crate-wide error type.
//!
//! Every fallible operation returns [`Result`]. Messages carry stable,
//! kebab-case tags (`bad-partition`, `out-of-thickness`, ...) so callers and
//! scripts can match on them without depending on exact wording.

/// Errors produced by validation, assembly, and solvers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A Voigt matrix fed to [`crate::tensor::ElasticForm`] is not symmetric.
    #[error("non-symmetric-form: Voigt matrix asymmetry {defect:.3e} exceeds tolerance")]
    NotSymmetric { defect: f64 },

    /// A Voigt matrix has a negative eigenvalue beyond round-off.
    #[error("indefinite-form: smallest Voigt eigenvalue {min_eig:.3e} is negative")]
    Indefinite { min_eig: f64 },

    /// Layer thickness fractions do not partition the unit thickness.
    #[error("bad-partition: {layers} layer fractions sum to {sum} (expected 1)")]
    BadPartition { sum: f64, layers: usize },

    /// A layer stiffness is positive semidefinite but not definite.
    #[error("non-coercive-layer: layer {index} stiffness has min eigenvalue {min_eig:.3e}")]
    NonCoerciveLayer { index: usize, min_eig: f64 },

    /// Thickness coordinate outside the plate.
    #[error("out-of-thickness: t = {t} lies outside [-1/2, 1/2]")]
    OutOfThickness { t: f64 },

    /// The out-of-plane stiffness block could not be factorised.
    #[error("relaxation-singular: out-of-plane stiffness block is numerically singular")]
    RelaxationSingular,

    /// A regime parameter is out of range (theta <= 0, alpha outside its window, ...).
    #[error("invalid-regime: {0}")]
    InvalidRegime(String),

    /// Grid construction or field/grid mismatch.
    #[error("grid: {0}")]
    Grid(String),

    /// Field data is malformed (wrong length, non-finite entries, bad CSV).
    #[error("fields: {0}")]
    Fields(String),

    /// The minimiser left the representable range or the line search collapsed.
    #[error("diverged: {0}")]
    Diverged(String),

    /// A recovery construction was requested outside its supported class.
    #[error("recovery-unsupported: {0}")]
    RecoveryUnsupported(String),

    /// Non-finite integrand while evaluating the scaled 3D energy.
    #[error("energy-overflow: non-finite integrand at (x, y, t) = ({x:.4}, {y:.4}, {t:.4})")]
    EnergyOverflow { x: f64, y: f64, t: f64 },

    /// Configuration parsing or validation failure.
    #[error("config: {0}")]
    Config(String),

    /// I/O failure, annotated with the offending path.
    #[error("io: {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io { path: path.as_ref().display().to_string(), source }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
