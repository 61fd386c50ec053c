//! Error type shared by all modules of the crate.

use std::fmt;
use std::io;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors reported by matrix kernels, the solver pipeline and I/O.
#[derive(Debug)]
pub enum Error {
    /// Operand shapes do not conform (e.g. matmul with A.cols != B.rows).
    Shape { context: String },
    /// A constructor was given a NaN or infinite entry.
    NonFinite { row: usize, col: usize },
    /// A matrix or vector with zero rows/columns/length was requested.
    Empty,
    /// Gram-Schmidt found a numerically dependent column.
    RankDeficient { column: usize },
    /// Gram-Schmidt broke down inside the subspace iteration.
    SubspaceBreakdown { iteration: usize, column: usize },
    /// An entry overflowed to infinity while forming the gain matrix.
    Overflow { context: String },
    /// A matrix expected to have orthonormal columns does not.
    NotOrthonormal { max_deviation: f64 },
    /// A matrix expected to be symmetric is not.
    NotSymmetric { max_deviation: f64 },
    /// Orthogonality loss produced a significantly negative Rayleigh value.
    BrokenOrthogonality { index: usize, value: f64 },
    /// Invalid solver or operation parameters.
    Config { message: String },
    /// A column has (numerically) zero variance and cannot be standardized.
    DegenerateColumn { column: usize },
    /// Gradient descent diverged (objective grew for ten consecutive epochs).
    Diverged { epoch: usize },
    /// All singular values are zero; the reconstruction rate is undefined.
    ZeroSpectrum,
    /// The Jacobi eigensolver exhausted its sweep budget.
    NoConvergence { sweeps: usize },
    /// A text file could not be parsed as a matrix.
    Parse { path: String, line: usize, message: String },
    /// A file has an unsupported or malformed format header.
    Format { path: String, message: String },
    /// An underlying I/O failure, annotated with the path involved.
    Io { path: String, source: io::Error },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Shape { context } => write!(f, "shape mismatch: {context}"),
            Error::NonFinite { row, col } => {
                write!(f, "non-finite entry at ({row}, {col})")
            }
            Error::Empty => write!(f, "matrices and vectors must have at least one entry"),
            Error::RankDeficient { column } => {
                write!(f, "column {column} is numerically dependent on earlier columns")
            }
            Error::SubspaceBreakdown { iteration, column } => write!(
                f,
                "orthogonalization broke down at iteration {iteration} (column {column}); \
                 this indicates a numeric failure since the gain matrix is full rank"
            ),
            Error::Overflow { context } => write!(
                f,
                "numeric overflow while {context}; retry with prescale enabled"
            ),
            Error::NotOrthonormal { max_deviation } => write!(
                f,
                "matrix is not column-orthonormal (max deviation {max_deviation:.3e})"
            ),
            Error::NotSymmetric { max_deviation } => write!(
                f,
                "matrix is not symmetric (max deviation {max_deviation:.3e})"
            ),
            Error::BrokenOrthogonality { index, value } => write!(
                f,
                "diagonal entry {index} is {value:.3e} < 0; projection lost orthogonality"
            ),
            Error::Config { message } => write!(f, "invalid configuration: {message}"),
            Error::DegenerateColumn { column } => {
                write!(f, "column {column} has zero variance")
            }
            Error::Diverged { epoch } => write!(
                f,
                "objective increased for 10 consecutive epochs (epoch {epoch}); \
                 use a smaller step"
            ),
            Error::ZeroSpectrum => {
                write!(f, "all singular values are zero; reconstruction rate undefined")
            }
            Error::NoConvergence { sweeps } => {
                write!(f, "Jacobi sweeps exhausted ({sweeps}) without convergence")
            }
            Error::Parse { path, line, message } => {
                write!(f, "{path}:{line}: {message}")
            }
            Error::Format { path, message } => write!(f, "{path}: {message}"),
            Error::Io { path, source } => write!(f, "{path}: {source}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io { source, .. } => Some(source),
            _ => None,
        }
    }
}
