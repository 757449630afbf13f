use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (symmetry defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("matrix is singular (smallest singular value {smallest:.3e})")]
    Singular { smallest: f64 },

    #[error("vector is not a unit vector (norm {norm})")]
    NonUnitVector { norm: f64 },

    #[error("triad is left-handed (determinant {det:.6})")]
    LeftHandedTriad { det: f64 },

    #[error("operator is not a projector (defect {defect:.3e})")]
    NotProjector { defect: f64 },

    #[error("index {index} out of range (expected < {bound})")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("pointer register {0} is not a two-level register")]
    NotBinaryPointer(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("observable has a degenerate spectrum (eigenvalue gap {gap:.3e})")]
    DegenerateSpectrum { gap: f64 },

    #[error("coloring assigns {assigned} of {expected} rays")]
    IncompleteColoring { assigned: usize, expected: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}
