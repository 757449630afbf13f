//! Numerical tolerances shared by the library and its test suites.

/// Largest allowed `|M_ij - conj(M_ji)|` for a matrix to count as Hermitian.
pub const HERMITIAN: f64 = 1e-10;

/// Largest allowed entry of `U†U - 1` for a matrix to count as unitary.
pub const UNITARY: f64 = 1e-10;

/// Smallest eigenvalue allowed (as `-PSD`) for a positive semidefinite matrix.
pub const PSD: f64 = 1e-10;

/// Largest allowed `|‖ψ‖ - 1|` for a normalized state.
pub const NORMALIZED: f64 = 1e-12;

/// Largest allowed `|x² + y² + z² - 1|` for a direction.
pub const UNIT_VECTOR: f64 = 1e-12;

/// Largest allowed entry of `P² - P` for a projector.
pub const PROJECTOR: f64 = 1e-10;

/// Eigenpair residual bound `‖Mv - λv‖`.
pub const EIG_RESIDUAL: f64 = 1e-9;

/// Smallest singular value accepted by the polar decomposition.
pub const SINGULAR: f64 = 1e-10;

/// Completeness and positivity bound for POVMs.
pub const POVM: f64 = 1e-10;

/// Default orthogonality tolerance for exactly constructed ray sets.
pub const ORTHOGONAL: f64 = 1e-9;

/// Two rays closer than this (up to sign) are duplicates.
pub const DUPLICATE_RAY: f64 = 1e-9;

/// Smallest eigenvalue gap accepted as non-degenerate.
pub const DEGENERACY: f64 = 1e-8;
