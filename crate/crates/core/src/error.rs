//! Error taxonomy shared by every module in the crate.
//!
//! Numerical routines report *why* an input was rejected (shape, spectrum,
//! budget, hypothesis) rather than panicking; callers such as the CLI map
//! these variants onto exit codes.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong in the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An input contained NaN or infinite entries.
    #[error("input contains a non-finite entry")]
    NonFinite,

    /// A matrix handed to a Hermitian constructor was not Hermitian.
    #[error("matrix deviates from Hermitian symmetry by {deviation:.3e} (relative)")]
    NotHermitian { deviation: f64 },

    /// The iterative eigensolver did not converge.
    #[error("eigensolver failed to converge on a {dim}x{dim} matrix")]
    IterationFailure { dim: usize },

    /// A matrix required to be positive semidefinite was not.
    #[error(
        "matrix is not positive semidefinite (eigenvalue {min_eigenvalue:.6e} below tolerance)"
    )]
    NotPsd { min_eigenvalue: f64 },

    /// An operator norm exceeded the admissible range.
    #[error("operator norm {norm:.6e} exceeds the admissible bound {bound:.6e}")]
    NormTooLarge { norm: f64, bound: f64 },

    /// A matrix that must have zero diagonal did not.
    #[error("diagonal entry of magnitude {max_abs:.3e} exceeds the zero-diagonal tolerance")]
    NonzeroDiagonal { max_abs: f64 },

    /// Polynomials that must share a degree did not.
    #[error("degree mismatch: expected {expected}, got {got}")]
    DegreeMismatch { expected: usize, got: usize },

    /// A polynomial required to have positive leading coefficient did not.
    #[error("leading coefficient {leading:.6e} is not positive")]
    NonPositiveLeading { leading: f64 },

    /// Convex-combination weights were invalid.
    #[error("invalid convex weights: {detail}")]
    BadWeights { detail: String },

    /// A polynomial expected to be real-rooted had a root far from the real axis.
    #[error("polynomial is not real-rooted (largest imaginary part {max_imag:.6e} relative to root scale)")]
    NotRealRooted { max_imag: f64 },

    /// A multivariate coefficient grid would exceed the cell budget.
    #[error("coefficient grid would hold {cells} cells (budget {budget})")]
    GridTooLarge { cells: u128, budget: u64 },

    /// Matrix or vector dimensions disagree.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A variable index was out of range.
    #[error("variable index {index} out of range for {nvars} variables")]
    BadIndex { index: usize, nvars: usize },

    /// An evaluation point (or weight list) had the wrong length.
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    /// The subset enumeration behind a mixed characteristic polynomial is too large.
    #[error("subset enumeration would visit {subsets} subsets (budget {budget})")]
    TooManyVectors { subsets: u128, budget: u64 },

    /// The support of a product distribution is too large to enumerate.
    #[error("support enumeration would visit {support} outcomes (budget {budget})")]
    SupportTooLarge { support: u128, budget: u64 },

    /// A barrier evaluation point is not above the roots of the polynomial.
    #[error("point is not above the roots (witness value {witness:.6e})")]
    NotAboveRoots { witness: f64 },

    /// A denominator vanished (polynomial value or matrix singular at the point).
    #[error("denominator vanished at the evaluation point")]
    ZeroDenominator,

    /// Inputs violate the hypothesis of the certified bound being run.
    #[error("hypothesis violated: {detail}")]
    HypothesisViolated { detail: String },

    /// A vector system that must sum to (a multiple of) the identity does not.
    #[error("vector system is not isotropic: deviation {deviation:.6e} from the target identity multiple")]
    NotIsotropic { deviation: f64 },

    /// A vector system that must decompose the identity does not.
    #[error("vector system does not decompose the identity: deviation {deviation:.6e}")]
    NotDecomposition { deviation: f64 },

    /// An operation's stated precondition does not hold at the given input.
    #[error("precondition failed: {detail}")]
    PreconditionFailed { detail: String },

    /// A tree search exceeded its node budget.
    #[error("tree search visited {nodes} nodes (budget {budget})")]
    BudgetExceeded { nodes: u64, budget: u64 },

    /// A scalar parameter was outside its admissible range.
    #[error("bad parameter: {detail}")]
    BadParameters { detail: String },
}

impl Error {
    /// Convenience constructor for [`Error::BadParameters`].
    pub fn bad_params(detail: impl Into<String>) -> Self {
        Error::BadParameters {
            detail: detail.into(),
        }
    }
}
