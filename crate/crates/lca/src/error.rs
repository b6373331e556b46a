//! Crate-wide error type.

use num_bigint::BigUint;
use thiserror::Error;

/// Errors produced by spectrum parsing, table combinatorics, matrix
/// algebra, and the verification oracles.
#[derive(Debug, Error)]
pub enum Error {
    /// Input eigenvalue data violated a `Spectrum` invariant.
    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    /// Greedy clustering produced representatives that are not strictly
    /// decreasing (possible with a pathological tolerance).
    #[error(
        "eigenvalue clusters overlap: representative {upper} does not stay strictly above {lower}"
    )]
    ClusterOverlap { upper: f64, lower: f64 },

    /// Splitting degenerate eigenvalues by `delta` would break the global
    /// strict ordering.
    #[error("perturbation too large: {0}")]
    PerturbationTooLarge(String),

    /// Row and column margins are inconsistent with each other or with the
    /// object they are applied to.
    #[error("margin mismatch: {0}")]
    MarginMismatch(String),

    /// Materializing the table set would exceed the enumeration budget.
    /// The exact count is still available through `count_tables`.
    #[error("enumeration budget exceeded: {count} tables, limit {limit}")]
    EnumerationBudgetExceeded { count: BigUint, limit: usize },

    /// The permutation sweep is capped; counting and enumeration still work
    /// above the cap.
    #[error("brute-force cap exceeded: N = {n} is above the N <= {cap} permutation sweep limit")]
    BruteForceCapExceeded { n: usize, cap: usize },

    /// A contingency table failed structural validation.
    #[error("invalid table: {0}")]
    InvalidTable(String),

    /// A permutation mapping is not a bijection on 0..N.
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("dimension mismatch: {0}x{0} vs {1}x{1}")]
    DimensionMismatch(usize, usize),

    #[error("matrix is not Hermitian (defect {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not unitary (defect {0:.3e})")]
    NotUnitary(f64),

    #[error("eigensolver did not converge: off-diagonal norm {0:.3e} after {1} sweeps")]
    EigenNoConvergence(f64, usize),

    /// A quantity the mathematics guarantees failed to hold; indicates a bug.
    #[error("internal invariant violation: {0}")]
    InternalInvariantViolation(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
