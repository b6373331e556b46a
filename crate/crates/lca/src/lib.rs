//! Critical-topology analysis of quantum ensemble control landscapes.
//!
//! The objective `J(U) = tr(UρU†θ)` on the unitary group `U(N)` — with a
//! fixed density matrix `ρ` and Hermitian observable `θ` — has its critical
//! set organized into finitely many connected submanifolds. Each one is
//! labelled by a contingency table: an r×s matrix of non-negative integers
//! whose row sums are the eigenvalue multiplicities of `ρ` and whose column
//! sums are those of `θ`. From the table alone this crate computes the
//! submanifold's dimension `D₀`, the positive/negative Hessian index pair
//! `(D₊, D₋)`, the landscape value `J`, and the critical-point type
//! (maximum, minimum, saddle, or flat), and it cross-checks every closed
//! form against brute-force permutation sweeps, numeric Hessian
//! signatures, and a gradient-ascent trap audit on `U(N)`.
//!
//! Module map:
//!
//! - [`spectra`]: eigenvalue spectra, clustering of raw diagonals, and
//!   degeneracy profiles (the margins that drive all combinatorics).
//! - [`tables`]: contingency-table enumeration, exact counting, and the
//!   permutation → table map.
//! - [`topology`]: per-table characteristics, landscape reports, and the
//!   special-case closed-form counts.
//! - [`linalg`]: dense complex matrices, Jacobi Hermitian eigensolver,
//!   unitary exponential, Haar sampling.
//! - [`oracle`]: independent verification — permutation-exhaustive table
//!   sets, numeric Hessian signatures, critical-point construction.
//! - [`flow`]: Riemannian gradient ascent on `U(N)` and the trap audit.
//! - [`cli`]: the `lca` command-line front end and its JSON reports.

pub mod cli;
pub mod error;
pub mod flow;
pub mod linalg;
pub mod oracle;
pub mod report;
pub mod spectra;
pub mod tables;
pub mod topology;

pub use error::{Error, Result};
pub use spectra::{DegeneracyProfile, Spectrum};
pub use tables::{ContingencyTable, Permutation};
pub use topology::{CriticalKind, LandscapeReport, SubmanifoldRecord};
