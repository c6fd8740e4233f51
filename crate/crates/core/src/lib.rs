//! Spectral and ergodic analysis of the discrete Cesàro operator on weighted
//! sequence spaces of `c_0` type, at finite truncation scale.
//!
//! The operator maps a sequence to its running averages. On a Köthe echelon
//! space of order zero — sequences `x` with `a_n(i)·x_i → 0` for a graded
//! family of weights — its structure (continuity, compactness, invertibility,
//! point spectrum, resolvent, ergodic means) is governed by explicit
//! weight-ratio criteria. This crate evaluates all of those criteria on
//! finite windows with honest three-valued verdicts, computes the closed-form
//! resolvent and eigenvector formulas in under/overflow-safe arithmetic, and
//! cross-validates every closed form against an exact rational oracle.
//!
//! Modules:
//! - [`weights`]: built-in weight families and an expression DSL, all in log
//!   domain.
//! - [`xreal`]: extended-range reals backing the log-domain arithmetic.
//! - [`kernel`]: truncated vectors, triangular kernels, seminorms, the
//!   Cesàro operator and its relatives.
//! - [`trend`]: finite-evidence trend classification for asymptotic claims.
//! - [`criteria`]: the verdict engine for every weight-ratio criterion.
//! - [`spectral`]: resolvent rows, eigenvectors, spectral region assembly.
//! - [`ergodic`]: iterates, Cesàro means, the ergodic projection, and the
//!   closed-range check.
//! - [`oracle`]: exact rational brute force used to validate closed forms.
//! - [`report`]: machine-readable JSON report entries.

pub mod kernel;
pub mod weights;
pub mod xreal;

pub mod trend;

pub mod criteria;

pub mod spectral;

pub mod ergodic;

pub mod oracle;

pub mod report;

pub use kernel::{SequenceVector, TriangularKernel, TruncationWindow};
pub use weights::{BuiltinFamily, FamilySpec, WeightFamily};
