//! Exact equivariant intersection theory for the moduli space of degree-2
//! quasi-polarized K3 surfaces.
//!
//! The library reconstructs, over exact rational arithmetic, the presentation
//! of the rational Chow ring of that moduli space: the fourteen relations
//! among the generators `H`, `E`, `c2`, `c3`, the graded dimension table of
//! the quotient, the intersection pairing with its one-dimensional kernel in
//! degree 9, the Grothendieck-Riemann-Roch expressions of `c2`, `c3` in kappa
//! classes, and the compactly-supported Poincare series bookkeeping used to
//! cross-check the table.
//!
//! Everything is built from four layers:
//! * [`poly`] / [`series`] / [`matrix`]: graded sparse polynomials, truncated
//!   power series and fraction-free linear algebra over `BigRational`;
//! * [`bundle`] / [`tower`]: Chern/Segre calculus (duals, symmetric powers,
//!   filtrations, weighted variants) and pushforwards along towers of
//!   projective bundles, producing the relation polynomials;
//! * [`blowup`] / [`quotient`]: the weighted-blowup presentation with its
//!   exceptional corrections, and degreewise ideal spans / normal forms /
//!   pairing matrices for graded quotient rings;
//! * [`pipeline`] / [`kappa`] / [`appendix`]: the assembled presentation and
//!   its verification reports, plus the two independent side computations.
//!
//! No floating point is used anywhere; every comparison in the test suite and
//! in `verify` is exact structural equality.

pub mod appendix;
pub mod blowup;
pub mod bundle;
pub mod cli;
pub mod dsl;
pub mod fixtures;
pub mod kappa;
pub mod matrix;
pub mod pipeline;
pub mod poly;
pub mod quotient;
pub mod rational;
pub mod series;
pub mod tower;

pub use poly::{GradedPoly, Monomial, RingSignature};
pub use rational::Rat;

/// Errors surfaced by the library. Structural errors (the first group) map to
/// CLI exit code 3; mismatches against committed fixtures map to exit code 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Arithmetic was attempted between polynomials over different signatures.
    SignatureMismatch { left: String, right: String },
    /// A series or polynomial inverse was requested for a non-unit.
    NonUnit(String),
    /// An exponent vector does not match its signature length.
    MalformedExponent { expected: usize, got: usize },
    /// Division with a remainder where exact division was required.
    InexactDivision(String),
    /// A linear system had no solution where one was required.
    Unsolvable(String),
    /// Input text (polynomial, fixture, script) failed to parse.
    Parse(String),
    /// A fixture file is missing or malformed.
    Fixture(String),
    /// An internal invariant was violated (bug, not user error).
    Internal(String),
}

impl std::fmt::Display for Error {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Error::SignatureMismatch { left, right } => {
                write!(f, "signature mismatch: {left} vs {right}")
            }
            Error::NonUnit(what) => write!(f, "cannot invert non-unit: {what}"),
            Error::MalformedExponent { expected, got } => {
                write!(f, "exponent vector of length {got}, signature has {expected}")
            }
            Error::InexactDivision(what) => write!(f, "inexact division: {what}"),
            Error::Unsolvable(what) => write!(f, "no solution: {what}"),
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
            Error::Fixture(msg) => write!(f, "fixture error: {msg}"),
            Error::Internal(msg) => write!(f, "internal invariant violated: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
