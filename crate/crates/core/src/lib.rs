//! Variational Lie algebroids over jet spaces, computed exactly.
//!
//! Differential polynomials with rational coefficients over graded
//! (even/odd) jet variables, total differential operators, the brackets
//! they induce, and the homological fields `Q` whose nilpotency encodes the
//! algebroid axioms.

pub mod algebroid;
pub mod calculus;
pub mod error;
pub mod frontend;
pub mod homological;
pub mod jetcore;
pub mod operators;
pub mod report;

pub use algebroid::{AnchorKind, AnchorSpec, BiDiffOp, Sign};
pub use calculus::{euler, ev_apply, ev_commutator, linearization, total_derivative, EvolField};
pub use error::{JetError, Result};
pub use homological::{ClassicalAlgebroidSpec, QField};
pub use jetcore::{int, rat, Bundle, DiffPoly, JetVar, MultiIndex, Parity, Rational};
pub use operators::{ScalarOp, TotalDiffOp};
pub use report::{Value, VerificationReport};
