use thiserror::Error;

/// Errors raised by the algebraic engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JetError {
    #[error("parity-inhomogeneous argument")]
    ParityInhomogeneous,

    #[error("velocity for bundle {bundle} has parity {found}, expected {expected}")]
    VelocityParity {
        bundle: String,
        expected: crate::Parity,
        found: crate::Parity,
    },

    #[error("velocity for bundle {bundle} depends on a base variable the bundle does not")]
    VelocityDependence { bundle: String },

    #[error("arity mismatch: expected {expected} components, got {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("bundle mismatch: expected {expected}, got {found}")]
    BundleMismatch { expected: String, found: String },

    #[error("operator is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("structure constants not antisymmetric at c^{k}_({i},{j})")]
    NotAntisymmetric { k: usize, i: usize, j: usize },

    #[error("no bracket available for anchor {0}")]
    UnresolvedBracket(String),

    #[error("expression is not bilinear in the bracket slots")]
    NotBilinear,
}

pub type Result<T, E = JetError> = std::result::Result<T, E>;
