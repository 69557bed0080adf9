use thiserror::Error;

/// Errors raised by the engine.
///
/// Validation routines never return these for failed mathematical checks;
/// they report failures through [`crate::ValidationReport`] instead.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("rewrite rules with leading monomials {first} and {second} overlap; confluence was not asserted")]
    NonConfluentRules { first: String, second: String },

    #[error("no lex or graded-lex monomial order makes every rewrite rule decreasing")]
    UnorientableRules,

    #[error("generator index {index} out of range for {len} generators")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("operands belong to different presentations")]
    PresentationMismatch,

    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },

    #[error("degree {degree} outside the admissible range 0..={max}")]
    DegreeOutOfRange { degree: usize, max: usize },

    #[error("expected {expected} arguments, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("not a Poisson derivation: [pi, phi] = {0}")]
    NotPoissonDerivation(String),

    #[error("Lie derivative of the volume form is not a multiple of it; residue {0}")]
    DivisionInconsistent(String),

    #[error("twisting 1-form is not closed: d(omega) = {0}")]
    NotClosed(String),

    #[error("complex is not graded: {0}")]
    NotGraded(String),

    #[error("operation requires a free polynomial presentation")]
    NotFreePresentation,

    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),

    #[error("invalid Poisson structure: {0}")]
    InvalidPoisson(String),

    #[error("unknown identity suite `{0}`")]
    UnknownSuite(String),

    #[error("{line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
