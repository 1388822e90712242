use thiserror::Error;

/// Errors raised by the workbench.
///
/// Failures that are *answers* (an identity that does not hold, a map that is
/// not a homomorphism, a point that is not coherent) are reported as verdicts,
/// never through this type.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unbound variable x{0}")]
    UnboundVariable(usize),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("operation `{op}` expects {expected} arguments, got {found}")]
    ArityMismatch {
        op: String,
        expected: usize,
        found: usize,
    },
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
    #[error("invalid signature: {0}")]
    InvalidSignature(String),
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("term syntax error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("partial map does not generate the source: {generated} of {size} elements reached")]
    NotGenerating { generated: usize, size: usize },
    #[error("partition is not a congruence: {0}")]
    NotCongruence(String),
    #[error("input is not in variety `{variety}`: {detail}")]
    NotInVariety { variety: String, detail: String },
    #[error("variety `{variety}` is not unit-closed: identity `{identity}` fails after adjoining a unit")]
    NotUnitClosed { variety: String, identity: String },
    #[error("not a filter: {0}")]
    NotFilter(String),
    #[error("invalid split point: {0}")]
    InvalidPoint(String),
    #[error("invalid point morphism: {0}")]
    InvalidMorphism(String),
    #[error("bound {requested} exceeds the configured ceiling {ceiling} for `{what}`")]
    BoundExceeded {
        what: String,
        requested: usize,
        ceiling: usize,
    },
    #[error("context `{0}` has no materializable closure")]
    ClosureUnavailable(String),
    #[error("context `{0}` has no registered coherence criterion")]
    NoCriterion(String),
    #[error("invalid context: {0}")]
    InvalidContext(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
