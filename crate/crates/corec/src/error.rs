//! Error types for the kernel, the runtime, and the surface pipeline.

use crate::base::{OpId, Span};
use thiserror::Error;

/// Errors from the shape/content kernel.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum KernelError {
    #[error("container structure does not match functor description ({side})")]
    DescMismatch { side: &'static str },
}

/// Errors surfaced while forcing lazy codata values.
#[derive(Debug, Clone, Error)]
pub enum RtError {
    #[error("unknown operation {0:?}")]
    UnknownOp(OpId),
    #[error("fuel exhausted in {function} at carrier {carrier} after {fuel_used} steps")]
    FuelExhausted {
        function: String,
        carrier: String,
        fuel_used: u64,
    },
    #[error("selector {selector} applied to a value built by a different constructor")]
    SelectorMismatch { selector: String },
    #[error("value observed its own pending layer; the definition is not productive")]
    CyclicForce,
    #[error("session backing this value was dropped")]
    SessionClosed,
    #[error("arity mismatch calling {name}: expected {expected}, got {got}")]
    Arity {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("{0}")]
    Internal(String),
}

/// Parse-time failure with position and expectation set.
#[derive(Debug, Clone, Error)]
#[error("syntax error at {line}:{col}: expected {}, found {found}", expected.join(" | "))]
pub struct SyntaxError {
    pub line: usize,
    pub col: usize,
    pub expected: Vec<String>,
    pub found: String,
    pub span: Span,
}

/// Name-resolution and sorting failures.
#[derive(Debug, Clone, Error)]
pub enum ResolveError {
    #[error("unbound name `{name}` at {line}:{col}")]
    UnboundName {
        name: String,
        line: usize,
        col: usize,
        span: Span,
    },
    #[error("sort mismatch at {line}:{col}: expected {expected}, found {found}")]
    SortMismatch {
        expected: String,
        found: String,
        line: usize,
        col: usize,
        span: Span,
    },
    #[error("duplicate declaration of `{name}` at {line}:{col}")]
    Duplicate {
        name: String,
        line: usize,
        col: usize,
        span: Span,
    },
    #[error("malformed declaration at {line}:{col}: {msg}")]
    BadDecl {
        msg: String,
        line: usize,
        col: usize,
        span: Span,
    },
}

/// Why a definition was refused a corecursor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RejectReason {
    /// A self-call sits in a structural position that can never be safe
    /// (condition of an `if`, argument of another self-call, a collection
    /// combinator argument, and so on).
    UnguardedSelfCallBadContext,
    /// A named operation that is not registered as well behaved occurs in a
    /// self-call context.
    NonWellBehavedContext(String),
    /// Producing one output layer would require observing two layers of an
    /// argument.
    TwoLayerDestruction,
    /// A term mentions an operation missing from the corecursion state.
    UnknownOperation(String),
}

impl std::fmt::Display for RejectReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RejectReason::UnguardedSelfCallBadContext => {
                write!(f, "UnguardedSelfCall-BadContext")
            }
            RejectReason::NonWellBehavedContext(n) => write!(f, "NonWellBehavedContext({n})"),
            RejectReason::TwoLayerDestruction => write!(f, "TwoLayerDestruction"),
            RejectReason::UnknownOperation(n) => write!(f, "UnknownOperation({n})"),
        }
    }
}

/// Errors raised while registering a definition as well behaved.
#[derive(Debug, Clone, Error)]
pub enum RegError {
    #[error("operation `{0}` is already registered")]
    DuplicateOp(String),
    #[error("cannot register `{name}`: {reason}")]
    Extraction { name: String, reason: RejectReason, span: Span },
    #[error("`{name}` was classified {class}; only guarded definitions with a top constructor can be registered")]
    UnsupportedClass { name: String, class: String },
    #[error("`{name}` failed the one-layer behaviour check: input {input}, runtime gave {lhs}, rule gave {rhs}")]
    WellBehavednessCheckFailed {
        name: String,
        input: String,
        lhs: String,
        rhs: String,
    },
    #[error("parameter {param} of `{name}` has a sort that cannot serve as an operation arity")]
    BadArity { name: String, param: String },
    #[error("runtime failure during registration of `{name}`: {source}")]
    Runtime {
        name: String,
        #[source]
        source: RtError,
    },
}

/// Top-level error for driving a session.
#[derive(Debug, Error)]
pub enum SessionError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Resolve(#[from] ResolveError),
    #[error(transparent)]
    Register(#[from] RegError),
    #[error(transparent)]
    Runtime(#[from] RtError),
    #[error("definition `{name}` was rejected: {reason}")]
    RejectedDefinition { name: String, reason: RejectReason },
    #[error("{0}")]
    Command(String),
}
