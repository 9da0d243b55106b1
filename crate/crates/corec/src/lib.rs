//! A definitional language and lazy runtime for total corecursive
//! programming.
//!
//! The crate parses codatatype and function declarations, statically
//! classifies each definition against an evolving registry of
//! well-behaved operations, compiles it to a corecursor (or the mixed
//! recursion–corecursion pipeline), executes it productively, and checks
//! equality proofs by bisimulation up to congruence closure.
//!
//! Start with [`session::Session`] for the full pipeline, or see the
//! crate examples for one runnable program per capability.

pub mod base;
pub mod classify;
pub mod codata;
pub mod coind;
pub mod error;
pub mod functor;
pub mod mixed;
pub mod registry;
pub mod session;
pub mod syntax;
pub mod term;
pub mod value;

pub use base::{CodataId, FunId, OpId, Sort, Span};
pub use codata::{corec_flex, corec_prim, corec_up, ctor, eval, take_prefix, CoVal, Obs, Runtime};
pub use error::{RegError, RejectReason, ResolveError, RtError, SessionError, SyntaxError};
pub use functor::{ccontent, cmap, crel, Canon, Container, FunctorDesc};
pub use registry::{init_state, verify_well_behaved, CorecState, OpEntry, SeedRule};
pub use session::Session;
pub use term::{reduce, tjoin, tmap, Lr, Term};
pub use value::Value;
