//! Finite-model workbench for coherent and ideal actions.
//!
//! Everything is computed on explicit operation tables: algebras, identities,
//! closures, split points, and the coherence and ideality decisions built on
//! top of them.

pub mod algebra;
pub mod canonical;
pub mod closures;
pub mod coherence;
pub mod congruence;
pub mod error;
pub mod harness;
pub mod instances;
pub mod linear;
pub mod morphism;
pub mod points;
pub mod search;
pub mod term;
pub mod varieties;

pub use algebra::{Elem, FiniteAlgebra, FunctionMap, OpSymbol, Signature};
pub use error::{Error, Result};
pub use term::{check_identity, eval_term, parse_term, Identity, IdentityVerdict, Term};
