//! Workbench for indexed grammars under index restrictions.
//!
//! * [`grammar`]: the grammar model and one-step derivations.
//! * [`derivation`]: bounded search over derivations (enumeration,
//!   membership, index measurement, uncontrolledness).
//! * [`trio`]: closure constructions (union, morphisms, regular
//!   intersection, inverse projection, rational transductions).
//! * [`semilinear`]: linear and semilinear sets, tuple automata, bounded
//!   languages, and grammar synthesis from linear sets.
//! * [`etol`]: ET0L systems and their conversion to indexed grammars.
//! * [`counter`]: reversal-bounded counter machines.

pub mod automata;
pub mod counter;
pub mod derivation;
pub mod etol;
pub mod fixtures;
pub mod grammar;
pub mod semilinear;
pub mod symbol;
pub mod text;
pub mod trio;

pub use grammar::{validate, Derivation, IndexedGrammar, Item, Production, SententialForm};
pub use symbol::{Symbol, Word};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrammarError {
    #[error("syntax error at {0}")]
    Syntax(#[from] text::SyntaxError),
    #[error("invalid grammar: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<grammar::Violation>),
}
