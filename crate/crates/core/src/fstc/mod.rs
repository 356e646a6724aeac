//! Compilation of rewrite rules into finite-state transducers over segment
//! symbols, composition of cascades, and transduction.

mod compile;
mod compose;
mod dfa;
mod transducer;

use thiserror::Error;

pub use compile::{compile_cascade, compile_rule, transduce_sequence};
pub use compose::compose;
pub use transducer::{Label, Transducer, Transition};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FstError {
    #[error("rule `{rule}` cannot be compiled: {reason}")]
    UnsupportedRule { rule: String, reason: String },
    #[error("transducers have different alphabets")]
    AlphabetMismatch,
    #[error("input rejected")]
    NoAccept,
    #[error("input has more than one output")]
    Ambiguous,
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("{0}")]
    Inventory(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}
