//! Syllable canons, syllabification by onset maximization, syllable weight,
//! onset-rhyme and moraic trees, infixation and phonotactic checks.

mod canon;
mod syllable;
mod tree;

use thiserror::Error;

pub use canon::{expand_template, Slot, SyllableCanon};
pub use syllable::{
    ambisyllabic, check_phonotactics, infix_possessive, syllabify, weight, Syllable, Violation, ViolationKind, Weight,
};
pub use tree::{build_moraic, build_onset_rhyme, Label, Model, Node, SyllableTree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProsodyError {
    #[error("cannot syllabify at position {0}")]
    Unsyllabifiable(usize),
    #[error("canon line {line}: {msg}")]
    Parse { line: usize, msg: String },
}
