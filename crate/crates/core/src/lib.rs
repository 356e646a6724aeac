//! Computational phonology toolkit.
//!
//! - [`inventory`]: feature systems, segments and natural classes
//! - [`rewrite`]: feature-changing rewrite rules and cascades
//! - [`autoseg`]: autosegmental tone charts and pitch transcription
//! - [`prosody`]: syllable canons, syllabification and prosodic trees
//! - [`fstc`]: compilation of rewrite rules into finite-state transducers
//! - [`workbench`]: corpus datasets, batch runs and attribute-value export

pub mod autoseg;
pub mod fstc;
pub mod inventory;
pub mod prosody;
pub mod rewrite;
pub mod workbench;
