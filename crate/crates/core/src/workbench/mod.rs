//! Datasets, corpus runs and attribute-value matrix export.
//!
//! A dataset is a TOML manifest naming its kind, the analysis files it
//! needs (inventory, rules, lexicon, canon, pitch tracks) and a TSV file of
//! records with expected outputs. [`run_corpus`] checks every record and
//! collects the results in a [`CorpusReport`].

mod avm;
mod corpus;
mod dataset;

use std::path::PathBuf;

use thiserror::Error;

pub use avm::{export_chart, export_syllables, export_tree, import_chart, import_syllables, Avm};
pub use corpus::{run_corpus, run_corpus_serial, CorpusReport, ReportRow, Status};
pub use dataset::{Analysis, Dataset, DatasetKind, Manifest};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WorkbenchError {
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
    #[error("{path}: {msg}")]
    Manifest { path: String, msg: String },
    #[error("{0}")]
    Analysis(String),
    #[error("avm: {0}")]
    Avm(String),
}

/// Root of the shipped data: `$PHONOKIT_DATA` if set, else the `data`
/// directory of this crate.
pub fn data_dir() -> PathBuf {
    match std::env::var_os("PHONOKIT_DATA") {
        Some(p) => PathBuf::from(p),
        None => PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data"),
    }
}

/// Ids of the datasets under `data_dir()/datasets`, sorted.
pub fn dataset_ids() -> Vec<String> {
    let mut out: Vec<String> = std::fs::read_dir(data_dir().join("datasets"))
        .into_iter()
        .flatten()
        .flatten()
        .filter_map(|e| {
            let p = e.path();
            (p.extension()? == "toml").then(|| p.file_stem()?.to_str().map(String::from)).flatten()
        })
        .collect();
    out.sort();
    out
}
