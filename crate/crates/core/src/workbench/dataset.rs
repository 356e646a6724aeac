use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::{data_dir, WorkbenchError};
use crate::autoseg::{parse_tracks, TrackRecord};
use crate::inventory::Inventory;
use crate::prosody::SyllableCanon;
use crate::rewrite::{parse_lexicon, parse_rules, AffixSpec, Lexeme, RewriteRule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DatasetKind {
    /// `underlying, affix, expected` rows derived through a rule cascade.
    Paradigm,
    /// Pitch tracks, checked against expected transcriptions or by round
    /// trip, plus an optional interval census.
    PitchCorpus,
    /// `word, possessive` rows for the infix.
    InfixCorpus,
    /// Words that must all be phonotactically legal.
    PhonotacticsCorpus,
}

/// The TOML manifest. Paths are relative to the manifest file.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub id: String,
    pub kind: DatasetKind,
    #[serde(default)]
    pub description: String,
    pub inventory: Option<String>,
    pub rules: Option<String>,
    pub lexicon: Option<String>,
    pub records: Option<String>,
    pub canon: Option<String>,
    pub infix: Option<String>,
    pub tracks: Option<String>,
    pub expected: Option<String>,
    pub census: Option<BTreeMap<String, usize>>,
}

/// A manifest with its analysis files loaded. Records are kept as raw
/// text so that a bad record fails alone.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub manifest: Manifest,
    pub analysis: Analysis,
    /// `(line, columns)` of each record.
    pub records: Vec<(usize, Vec<String>)>,
}

#[derive(Debug, Clone)]
pub enum Analysis {
    Paradigm { inventory: Inventory, rules: Vec<RewriteRule>, lexicon: Vec<Lexeme> },
    Pitch { tracks: Vec<TrackRecord>, census: Option<BTreeMap<i32, usize>> },
    Infix { canon: SyllableCanon, infix: String },
    Phonotactics { canon: SyllableCanon },
}

fn read(path: &Path) -> Result<String, WorkbenchError> {
    fs::read_to_string(path).map_err(|e| WorkbenchError::Io { path: path.display().to_string(), msg: e.to_string() })
}

fn analysis_err(path: &Path, e: impl std::fmt::Display) -> WorkbenchError {
    WorkbenchError::Analysis(format!("{}: {e}", path.display()))
}

/// Non-comment TSV lines as trimmed columns, with 1-based line numbers.
fn tsv(text: &str) -> Vec<(usize, Vec<String>)> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|(i, l)| (i + 1, l.split('\t').map(|c| c.trim().to_string()).collect()))
        .collect()
}

impl Dataset {
    /// Loads a dataset from a manifest path, or by id from
    /// `data_dir()/datasets`.
    pub fn open(name: &str) -> Result<Dataset, WorkbenchError> {
        let p = Path::new(name);
        if p.extension().is_some_and(|e| e == "toml") || p.exists() {
            Dataset::load(p)
        } else {
            Dataset::load(&data_dir().join("datasets").join(format!("{name}.toml")))
        }
    }

    pub fn load(path: &Path) -> Result<Dataset, WorkbenchError> {
        let manifest: Manifest = toml::from_str(&read(path)?)
            .map_err(|e| WorkbenchError::Manifest { path: path.display().to_string(), msg: e.to_string() })?;
        let base = path.parent().unwrap_or(Path::new("."));
        let need = |field: &Option<String>, name: &str| -> Result<PathBuf, WorkbenchError> {
            field.as_ref().map(|f| base.join(f)).ok_or_else(|| WorkbenchError::Manifest {
                path: path.display().to_string(),
                msg: format!("{:?} dataset needs `{name}`", manifest.kind),
            })
        };
        let canon = |p: PathBuf| SyllableCanon::load(&p).map_err(|e| analysis_err(&p, e));
        let analysis = match manifest.kind {
            DatasetKind::Paradigm => {
                let ip = need(&manifest.inventory, "inventory")?;
                let inventory = Inventory::parse(&read(&ip)?).map_err(|e| analysis_err(&ip, e))?;
                let rp = need(&manifest.rules, "rules")?;
                let rules = parse_rules(&read(&rp)?, &inventory).map_err(|e| analysis_err(&rp, e))?.0;
                let lexicon = match &manifest.lexicon {
                    Some(l) => {
                        let lp = base.join(l);
                        parse_lexicon(&read(&lp)?, &inventory).map_err(|e| analysis_err(&lp, e))?
                    }
                    None => Vec::new(),
                };
                Analysis::Paradigm { inventory, rules, lexicon }
            }
            DatasetKind::PitchCorpus => {
                let tp = need(&manifest.tracks, "tracks")?;
                let tracks = parse_tracks(&read(&tp)?).map_err(|e| analysis_err(&tp, e))?;
                let census = match &manifest.census {
                    Some(c) => Some(
                        c.iter()
                            .map(|(k, &n)| {
                                k.parse::<i32>().map(|k| (k, n)).map_err(|_| WorkbenchError::Manifest {
                                    path: path.display().to_string(),
                                    msg: format!("census key `{k}` is not an interval"),
                                })
                            })
                            .collect::<Result<_, _>>()?,
                    ),
                    None => None,
                };
                Analysis::Pitch { tracks, census }
            }
            DatasetKind::InfixCorpus => Analysis::Infix {
                canon: canon(need(&manifest.canon, "canon")?)?,
                infix: manifest.infix.clone().ok_or_else(|| WorkbenchError::Manifest {
                    path: path.display().to_string(),
                    msg: "infix-corpus dataset needs `infix`".into(),
                })?,
            },
            DatasetKind::PhonotacticsCorpus => {
                Analysis::Phonotactics { canon: canon(need(&manifest.canon, "canon")?)? }
            }
        };
        let records = match (&analysis, &manifest.expected, &manifest.records) {
            (Analysis::Pitch { .. }, Some(e), _) => tsv(&read(&base.join(e))?),
            (Analysis::Pitch { tracks, .. }, None, _) => tracks
                .iter()
                .enumerate()
                .filter(|(_, t)| t.track.is_some())
                .map(|(i, t)| (i + 1, vec![t.id.clone()]))
                .collect(),
            (_, _, Some(r)) => tsv(&read(&base.join(r))?),
            (_, _, None) => {
                return Err(WorkbenchError::Manifest { path: path.display().to_string(), msg: "no `records`".into() })
            }
        };
        Ok(Dataset { manifest, analysis, records })
    }

    pub fn inventory(&self) -> Option<&Inventory> {
        match &self.analysis {
            Analysis::Paradigm { inventory, .. } => Some(inventory),
            Analysis::Infix { canon, .. } | Analysis::Phonotactics { canon } => Some(&canon.inventory),
            Analysis::Pitch { .. } => None,
        }
    }

    /// Every record field that fails to tokenize, as `(line, message)`.
    pub fn check(&self) -> Vec<(usize, String)> {
        let Some(inv) = self.inventory() else { return Vec::new() };
        let mut out = Vec::new();
        for (line, cols) in &self.records {
            let fields: Vec<&String> = match &self.analysis {
                Analysis::Paradigm { .. } => {
                    if let Some(a) = cols.get(1) {
                        if let Err(e) = AffixSpec::parse(a, inv) {
                            out.push((*line, e.to_string()));
                        }
                    }
                    [cols.first(), cols.get(2)].into_iter().flatten().collect()
                }
                Analysis::Infix { .. } => cols.iter().take(2).collect(),
                _ => cols.iter().take(1).collect(),
            };
            for f in fields {
                if let Err(e) = inv.tokenize(f) {
                    out.push((*line, format!("`{f}`: {e}")));
                }
            }
        }
        out
    }
}
