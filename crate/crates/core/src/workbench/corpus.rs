use std::fmt::{self, Write as _};

use rayon::prelude::*;

use super::dataset::{Analysis, Dataset};
use crate::autoseg::{interval_census, render_pitch, transcribe_pitch, Pitch, PitchTrack, ToneString};
use crate::prosody::{check_phonotactics, infix_possessive};
use crate::rewrite::{derive, AffixSpec, Lexeme};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Match,
    Mismatch { expected: String, actual: String },
    Error(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportRow {
    pub id: String,
    pub status: Status,
    /// What was computed, e.g. the surface form or the transcription.
    pub detail: String,
    /// Derivation steps, filled in for mismatches.
    pub trace: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusReport {
    pub dataset: String,
    pub rows: Vec<ReportRow>,
}

impl CorpusReport {
    pub fn total(&self) -> usize {
        self.rows.len()
    }

    pub fn matches(&self) -> usize {
        self.rows.iter().filter(|r| r.status == Status::Match).count()
    }

    pub fn mismatches(&self) -> usize {
        self.rows.iter().filter(|r| matches!(r.status, Status::Mismatch { .. })).count()
    }

    pub fn errors(&self) -> usize {
        self.rows.iter().filter(|r| matches!(r.status, Status::Error(_))).count()
    }

    pub fn all_match(&self) -> bool {
        self.matches() == self.total()
    }

    pub fn summary(&self) -> String {
        format!(
            "{}: {}/{} match, {} mismatch, {} error",
            self.dataset,
            self.matches(),
            self.total(),
            self.mismatches(),
            self.errors()
        )
    }

    /// One line per row: `id status expected actual detail`.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("id\tstatus\texpected\tactual\tdetail\n");
        for r in &self.rows {
            let (status, expected, actual) = match &r.status {
                Status::Match => ("match", "", r.detail.as_str()),
                Status::Mismatch { expected, actual } => ("mismatch", expected.as_str(), actual.as_str()),
                Status::Error(e) => ("error", "", e.as_str()),
            };
            let detail = if matches!(r.status, Status::Match) { "" } else { r.detail.as_str() };
            let _ = writeln!(out, "{}\t{status}\t{expected}\t{actual}\t{}", r.id, clean(detail));
        }
        out
    }
}

fn clean(s: &str) -> String {
    s.replace(['\t', '\n'], " ").trim().to_string()
}

impl fmt::Display for CorpusReport {
    /// The summary line, then one block per row that is not a match.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.summary())?;
        for r in &self.rows {
            match &r.status {
                Status::Match => {}
                Status::Mismatch { expected, actual } => {
                    writeln!(f, "MISMATCH {}: expected {expected}, got {actual}", r.id)?;
                    for line in r.trace.lines() {
                        writeln!(f, "    {line}")?;
                    }
                }
                Status::Error(e) => writeln!(f, "ERROR {}: {e}", r.id)?,
            }
        }
        Ok(())
    }
}

fn compare(id: String, expected: &str, actual: String, trace: String) -> ReportRow {
    let status = if expected == actual {
        Status::Match
    } else {
        Status::Mismatch { expected: expected.to_string(), actual: actual.clone() }
    };
    let trace = if status == Status::Match { String::new() } else { trace };
    ReportRow { id, status, detail: actual, trace }
}

fn error(id: String, e: impl fmt::Display) -> ReportRow {
    ReportRow { id, status: Status::Error(e.to_string()), detail: String::new(), trace: String::new() }
}

fn levels(t: &PitchTrack) -> Vec<Pitch> {
    t.syllables.iter().map(|(_, p)| *p).collect()
}

fn show_levels(p: &[Pitch]) -> String {
    p.iter().map(Pitch::to_string).collect::<Vec<_>>().join(" ")
}

fn run_record(d: &Dataset, line: usize, cols: &[String]) -> ReportRow {
    let col = |i: usize| cols.get(i).map(String::as_str).unwrap_or("");
    let id = match &d.analysis {
        Analysis::Paradigm { .. } => format!("{} {}", col(0), col(1)),
        _ => col(0).to_string(),
    };
    let id = if id.trim().is_empty() { format!("line{line}") } else { id };
    match &d.analysis {
        Analysis::Paradigm { inventory: inv, rules, lexicon } => {
            let run = || -> Result<ReportRow, String> {
                let underlying = inv.tokenize(col(0)).map_err(|e| e.to_string())?;
                let affix = AffixSpec::parse(col(1), inv).map_err(|e| e.to_string())?;
                let lex = lexicon.iter().find(|l| l.underlying == underlying).cloned().unwrap_or(Lexeme {
                    underlying,
                    gloss: String::new(),
                    morph_class: None,
                });
                let (out, trace) = derive(&lex, &affix, rules, inv).map_err(|e| e.to_string())?;
                Ok(compare(id.clone(), col(2), inv.spell(&out), trace.render(inv)))
            };
            run().unwrap_or_else(|e| error(id.clone(), e))
        }
        Analysis::Infix { canon, infix } => {
            let inv = &canon.inventory;
            let run = || -> Result<ReportRow, String> {
                let word = inv.tokenize(col(0)).map_err(|e| e.to_string())?;
                let infix = inv.tokenize(infix).map_err(|e| e.to_string())?;
                let out = infix_possessive(&word, canon, &infix).map_err(|e| e.to_string())?;
                Ok(compare(id.clone(), col(1), inv.spell(&out), String::new()))
            };
            run().unwrap_or_else(|e| error(id.clone(), e))
        }
        Analysis::Phonotactics { canon } => match canon.inventory.tokenize(col(0)) {
            Err(e) => error(id, e),
            Ok(word) => {
                let v = check_phonotactics(&word, canon);
                let actual = if v.is_empty() {
                    "ok".to_string()
                } else {
                    v.iter().map(|v| format!("{} at {}", v.kind, v.position)).collect::<Vec<_>>().join("; ")
                };
                compare(id, "ok", actual, String::new())
            }
        },
        Analysis::Pitch { tracks, .. } => {
            let Some(track) = tracks.iter().find(|t| t.id == col(0)).and_then(|t| t.track.as_ref()) else {
                return error(id, "no such track, or the track is missing");
            };
            let tones = match transcribe_pitch(track) {
                Ok(t) => t,
                Err(e) => return error(id, e),
            };
            if cols.len() > 1 {
                return match col(1).parse::<ToneString>() {
                    Ok(want) => compare(id, &want.to_string(), tones.to_string(), String::new()),
                    Err(e) => error(id, e),
                };
            }
            match render_pitch(&tones) {
                Ok(back) => {
                    let row = compare(id, &show_levels(&levels(track)), show_levels(&levels(&back)), String::new());
                    ReportRow { detail: tones.to_string(), ..row }
                }
                Err(e) => error(id, e),
            }
        }
    }
}

fn census_row(d: &Dataset) -> Option<ReportRow> {
    let Analysis::Pitch { tracks, census: Some(want) } = &d.analysis else { return None };
    let got = interval_census(tracks.iter().filter_map(|t| t.track.as_ref()));
    let show = |m: &std::collections::BTreeMap<i32, usize>| {
        m.iter().map(|(k, n)| format!("{k:+}={n}")).collect::<Vec<_>>().join(" ")
    };
    let unclassified = got.unclassified.iter().map(|(id, d)| format!("{id}:{d:+}")).collect::<Vec<_>>().join(" ");
    let row = compare("census".into(), &show(want), show(&got.counts), String::new());
    Some(ReportRow { detail: format!("{} tracks; unclassified {unclassified}", got.tracks), ..row })
}

/// Checks every record, in parallel. Rows come back in record order, so
/// the report does not depend on scheduling.
pub fn run_corpus(d: &Dataset) -> CorpusReport {
    let mut rows: Vec<ReportRow> = d.records.par_iter().map(|(line, cols)| run_record(d, *line, cols)).collect();
    rows.extend(census_row(d));
    CorpusReport { dataset: d.manifest.id.clone(), rows }
}

pub fn run_corpus_serial(d: &Dataset) -> CorpusReport {
    let mut rows: Vec<ReportRow> = d.records.iter().map(|(line, cols)| run_record(d, *line, cols)).collect();
    rows.extend(census_row(d));
    CorpusReport { dataset: d.manifest.id.clone(), rows }
}
