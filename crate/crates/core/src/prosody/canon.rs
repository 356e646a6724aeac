// Canon files:
//
//   inventory: <path relative to the canon file>
//   template: (C)V(V|C)(C)
//   onset: 0 | C | pl | [+nasal] C
//   nucleus: V | VV
//   coda: C | [+nasal]
//
// An onset alternative is a sequence of slots; `0` is the empty onset. A
// slot is a macro name, a bracketed bundle, or a run of segment symbols
// (one slot per segment). Coda alternatives are single-consonant
// predicates, one of which every coda consonant must satisfy.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use super::ProsodyError;
use crate::inventory::{FeatureBundle, Inventory, SegId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Slot {
    Class(FeatureBundle),
    Segment(SegId),
}

impl Slot {
    pub fn accepts(&self, inv: &Inventory, seg: SegId) -> bool {
        match self {
            Slot::Class(b) => b.is_subset_of(&inv.segment(seg).features),
            Slot::Segment(s) => *s == seg,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyllableCanon {
    pub inventory: Inventory,
    /// Every allowed C/V shape of a whole syllable, e.g. `CVVC`.
    pub shapes: BTreeSet<String>,
    pub onsets: Vec<Vec<Slot>>,
    pub nucleus_sizes: BTreeSet<usize>,
    pub codas: Vec<Slot>,
    vowel: FeatureBundle,
}

fn err(line: usize, msg: impl Into<String>) -> ProsodyError {
    ProsodyError::Parse { line, msg: msg.into() }
}

/// Expands `(C)V(V|C)(C)` into the set of shapes it allows.
pub fn expand_template(t: &str) -> Result<BTreeSet<String>, ProsodyError> {
    let mut shapes: BTreeSet<String> = [String::new()].into();
    let chars: Vec<char> = t.chars().filter(|c| !c.is_whitespace()).collect();
    let mut i = 0;
    while i < chars.len() {
        let options: Vec<String> = match chars[i] {
            'C' | 'V' => {
                i += 1;
                vec![chars[i - 1].to_string()]
            }
            '(' => {
                let close = chars[i..]
                    .iter()
                    .position(|&c| c == ')')
                    .ok_or_else(|| err(0, format!("unclosed `(` in template `{t}`")))?
                    + i;
                let inner: String = chars[i + 1..close].iter().collect();
                i = close + 1;
                let mut alts: Vec<String> = inner.split('|').map(String::from).collect();
                if alts.iter().any(|a| a.is_empty() || a.chars().any(|c| c != 'C' && c != 'V')) {
                    return Err(err(0, format!("bad group `({inner})` in template")));
                }
                alts.push(String::new());
                alts
            }
            other => return Err(err(0, format!("unexpected `{other}` in template `{t}`"))),
        };
        shapes = shapes.iter().flat_map(|s| options.iter().map(move |o| format!("{s}{o}"))).collect();
    }
    if !shapes.iter().any(|s| s.contains('V')) {
        return Err(err(0, "template allows no vowel"));
    }
    Ok(shapes)
}

/// Splits on whitespace, keeping bracketed bundles whole.
fn slot_tokens(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut depth = 0;
    for c in text.chars() {
        match c {
            '[' => {
                if depth == 0 && !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
                depth += 1;
                cur.push(c);
            }
            ']' => {
                depth -= 1;
                cur.push(c);
                if depth == 0 {
                    out.push(std::mem::take(&mut cur));
                }
            }
            c if c.is_whitespace() && depth == 0 => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn parse_slots(text: &str, inv: &Inventory, line: usize) -> Result<Vec<Slot>, ProsodyError> {
    let mut out = Vec::new();
    for tok in slot_tokens(text) {
        if tok == "0" {
            continue;
        }
        if tok.starts_with('[') || inv.macros().contains_key(&tok) {
            let b = inv.parse_bundle(&tok).map_err(|e| err(line, e.to_string()))?;
            out.push(Slot::Class(b));
        } else {
            let segs = inv.tokenize(&tok).map_err(|e| err(line, format!("`{tok}`: {e}")))?;
            out.extend(segs.into_iter().map(Slot::Segment));
        }
    }
    Ok(out)
}

impl SyllableCanon {
    /// Reads a canon file, loading its inventory relative to the file.
    pub fn load(path: &Path) -> Result<Self, ProsodyError> {
        let text = fs::read_to_string(path).map_err(|e| err(0, format!("{}: {e}", path.display())))?;
        let inv_rel = text
            .lines()
            .find_map(|l| l.trim().strip_prefix("inventory:"))
            .ok_or_else(|| err(0, "canon names no inventory"))?
            .trim();
        let inv_path = path.parent().unwrap_or(Path::new(".")).join(inv_rel);
        let inv_text = fs::read_to_string(&inv_path).map_err(|e| err(0, format!("{}: {e}", inv_path.display())))?;
        let inv = Inventory::parse(&inv_text).map_err(|e| err(0, format!("{}: {e}", inv_path.display())))?;
        Self::parse(&text, inv)
    }

    /// Parses canon text against an already loaded inventory; any
    /// `inventory:` line is ignored.
    pub fn parse(text: &str, inv: Inventory) -> Result<Self, ProsodyError> {
        let vowel = inv.macro_bundle("V").map_err(|e| err(0, e.to_string()))?.clone();
        let mut shapes = None;
        let mut onsets = None;
        let mut nucleus_sizes = None;
        let mut codas = None;
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once(':').ok_or_else(|| err(n + 1, "expected `key: value`"))?;
            let value = value.trim();
            match key.trim() {
                "inventory" => {}
                "template" => shapes = Some(expand_template(value).map_err(|e| err(n + 1, e.to_string()))?),
                "onset" => {
                    let alts = value.split('|').map(|a| parse_slots(a, &inv, n + 1)).collect::<Result<Vec<_>, _>>()?;
                    onsets = Some(alts);
                }
                "nucleus" => {
                    let mut sizes = BTreeSet::new();
                    for a in value.split('|').map(str::trim) {
                        if a.is_empty() || a.chars().any(|c| c != 'V') {
                            return Err(err(n + 1, format!("nucleus alternative `{a}` must be V, VV, ...")));
                        }
                        sizes.insert(a.len());
                    }
                    nucleus_sizes = Some(sizes);
                }
                "coda" => {
                    let mut slots = Vec::new();
                    for a in value.split('|') {
                        let s = parse_slots(a, &inv, n + 1)?;
                        if s.len() != 1 {
                            return Err(err(n + 1, format!("coda alternative `{}` must be one slot", a.trim())));
                        }
                        slots.extend(s);
                    }
                    codas = Some(slots);
                }
                other => return Err(err(n + 1, format!("unknown key `{other}`"))),
            }
        }
        let nucleus_sizes = nucleus_sizes.unwrap_or_else(|| [1].into());
        let onsets = onsets
            .unwrap_or_else(|| vec![Vec::new(), vec![Slot::Class(inv.macro_bundle("C").cloned().unwrap_or_default())]]);
        let codas = codas.unwrap_or_default();
        let shapes = match shapes {
            Some(s) => s,
            None => {
                let max_onset = onsets.iter().map(Vec::len).max().unwrap_or(0);
                let max_n = *nucleus_sizes.iter().max().unwrap();
                let max_coda = if codas.is_empty() { 0 } else { usize::MAX };
                let mut all = BTreeSet::new();
                for o in 0..=max_onset {
                    for &n in &nucleus_sizes {
                        for c in 0..=max_coda.min(3) {
                            all.insert(format!("{}{}{}", "C".repeat(o), "V".repeat(n), "C".repeat(c)));
                        }
                    }
                }
                let _ = max_n;
                all
            }
        };
        Ok(SyllableCanon { inventory: inv, shapes, onsets, nucleus_sizes, codas, vowel })
    }

    pub fn is_vowel(&self, seg: SegId) -> bool {
        self.vowel.is_subset_of(&self.inventory.segment(seg).features)
    }

    pub fn onset_ok(&self, segs: &[SegId]) -> bool {
        self.onsets.iter().any(|alt| {
            alt.len() == segs.len() && alt.iter().zip(segs).all(|(slot, &s)| slot.accepts(&self.inventory, s))
        })
    }

    pub fn coda_ok(&self, seg: SegId) -> bool {
        self.codas.iter().any(|slot| slot.accepts(&self.inventory, seg))
    }

    pub fn shape_ok(&self, onset: usize, nucleus: usize, coda: usize) -> bool {
        let shape = format!("{}{}{}", "C".repeat(onset), "V".repeat(nucleus), "C".repeat(coda));
        self.shapes.contains(&shape)
    }
}
