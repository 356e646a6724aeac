use std::collections::HashSet;
use std::fmt;

use super::{ProsodyError, SyllableCanon};
use crate::inventory::{Inventory, SegId, Word};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Syllable {
    /// Offset of the syllable's first segment in the word.
    pub start: usize,
    pub onset: Vec<SegId>,
    pub nucleus: Vec<SegId>,
    pub coda: Vec<SegId>,
}

impl Syllable {
    pub fn len(&self) -> usize {
        self.onset.len() + self.nucleus.len() + self.coda.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn end(&self) -> usize {
        self.start + self.len()
    }

    pub fn segments(&self) -> impl Iterator<Item = SegId> + '_ {
        self.onset.iter().chain(&self.nucleus).chain(&self.coda).copied()
    }

    pub fn spell(&self, inv: &Inventory) -> String {
        inv.spell(&self.segments().collect::<Vec<_>>())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Weight {
    Light,
    Heavy,
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Weight::Light => "light",
            Weight::Heavy => "heavy",
        })
    }
}

pub fn weight(s: &Syllable) -> Weight {
    if s.nucleus.len() == 1 && s.coda.is_empty() {
        Weight::Light
    } else {
        Weight::Heavy
    }
}

fn next_vowel(word: &[SegId], from: usize, canon: &SyllableCanon) -> Option<usize> {
    (from..word.len()).find(|&i| canon.is_vowel(word[i]))
}

struct Parser<'a> {
    word: &'a [SegId],
    canon: &'a SyllableCanon,
    dead: HashSet<usize>,
}

impl Parser<'_> {
    /// Parses the rest of the word from `p`, where a syllable begins.
    fn from(&mut self, p: usize) -> Option<Vec<Syllable>> {
        if p == self.word.len() {
            return Some(Vec::new());
        }
        if self.dead.contains(&p) {
            return None;
        }
        let found = self.try_from(p);
        if found.is_none() {
            self.dead.insert(p);
        }
        found
    }

    fn try_from(&mut self, p: usize) -> Option<Vec<Syllable>> {
        let (word, canon) = (self.word, self.canon);
        let v = next_vowel(word, p, canon)?;
        let onset = &word[p..v];
        if !canon.onset_ok(onset) {
            return None;
        }
        // Longer nuclei first.
        for &n in canon.nucleus_sizes.iter().rev() {
            let nend = v + n;
            if nend > word.len() || !word[v..nend].iter().all(|&s| canon.is_vowel(s)) {
                continue;
            }
            let next = next_vowel(word, nend, canon);
            let cluster_end = next.unwrap_or(word.len());
            // Shortest coda first leaves the longest onset to the next
            // syllable. At the word's end the whole cluster is coda.
            let codas: Vec<usize> = if next.is_some() { (nend..=cluster_end).collect() } else { vec![cluster_end] };
            for cend in codas {
                let coda = &word[nend..cend];
                if !coda.iter().all(|&s| canon.coda_ok(s)) || !canon.shape_ok(onset.len(), n, coda.len()) {
                    continue;
                }
                if let Some(mut rest) = self.from(cend) {
                    let s = Syllable {
                        start: p,
                        onset: onset.to_vec(),
                        nucleus: word[v..nend].to_vec(),
                        coda: coda.to_vec(),
                    };
                    rest.insert(0, s);
                    return Some(rest);
                }
            }
        }
        None
    }
}

/// Splits `word` into syllables licensed by `canon`, giving every syllable
/// the longest legal onset.
pub fn syllabify(word: &[SegId], canon: &SyllableCanon) -> Result<Vec<Syllable>, ProsodyError> {
    if word.is_empty() {
        return Err(ProsodyError::Unsyllabifiable(0));
    }
    let mut parser = Parser { word, canon, dead: HashSet::new() };
    parser.from(0).ok_or_else(|| {
        let at = lenient(word, canon).first().map_or(0, |v| v.position);
        ProsodyError::Unsyllabifiable(at)
    })
}

/// Inserts `infix` after the first metrical syllable. An initial light
/// syllable is extrametrical; a word made of one light syllable takes the
/// infix at its end.
pub fn infix_possessive(word: &[SegId], canon: &SyllableCanon, infix: &[SegId]) -> Result<Word, ProsodyError> {
    let sylls = syllabify(word, canon)?;
    let host = if weight(&sylls[0]) == Weight::Light { 1 } else { 0 };
    let at = sylls.get(host).map_or(word.len(), Syllable::end);
    let mut out = word[..at].to_vec();
    out.extend_from_slice(infix);
    out.extend_from_slice(&word[at..]);
    Ok(out)
}

/// Positions of consonants shared by two syllables: a lone intervocalic
/// onset consonant following a light syllable.
pub fn ambisyllabic(sylls: &[Syllable]) -> Vec<usize> {
    sylls.windows(2).filter(|w| weight(&w[0]) == Weight::Light && w[1].onset.len() == 1).map(|w| w[1].start).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ViolationKind {
    IllegalOnset,
    UnlicensedCoda,
    VowellessResidue,
    Template,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationKind::IllegalOnset => "illegal onset",
            ViolationKind::UnlicensedCoda => "unlicensed coda",
            ViolationKind::VowellessResidue => "vowelless residue",
            ViolationKind::Template => "template",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Violation {
    pub position: usize,
    pub kind: ViolationKind,
}

/// Every licensing failure in `word`; empty when the word syllabifies.
pub fn check_phonotactics(word: &[SegId], canon: &SyllableCanon) -> Vec<Violation> {
    if word.is_empty() {
        return vec![Violation { position: 0, kind: ViolationKind::VowellessResidue }];
    }
    let mut parser = Parser { word, canon, dead: HashSet::new() };
    if parser.from(0).is_some() {
        return Vec::new();
    }
    let found = lenient(word, canon);
    if found.is_empty() {
        vec![Violation { position: 0, kind: ViolationKind::Template }]
    } else {
        found
    }
}

/// A single greedy pass that keeps going past failures, recording them.
fn lenient(word: &[SegId], canon: &SyllableCanon) -> Vec<Violation> {
    let mut out: Vec<Violation> = Vec::new();
    let push = |out: &mut Vec<Violation>, position, kind| out.push(Violation { position, kind });
    let mut p = 0;
    let mut first = true;
    while p < word.len() {
        let Some(v) = next_vowel(word, p, canon) else {
            push(&mut out, p, ViolationKind::VowellessResidue);
            break;
        };
        let before = out.len();
        // Later onsets were already checked when the previous coda was chosen.
        if first && !canon.onset_ok(&word[p..v]) {
            push(&mut out, p, ViolationKind::IllegalOnset);
        }
        first = false;
        let vowels = (v..word.len()).take_while(|&i| canon.is_vowel(word[i])).count();
        let n = canon.nucleus_sizes.iter().rev().copied().find(|&n| n <= vowels).unwrap_or(vowels.min(1));
        let nend = v + n;
        let next = next_vowel(word, nend, canon);
        let cluster_end = next.unwrap_or(word.len());
        let coda_ok = |c: usize| word[nend..c].iter().all(|&s| canon.coda_ok(s));
        let cend = match next {
            None => cluster_end,
            Some(_) => {
                let legal: Vec<usize> =
                    (nend..=cluster_end).filter(|&c| canon.onset_ok(&word[c..cluster_end])).collect();
                match legal.iter().find(|&&c| coda_ok(c) && canon.shape_ok(v - p, n, c - nend)) {
                    Some(&c) => c,
                    None => match legal.first() {
                        Some(&c) => c,
                        None => {
                            push(&mut out, nend, ViolationKind::IllegalOnset);
                            nend
                        }
                    },
                }
            }
        };
        for (i, &seg) in word.iter().enumerate().take(cend).skip(nend) {
            if !canon.coda_ok(seg) {
                push(&mut out, i, ViolationKind::UnlicensedCoda);
            }
        }
        // A shape failure is only news if nothing more specific was found.
        if out.len() == before && !canon.shape_ok(v - p, n, cend - nend) {
            push(&mut out, p, ViolationKind::Template);
        }
        p = cend;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn canon() -> SyllableCanon {
        let inv = Inventory::parse(
            "features: syl nas\nsegment a + -\nsegment i + -\nsegment t - -\nsegment k - -\nsegment n - +\nmacro C = [-syl]\nmacro V = [+syl]\n",
        )
        .unwrap();
        SyllableCanon::parse("template: (C)V(V)(C)\nonset: 0 | C\nnucleus: V | VV\ncoda: [+nas]\n", inv).unwrap()
    }

    fn split(c: &SyllableCanon, w: &str) -> String {
        let word = c.inventory.tokenize(w).unwrap();
        let s = syllabify(&word, c).unwrap();
        s.iter().map(|s| s.spell(&c.inventory)).collect::<Vec<_>>().join(".")
    }

    #[test]
    fn onsets_are_maximal() {
        let c = canon();
        assert_eq!(split(&c, "atan"), "a.tan");
        assert_eq!(split(&c, "anta"), "an.ta");
        assert_eq!(split(&c, "aiia"), "ai.ia");
    }

    #[test]
    fn failures() {
        let c = canon();
        let w = c.inventory.tokenize("kat").unwrap();
        assert_eq!(syllabify(&w, &c), Err(ProsodyError::Unsyllabifiable(2)));
        assert_eq!(check_phonotactics(&w, &c), [Violation { position: 2, kind: ViolationKind::UnlicensedCoda }]);
        let w = c.inventory.tokenize("tka").unwrap();
        assert_eq!(check_phonotactics(&w, &c), [Violation { position: 0, kind: ViolationKind::IllegalOnset }]);
        let w = c.inventory.tokenize("ant").unwrap();
        let v = check_phonotactics(&w, &c);
        assert!(v.contains(&Violation { position: 2, kind: ViolationKind::UnlicensedCoda }), "{v:?}");
        let w = c.inventory.tokenize("nt").unwrap();
        assert_eq!(check_phonotactics(&w, &c), [Violation { position: 0, kind: ViolationKind::VowellessResidue }]);
        assert_eq!(syllabify(&[], &c), Err(ProsodyError::Unsyllabifiable(0)));
    }

    #[test]
    fn weights_and_infix() {
        let c = canon();
        let w = c.inventory.tokenize("tatan").unwrap();
        let s = syllabify(&w, &c).unwrap();
        assert_eq!(s.iter().map(weight).collect::<Vec<_>>(), [Weight::Light, Weight::Heavy]);
        assert_eq!(ambisyllabic(&s), [2]);
        let k = c.inventory.tokenize("ka").unwrap();
        let out = infix_possessive(&w, &c, &k).unwrap();
        assert_eq!(c.inventory.spell(&out), "tatanka");
        let out = infix_possessive(&c.inventory.tokenize("ta").unwrap(), &c, &k).unwrap();
        assert_eq!(c.inventory.spell(&out), "taka");
    }
}
