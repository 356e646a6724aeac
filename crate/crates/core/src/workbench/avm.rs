// Text syntax:
//
//   [attr: value, ...]   attribute-value map
//   <a, b>               ordered list
//   {a, b}               set
//   value#3              value carrying index 3
//   #3                   reference to index 3
//
// Atoms are bare words, or double-quoted when they contain syntax
// characters.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::WorkbenchError;
use crate::autoseg::{Association, Chart, Tier, SYL};
use crate::inventory::Inventory;
use crate::prosody::{ambisyllabic, build_onset_rhyme, Label, Node, Syllable, SyllableTree};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Avm {
    Atom(String),
    List(Vec<Avm>),
    Set(Vec<Avm>),
    Map(Vec<(String, Avm)>),
    Indexed(u32, Box<Avm>),
    Ref(u32),
}

const SPECIAL: &[char] = &['[', ']', '<', '>', '{', '}', ',', ':', '#', '"'];

impl Avm {
    pub fn atom(s: impl Into<String>) -> Avm {
        Avm::Atom(s.into())
    }

    pub fn get(&self, attr: &str) -> Option<&Avm> {
        match self {
            Avm::Map(m) => m.iter().find(|(k, _)| k == attr).map(|(_, v)| v),
            Avm::Indexed(_, v) => v.get(attr),
            _ => None,
        }
    }

    fn items(&self) -> Option<&[Avm]> {
        match self {
            Avm::List(v) | Avm::Set(v) => Some(v),
            Avm::Indexed(_, v) => v.items(),
            _ => None,
        }
    }

    fn collect(&self, defs: &mut BTreeMap<u32, usize>, refs: &mut BTreeSet<u32>) {
        match self {
            Avm::Atom(_) => {}
            Avm::List(v) | Avm::Set(v) => v.iter().for_each(|x| x.collect(defs, refs)),
            Avm::Map(m) => m.iter().for_each(|(_, x)| x.collect(defs, refs)),
            Avm::Indexed(n, v) => {
                *defs.entry(*n).or_default() += 1;
                v.collect(defs, refs);
            }
            Avm::Ref(n) => {
                refs.insert(*n);
            }
        }
    }

    /// Every index is defined once and every reference resolves.
    pub fn validate(&self) -> Result<(), WorkbenchError> {
        let (mut defs, mut refs) = (BTreeMap::new(), BTreeSet::new());
        self.collect(&mut defs, &mut refs);
        if let Some((n, _)) = defs.iter().find(|(_, &c)| c > 1) {
            return Err(WorkbenchError::Avm(format!("index #{n} defined more than once")));
        }
        if let Some(n) = refs.iter().find(|n| !defs.contains_key(n)) {
            return Err(WorkbenchError::Avm(format!("reference #{n} has no definition")));
        }
        Ok(())
    }

    /// Index definitions by number.
    pub fn definitions(&self) -> BTreeMap<u32, &Avm> {
        fn go<'a>(x: &'a Avm, out: &mut BTreeMap<u32, &'a Avm>) {
            match x {
                Avm::Atom(_) | Avm::Ref(_) => {}
                Avm::List(v) | Avm::Set(v) => v.iter().for_each(|y| go(y, out)),
                Avm::Map(m) => m.iter().for_each(|(_, y)| go(y, out)),
                Avm::Indexed(n, v) => {
                    out.insert(*n, v);
                    go(v, out);
                }
            }
        }
        let mut out = BTreeMap::new();
        go(self, &mut out);
        out
    }

    pub fn parse(text: &str) -> Result<Avm, WorkbenchError> {
        let mut p = Parser { chars: text.chars().collect(), pos: 0 };
        let v = p.value()?;
        p.skip();
        if p.pos != p.chars.len() {
            return Err(p.err("trailing text"));
        }
        v.validate()?;
        Ok(v)
    }
}

fn write_seq(f: &mut fmt::Formatter<'_>, open: &str, items: &[Avm], close: &str) -> fmt::Result {
    f.write_str(open)?;
    for (i, x) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{x}")?;
    }
    f.write_str(close)
}

impl fmt::Display for Avm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Avm::Atom(s) if s.is_empty() || s.contains(SPECIAL) || s.contains(char::is_whitespace) => {
                write!(f, "\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
            }
            Avm::Atom(s) => f.write_str(s),
            Avm::List(v) => write_seq(f, "<", v, ">"),
            Avm::Set(v) => write_seq(f, "{", v, "}"),
            Avm::Map(m) => {
                f.write_str("[")?;
                for (i, (k, v)) in m.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{k}: {v}")?;
                }
                f.write_str("]")
            }
            Avm::Indexed(n, v) => write!(f, "{v}#{n}"),
            Avm::Ref(n) => write!(f, "#{n}"),
        }
    }
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn err(&self, msg: &str) -> WorkbenchError {
        WorkbenchError::Avm(format!("{msg} at offset {}", self.pos))
    }

    fn skip(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip();
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, c: char) -> Result<(), WorkbenchError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected `{c}`")))
        }
    }

    fn number(&mut self) -> Result<u32, WorkbenchError> {
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(char::is_ascii_digit) {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect::<String>().parse().map_err(|_| self.err("expected an index"))
    }

    fn word(&mut self) -> Result<String, WorkbenchError> {
        self.skip();
        if self.chars.get(self.pos) == Some(&'"') {
            self.pos += 1;
            let mut out = String::new();
            loop {
                match self.chars.get(self.pos) {
                    None => return Err(self.err("unterminated string")),
                    Some('"') => {
                        self.pos += 1;
                        return Ok(out);
                    }
                    Some('\\') => {
                        out.extend(self.chars.get(self.pos + 1));
                        self.pos += 2;
                    }
                    Some(&c) => {
                        out.push(c);
                        self.pos += 1;
                    }
                }
            }
        }
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|c| !c.is_whitespace() && !SPECIAL.contains(c)) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a value"));
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn seq(&mut self, close: char) -> Result<Vec<Avm>, WorkbenchError> {
        let mut out = Vec::new();
        if self.peek() == Some(close) {
            self.pos += 1;
            return Ok(out);
        }
        loop {
            out.push(self.value()?);
            match self.peek() {
                Some(',') => self.pos += 1,
                Some(c) if c == close => {
                    self.pos += 1;
                    return Ok(out);
                }
                _ => return Err(self.err(&format!("expected `,` or `{close}`"))),
            }
        }
    }

    fn value(&mut self) -> Result<Avm, WorkbenchError> {
        let v = match self.peek() {
            Some('#') => {
                self.pos += 1;
                return Ok(Avm::Ref(self.number()?));
            }
            Some('<') => {
                self.pos += 1;
                Avm::List(self.seq('>')?)
            }
            Some('{') => {
                self.pos += 1;
                Avm::Set(self.seq('}')?)
            }
            Some('[') => {
                self.pos += 1;
                let mut m = Vec::new();
                if self.peek() == Some(']') {
                    self.pos += 1;
                } else {
                    loop {
                        let k = self.word()?;
                        self.expect(':')?;
                        m.push((k, self.value()?));
                        match self.peek() {
                            Some(',') => self.pos += 1,
                            Some(']') => {
                                self.pos += 1;
                                break;
                            }
                            _ => return Err(self.err("expected `,` or `]`")),
                        }
                    }
                }
                Avm::Map(m)
            }
            _ => Avm::Atom(self.word()?),
        };
        // An index may follow directly.
        if self.chars.get(self.pos) == Some(&'#') {
            self.pos += 1;
            return Ok(Avm::Indexed(self.number()?, Box::new(v)));
        }
        Ok(v)
    }
}

fn tier_attr(name: &str) -> String {
    if name == SYL {
        "syllable".to_string()
    } else {
        name.to_string()
    }
}

/// Tiers as lists of indexed autosegments numbered 1, 2, ... across the
/// chart, and the associations as a set of index pairs.
pub fn export_chart(c: &Chart) -> Avm {
    let mut base = Vec::new();
    let mut next = 1u32;
    let mut out = Vec::new();
    for t in &c.tiers {
        base.push(next);
        let items = t.labels.iter().map(|l| {
            let x = Avm::Indexed(next, Box::new(Avm::atom(l.clone())));
            next += 1;
            x
        });
        out.push((tier_attr(&t.name), Avm::List(items.collect())));
    }
    let id = |tier: usize, k: usize| base[tier] + k as u32;
    let mut pairs: Vec<(u32, u32)> = c.associations.iter().map(|a| (id(a.a, a.i), id(a.b, a.j))).collect();
    pairs.sort();
    let links = pairs.into_iter().map(|(x, y)| Avm::List(vec![Avm::Ref(x), Avm::Ref(y)])).collect();
    out.push(("associations".to_string(), Avm::Set(links)));
    Avm::Map(out)
}

/// Rebuilds a chart from [`export_chart`] output, whatever the index
/// numbers.
pub fn import_chart(avm: &Avm) -> Result<Chart, WorkbenchError> {
    let bad = |m: &str| WorkbenchError::Avm(m.to_string());
    let Avm::Map(entries) = avm else { return Err(bad("chart must be a map")) };
    let mut tiers = Vec::new();
    let mut place: BTreeMap<u32, (usize, usize)> = BTreeMap::new();
    let mut links = None;
    for (k, v) in entries {
        if k == "associations" {
            links = Some(v);
            continue;
        }
        let items = v.items().ok_or_else(|| bad("tier must be a list"))?;
        let mut labels = Vec::new();
        for (i, x) in items.iter().enumerate() {
            let Avm::Indexed(n, inner) = x else { return Err(bad("autosegments must carry indexes")) };
            let Avm::Atom(l) = inner.as_ref() else { return Err(bad("autosegment labels must be atoms")) };
            place.insert(*n, (tiers.len(), i));
            labels.push(l.clone());
        }
        let name = if k == "syllable" { SYL.to_string() } else { k.clone() };
        tiers.push(Tier { name, labels });
    }
    let mut chart = Chart::new(tiers);
    for pair in links.and_then(Avm::items).ok_or_else(|| bad("missing associations"))? {
        let Some([Avm::Ref(x), Avm::Ref(y)]) = pair.items() else { return Err(bad("association must be <#i, #j>")) };
        let (&(a, i), &(b, j)) =
            (place.get(x).ok_or_else(|| bad("dangling index"))?, place.get(y).ok_or_else(|| bad("dangling index"))?);
        chart.associations.insert(Association::new(a, i, b, j));
    }
    Ok(chart)
}

fn seg_list(n: &Node, inv: &Inventory) -> Avm {
    Avm::List(
        n.children()
            .iter()
            .map(|c| match c {
                Node::Segment(s) => Avm::atom(inv.symbol(*s)),
                other => Avm::atom(other.render(inv)),
            })
            .collect(),
    )
}

/// `[onset: <...>, rhyme: [nucleus: <...>, coda: <...>]]` from an
/// onset-rhyme tree; empty constituents are left out. Moraic trees give
/// `[onset: <...>, moras: <<...>, ...>]`.
pub fn export_tree(t: &SyllableTree, inv: &Inventory) -> Avm {
    let mut out = Vec::new();
    let kids = t.root.children();
    let onset: Vec<Avm> = kids
        .iter()
        .filter_map(|c| match c {
            Node::Segment(s) => Some(Avm::atom(inv.symbol(*s))),
            _ => None,
        })
        .collect();
    if !onset.is_empty() {
        out.push(("onset".to_string(), Avm::List(onset)));
    }
    let mut moras = Vec::new();
    for c in kids {
        match c.label() {
            Some(Label::Onset) => out.push(("onset".to_string(), seg_list(c, inv))),
            Some(Label::Rhyme) => {
                let mut r = Vec::new();
                for part in c.children() {
                    match part.label() {
                        Some(Label::Nucleus) => r.push(("nucleus".to_string(), seg_list(part, inv))),
                        Some(Label::Coda) => r.push(("coda".to_string(), seg_list(part, inv))),
                        _ => {}
                    }
                }
                out.push(("rhyme".to_string(), Avm::Map(r)));
            }
            Some(Label::Mora) => moras.push(seg_list(c, inv)),
            _ => {}
        }
    }
    if !moras.is_empty() {
        out.push(("moras".to_string(), Avm::List(moras)));
    }
    Avm::Map(out)
}

/// The onset-rhyme AVMs of a word's syllables. A consonant shared by two
/// syllables is defined once, as the coda of the first, and referenced as
/// the onset of the second.
pub fn export_syllables(sylls: &[Syllable], inv: &Inventory, share: bool) -> Avm {
    let shared: BTreeSet<usize> = if share { ambisyllabic(sylls).into_iter().collect() } else { BTreeSet::new() };
    let index_of: BTreeMap<usize, u32> = shared.iter().copied().zip(1u32..).collect();
    let mut out = Vec::new();
    for (k, s) in sylls.iter().enumerate() {
        let Avm::Map(mut m) = export_tree(&build_onset_rhyme(s), inv) else { unreachable!() };
        if let Some(&n) = index_of.get(&s.start) {
            let onset = m.iter_mut().find(|(a, _)| a == "onset").expect("shared consonant is an onset");
            let Avm::List(items) = &mut onset.1 else { unreachable!() };
            items[0] = Avm::Ref(n);
        }
        if let Some(next_syl) = sylls.get(k + 1) {
            if let Some(&n) = index_of.get(&next_syl.start) {
                let seg = Avm::Indexed(n, Box::new(Avm::atom(inv.symbol(next_syl.onset[0]))));
                let rhyme = m.iter_mut().find(|(a, _)| a == "rhyme").expect("rhyme");
                let Avm::Map(r) = &mut rhyme.1 else { unreachable!() };
                match r.iter_mut().find(|(a, _)| a == "coda") {
                    Some((_, Avm::List(items))) => items.push(seg),
                    _ => r.push(("coda".to_string(), Avm::List(vec![seg]))),
                }
            }
        }
        out.push(Avm::Map(m));
    }
    Avm::List(out)
}

/// Onset, nucleus and coda symbols of each syllable in an
/// [`export_syllables`] AVM, with shared consonants resolved.
pub fn import_syllables(avm: &Avm) -> Result<Vec<[Vec<String>; 3]>, WorkbenchError> {
    let bad = |m: &str| WorkbenchError::Avm(m.to_string());
    let defs = avm.definitions();
    let atoms = |v: Option<&Avm>| -> Result<Vec<String>, WorkbenchError> {
        let Some(v) = v else { return Ok(Vec::new()) };
        v.items()
            .ok_or_else(|| bad("expected a list"))?
            .iter()
            .map(|x| {
                let x = match x {
                    Avm::Ref(n) => defs.get(n).copied().ok_or_else(|| bad("dangling index"))?,
                    Avm::Indexed(_, v) => v.as_ref(),
                    other => other,
                };
                match x {
                    Avm::Atom(s) => Ok(s.clone()),
                    _ => Err(bad("expected a segment")),
                }
            })
            .collect()
    };
    let mut out = Vec::new();
    for s in avm.items().ok_or_else(|| bad("expected a list of syllables"))? {
        let rhyme = s.get("rhyme").ok_or_else(|| bad("syllable without rhyme"))?;
        out.push([atoms(s.get("onset"))?, atoms(rhyme.get("nucleus"))?, atoms(rhyme.get("coda"))?]);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn syntax_round_trip() {
        let text = "[a: <x#1, \"y z\">, b: {#1, [c: <>]}, d: []]";
        let v = Avm::parse(text).unwrap();
        assert_eq!(v.to_string(), text);
        assert_eq!(v.get("a").unwrap().items().unwrap().len(), 2);
    }

    #[test]
    fn index_checks() {
        assert!(Avm::parse("<a#1, b#1>").is_err());
        assert!(Avm::parse("<a, #2>").is_err());
        assert!(Avm::parse("<a#1, #1>").is_ok());
        assert!(Avm::parse("[a: b").is_err());
        assert!(Avm::parse("<a> x").is_err());
    }

    #[test]
    fn chart_round_trip() {
        let c = Chart::parse("tier syl: a b\ntier tone: H L\nassoc: 0-0 1-0 1-1\n").unwrap();
        let v = export_chart(&c);
        assert_eq!(
            v.to_string(),
            "[syllable: <a#1, b#2>, tone: <H#3, L#4>, associations: {<#1, #3>, <#2, #3>, <#2, #4>}]"
        );
        assert_eq!(import_chart(&Avm::parse(&v.to_string()).unwrap()).unwrap(), c);
    }
}
