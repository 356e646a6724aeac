use std::collections::BTreeSet;
use std::fmt;

use super::{Tone, ToneError};

/// Name of the syllable tier read by the tone operations.
pub const SYL: &str = "syl";
/// Name of the tone tier read by the tone operations.
pub const TONE: &str = "tone";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tier {
    pub name: String,
    pub labels: Vec<String>,
}

/// An association line between autosegment `i` of tier `a` and autosegment
/// `j` of tier `b`, normalized so that `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Association {
    pub a: usize,
    pub i: usize,
    pub b: usize,
    pub j: usize,
}

impl Association {
    pub fn new(tier_a: usize, i: usize, tier_b: usize, j: usize) -> Self {
        if tier_a <= tier_b {
            Association { a: tier_a, i, b: tier_b, j }
        } else {
            Association { a: tier_b, i: j, b: tier_a, j: i }
        }
    }

    pub fn crosses(&self, other: &Association) -> bool {
        self.a == other.a
            && self.b == other.b
            && ((self.i < other.i && self.j > other.j) || (self.i > other.i && self.j < other.j))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Chart {
    pub tiers: Vec<Tier>,
    pub associations: BTreeSet<Association>,
}

impl Chart {
    pub fn new(tiers: Vec<Tier>) -> Self {
        Chart { tiers, associations: BTreeSet::new() }
    }

    pub fn tier(&self, name: &str) -> Result<usize, ToneError> {
        self.tiers.iter().position(|t| t.name == name).ok_or_else(|| ToneError::MissingTier(name.to_string()))
    }

    pub fn associate(&mut self, tier_a: usize, i: usize, tier_b: usize, j: usize) {
        self.associations.insert(Association::new(tier_a, i, tier_b, j));
    }

    pub fn dissociate(&mut self, tier_a: usize, i: usize, tier_b: usize, j: usize) {
        self.associations.remove(&Association::new(tier_a, i, tier_b, j));
    }

    /// Indices on `other` linked to autosegment `i` of `tier`, ascending.
    pub fn linked(&self, tier: usize, i: usize, other: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .associations
            .iter()
            .filter_map(|x| {
                if x.a == tier && x.i == i && x.b == other {
                    Some(x.j)
                } else if x.b == tier && x.j == i && x.a == other {
                    Some(x.i)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// True if autosegment `i` of `tier` has no association at all.
    pub fn is_floating(&self, tier: usize, i: usize) -> bool {
        !self.associations.iter().any(|x| (x.a == tier && x.i == i) || (x.b == tier && x.j == i))
    }

    /// Every pair of crossing association lines, or an error if some line
    /// points outside its tiers.
    pub fn validate(&self) -> Result<Vec<(Association, Association)>, ToneError> {
        for x in &self.associations {
            let ok = |t: usize, k: usize| self.tiers.get(t).is_some_and(|tier| k < tier.labels.len());
            if x.a == x.b || !ok(x.a, x.i) || !ok(x.b, x.j) {
                return Err(ToneError::DanglingAssociation(*x));
            }
        }
        let all: Vec<&Association> = self.associations.iter().collect();
        let mut out = Vec::new();
        for (n, x) in all.iter().enumerate() {
            for y in &all[n + 1..] {
                if x.crosses(y) {
                    out.push((**x, **y));
                }
            }
        }
        Ok(out)
    }

    /// Parses the line format
    ///
    /// ```text
    /// tier syl: i bu la li
    /// tier tone: H L H L
    /// assoc: 0-0 1-1 2-2 3-3
    /// assoc syl tone: 0-0
    /// ```
    ///
    /// A bare `assoc:` links the first two tiers.
    pub fn parse(text: &str) -> Result<Chart, ToneError> {
        let mut chart = Chart::default();
        let mut pending = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| ToneError::Parse { line: n + 1, msg };
            let (head, rest) = line.split_once(':').ok_or_else(|| err("expected `:`".into()))?;
            let mut words = head.split_whitespace();
            match words.next() {
                Some("tier") => {
                    let name = words.next().ok_or_else(|| err("tier needs a name".into()))?;
                    if chart.tiers.iter().any(|t| t.name == name) {
                        return Err(err(format!("duplicate tier `{name}`")));
                    }
                    let labels = rest.split_whitespace().map(String::from).collect();
                    chart.tiers.push(Tier { name: name.to_string(), labels });
                }
                Some("assoc") => {
                    let names: Vec<&str> = words.collect();
                    let pairs: Result<Vec<(usize, usize)>, _> = rest
                        .split_whitespace()
                        .map(|p| {
                            let (x, y) = p.split_once('-').ok_or_else(|| err(format!("bad pair `{p}`")))?;
                            let x = x.parse().map_err(|_| err(format!("bad index `{x}`")))?;
                            let y = y.parse().map_err(|_| err(format!("bad index `{y}`")))?;
                            Ok((x, y))
                        })
                        .collect();
                    pending.push((n + 1, names.iter().map(|s| s.to_string()).collect::<Vec<_>>(), pairs?));
                }
                _ => return Err(err(format!("unrecognised line `{line}`"))),
            }
        }
        for (line, names, pairs) in pending {
            let err = |msg: String| ToneError::Parse { line, msg };
            let (ta, tb) = match names.as_slice() {
                [] if chart.tiers.len() >= 2 => (0, 1),
                [] => return Err(err("`assoc:` needs two tiers".into())),
                [a, b] => {
                    (chart.tier(a).map_err(|e| err(e.to_string()))?, chart.tier(b).map_err(|e| err(e.to_string()))?)
                }
                _ => return Err(err("`assoc` takes two tier names".into())),
            };
            if ta == tb {
                return Err(err("an association needs two different tiers".into()));
            }
            for (i, j) in pairs {
                chart.associate(ta, i, tb, j);
            }
        }
        chart.validate()?;
        Ok(chart)
    }

    /// Syllable tier `syl` and tone tier `tone`, one autosegment per
    /// syllable and tone, linked one to one.
    pub fn associate_melody(syllables: &[&str], melody: &[Tone]) -> Result<Chart, ToneError> {
        if syllables.len() != melody.len() {
            return Err(ToneError::LengthMismatch { syllables: syllables.len(), tones: melody.len() });
        }
        let links: Vec<(usize, usize)> = (0..syllables.len()).map(|i| (i, i)).collect();
        Chart::associate_explicit(syllables, melody, &links)
    }

    /// As [`Chart::associate_melody`] but with caller-chosen `(syllable,
    /// tone)` links, allowing contours and shared tones.
    pub fn associate_explicit(
        syllables: &[&str],
        melody: &[Tone],
        links: &[(usize, usize)],
    ) -> Result<Chart, ToneError> {
        let mut chart = Chart::new(vec![
            Tier { name: SYL.into(), labels: syllables.iter().map(|s| s.to_string()).collect() },
            Tier { name: TONE.into(), labels: melody.iter().map(|t| t.to_string()).collect() },
        ]);
        for &(s, t) in links {
            chart.associate(0, s, 1, t);
        }
        let crossings = chart.validate()?;
        if let Some(&(x, y)) = crossings.first() {
            return Err(ToneError::Crossing(x, y));
        }
        Ok(chart)
    }
}

impl fmt::Display for Chart {
    /// Writes the format read by [`Chart::parse`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.tiers {
            writeln!(f, "tier {}: {}", t.name, t.labels.join(" "))?;
        }
        let mut pairs: Vec<(usize, usize)> =
            self.associations.iter().map(|x| (x.a, x.b)).collect::<BTreeSet<_>>().into_iter().collect();
        pairs.sort_unstable();
        for (a, b) in pairs {
            let links: Vec<String> =
                self.associations.iter().filter(|x| x.a == a && x.b == b).map(|x| format!("{}-{}", x.i, x.j)).collect();
            writeln!(f, "assoc {} {}: {}", self.tiers[a].name, self.tiers[b].name, links.join(" "))?;
        }
        Ok(())
    }
}

/// High Tone Spread: wherever a syllable linked only to an H is followed
/// by a syllable linked only to an L, and a third syllable follows, the H
/// spreads to the second syllable and the L is delinked, left floating.
///
/// Sites are found on the input chart and all changes are made at once, so
/// configurations created by spreading are not re-examined.
pub fn apply_hts(chart: &Chart) -> Result<Chart, ToneError> {
    let syl = chart.tier(SYL)?;
    let tone = chart.tier(TONE)?;
    let n = chart.tiers[syl].labels.len();
    let label = |t: usize| chart.tiers[tone].labels[t].as_str();
    let mut out = chart.clone();
    for s in 0..n.saturating_sub(2) {
        let (first, second) = (chart.linked(syl, s, tone), chart.linked(syl, s + 1, tone));
        if let ([h], [l]) = (first.as_slice(), second.as_slice()) {
            if label(*h) == "H" && label(*l) == "L" {
                out.associate(syl, s + 1, tone, *h);
                out.dissociate(syl, s + 1, tone, *l);
            }
        }
    }
    Ok(out)
}
