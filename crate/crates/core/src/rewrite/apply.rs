use std::collections::BTreeMap;

use super::{ApplyError, EnvItem, FeatureSpec, Pattern, RewriteRule, SpecValue};
use crate::inventory::{FeatureBundle, FeatureId, FeatureValue, Inventory, SegId, Word};

type Bindings = BTreeMap<String, FeatureValue>;

/// One rule application: `rule` rewrote the segment at `position`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub rule: String,
    pub input: Word,
    pub output: Word,
    pub position: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Derivation {
    pub steps: Vec<Step>,
}

impl Derivation {
    pub fn extend(&mut self, other: Derivation) {
        self.steps.extend(other.steps);
    }

    /// Names of the rules that applied, in order, without repeats in a row.
    pub fn rules_applied(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for s in &self.steps {
            if out.last() != Some(&s.rule.as_str()) {
                out.push(&s.rule);
            }
        }
        out
    }

    /// One line per step: `rule  input -> output  @position`.
    pub fn render(&self, inv: &Inventory) -> String {
        self.steps
            .iter()
            .map(|s| format!("{}\t{} -> {}\t@{}\n", s.rule, inv.spell(&s.input), inv.spell(&s.output), s.position))
            .collect()
    }
}

/// A pattern with its macros folded into a plain bundle. `fixed` is `None`
/// when the macros and literal values contradict each other.
struct Compiled {
    fixed: Option<FeatureBundle>,
    vars: Vec<(FeatureId, String)>,
}

impl Compiled {
    fn new(p: &Pattern, inv: &Inventory) -> Result<Self, ApplyError> {
        let mut fixed = Some(FeatureBundle::new());
        let mut vars = Vec::new();
        for m in &p.macros {
            let mb = inv.macro_bundle(m)?;
            fixed = fixed.and_then(|mut b| b.merge(mb).ok().map(|_| b));
        }
        for s in &p.specs {
            match &s.value {
                SpecValue::Var(v) => vars.push((s.feature, v.clone())),
                lit => {
                    let v = if *lit == SpecValue::Plus { FeatureValue::Plus } else { FeatureValue::Minus };
                    let one = FeatureBundle::from_pairs([(s.feature, v)]);
                    fixed = fixed.and_then(|mut b| b.merge(&one).ok().map(|_| b));
                }
            }
        }
        Ok(Compiled { fixed, vars })
    }

    fn test(&self, seg: &FeatureBundle, b: &Bindings) -> Option<Bindings> {
        if !self.fixed.as_ref()?.is_subset_of(seg) {
            return None;
        }
        let mut out = b.clone();
        for (f, v) in &self.vars {
            let val = seg.get(*f);
            if val == FeatureValue::Unspecified {
                return None;
            }
            match out.get(v) {
                Some(&bound) if bound != val => return None,
                Some(_) => {}
                None => {
                    out.insert(v.clone(), val);
                }
            }
        }
        Some(out)
    }
}

enum Item {
    One(Compiled),
    Star(Compiled),
}

struct Side {
    items: Vec<Item>,
    anchored: bool,
}

impl Side {
    /// `items` listed outward from the focus.
    fn new<'a>(items: impl Iterator<Item = &'a EnvItem>, inv: &Inventory) -> Result<Self, ApplyError> {
        let mut out = Vec::new();
        let mut anchored = false;
        for item in items {
            match item {
                EnvItem::Boundary => anchored = true,
                EnvItem::Star(inner) => out.push(Item::Star(Compiled::new(&inner.pattern().unwrap(), inv)?)),
                other => out.push(Item::One(Compiled::new(&other.pattern().unwrap(), inv)?)),
            }
        }
        Ok(Side { items: out, anchored })
    }

    /// All bindings under which `segs` (read outward from the focus)
    /// satisfies this side, most greedy first.
    fn matches(&self, segs: &[&FeatureBundle], b: &Bindings, out: &mut Vec<Bindings>) {
        self.go(0, segs, b, out);
    }

    fn go(&self, at: usize, segs: &[&FeatureBundle], b: &Bindings, out: &mut Vec<Bindings>) {
        match self.items.get(at) {
            None => {
                if (!self.anchored || segs.is_empty()) && !out.contains(b) {
                    out.push(b.clone());
                }
            }
            Some(Item::One(p)) => {
                if let Some(nb) = segs.first().and_then(|s| p.test(s, b)) {
                    self.go(at + 1, &segs[1..], &nb, out);
                }
            }
            Some(Item::Star(p)) => {
                let mut chain = vec![b.clone()];
                for s in segs {
                    match p.test(s, chain.last().unwrap()) {
                        Some(nb) => chain.push(nb),
                        None => break,
                    }
                }
                for k in (0..chain.len()).rev() {
                    self.go(at + 1, &segs[k..], &chain[k], out);
                }
            }
        }
    }
}

struct Matcher {
    focus: Compiled,
    change: Vec<FeatureSpec>,
    left: Side,
    right: Side,
}

impl Matcher {
    fn new(r: &RewriteRule, inv: &Inventory) -> Result<Self, ApplyError> {
        Ok(Matcher {
            focus: Compiled::new(&r.focus, inv)?,
            change: r.change.clone(),
            left: Side::new(r.left.iter().rev(), inv)?,
            right: Side::new(r.right.iter(), inv)?,
        })
    }

    /// Bindings for an application at `p`, if the rule applies there.
    fn at(&self, word: &[SegId], p: usize, inv: &Inventory) -> Option<Bindings> {
        let feats = |s: SegId| &inv.segment(s).features;
        let fb = self.focus.test(feats(word[p]), &Bindings::new())?;
        let left: Vec<&FeatureBundle> = word[..p].iter().rev().map(|&s| feats(s)).collect();
        let right: Vec<&FeatureBundle> = word[p + 1..].iter().map(|&s| feats(s)).collect();
        let mut lefts = Vec::new();
        self.left.matches(&left, &fb, &mut lefts);
        for lb in &lefts {
            let mut rights = Vec::new();
            self.right.matches(&right, lb, &mut rights);
            if let Some(b) = rights.into_iter().next() {
                return Some(b);
            }
        }
        None
    }

    fn changed(&self, seg: &FeatureBundle, b: &Bindings) -> FeatureBundle {
        let pairs = self.change.iter().map(|s| {
            let v = match &s.value {
                SpecValue::Plus => FeatureValue::Plus,
                SpecValue::Minus => FeatureValue::Minus,
                SpecValue::Var(v) => b[v],
            };
            (s.feature, v)
        });
        seg.overwrite(&FeatureBundle::from_pairs(pairs))
    }
}

/// Does `rule`'s structural description hold at `position` of `word`?
pub fn applies_at(rule: &RewriteRule, word: &[SegId], position: usize, inv: &Inventory) -> Result<bool, ApplyError> {
    Ok(position < word.len() && Matcher::new(rule, inv)?.at(word, position, inv).is_some())
}

/// Applies one rule left to right, in place, repeating whole passes until
/// nothing changes.
pub fn apply_rule(rule: &RewriteRule, word: &[SegId], inv: &Inventory) -> Result<(Word, Derivation), ApplyError> {
    let cap = (word.len() * inv.feature_names().len()).max(1);
    apply_capped(rule, word, inv, cap)
}

/// As [`apply_rule`], allowing at most `cap` passes that change something.
fn apply_capped(
    rule: &RewriteRule,
    word: &[SegId],
    inv: &Inventory,
    cap: usize,
) -> Result<(Word, Derivation), ApplyError> {
    let m = Matcher::new(rule, inv)?;
    let mut w = word.to_vec();
    let mut d = Derivation::default();
    for _ in 0..=cap {
        let mut changed = false;
        for p in 0..w.len() {
            let Some(b) = m.at(&w, p, inv) else { continue };
            let new = m.changed(&inv.segment(w[p]).features, &b);
            let seg =
                inv.resolve(&new).ok_or_else(|| ApplyError::NoSuchSegment { rule: rule.name.clone(), position: p })?;
            if seg != w[p] {
                let input = w.clone();
                w[p] = seg;
                d.steps.push(Step { rule: rule.name.clone(), input, output: w.clone(), position: p });
                changed = true;
            }
        }
        if !changed {
            return Ok((w, d));
        }
    }
    Err(ApplyError::IterationCapExceeded { rule: rule.name.clone(), cap })
}

/// Applies `rules` in order, each to fixpoint.
pub fn apply_cascade(rules: &[RewriteRule], word: &[SegId], inv: &Inventory) -> Result<(Word, Derivation), ApplyError> {
    let mut w = word.to_vec();
    let mut d = Derivation::default();
    for r in rules {
        let (nw, nd) = apply_rule(r, &w, inv)?;
        w = nw;
        d.extend(nd);
    }
    Ok((w, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::parse_rule;

    fn turkish() -> Inventory {
        Inventory::parse(include_str!("../../data/inventories/turkish.inv")).unwrap()
    }

    fn run(rule: &str, word: &str, inv: &Inventory) -> Result<String, ApplyError> {
        let r = parse_rule(rule, inv).unwrap();
        let w = inv.tokenize(word).unwrap();
        apply_rule(&r, &w, inv).map(|(w, _)| inv.spell(&w))
    }

    const HARMONY: &str = "h: [V,+high] -> [@a back, @b round] / [@a back, @b round] C* _";

    #[test]
    fn harmony_binds_nearest_vowel() {
        let inv = turkish();
        assert_eq!(run(HARMONY, "pulIn", &inv).unwrap(), "pulun");
        assert_eq!(run(HARMONY, "köyIn", &inv).unwrap(), "köyün");
        assert_eq!(run(HARMONY, "ipIn", &inv).unwrap(), "ipin");
        // Chains propagate across passes.
        assert_eq!(run(HARMONY, "pulIlIk", &inv).unwrap(), "pululuk");
    }

    #[test]
    fn derivation_steps_chain() {
        let inv = turkish();
        let r = parse_rule(HARMONY, &inv).unwrap();
        let w = inv.tokenize("pulIlIk").unwrap();
        let (out, d) = apply_rule(&r, &w, &inv).unwrap();
        assert_eq!(d.steps.len(), 2);
        assert_eq!(d.steps[0].input, w);
        for pair in d.steps.windows(2) {
            assert_eq!(pair[0].output, pair[1].input);
        }
        assert_eq!(d.steps.last().unwrap().output, out);
        assert_eq!(d.rules_applied(), ["h"]);
        assert!(d.render(&inv).starts_with("h\tpulIlIk -> pululIk\t@3"));
    }

    #[test]
    fn boundaries_and_no_such_segment() {
        let inv = turkish();
        assert_eq!(run("[C,+voiced] -> [-voiced] / _ #", "kitab", &inv).unwrap(), "kitap");
        assert_eq!(run("[C,+voiced] -> [-voiced] / _ #", "kitabı", &inv).unwrap(), "kitabı");
        assert_eq!(run("[C] -> [-voiced] / # _", "bab", &inv).unwrap(), "pab");
        // No voiceless counterpart of l.
        assert_eq!(
            run("[+lateral] -> [-voiced]", "al", &inv),
            Err(ApplyError::NoSuchSegment { rule: String::new(), position: 1 })
        );
    }

    #[test]
    fn iteration_cap() {
        let inv = turkish();
        // Right-to-left spreading needs one pass per vowel.
        let r = parse_rule("r: [V,+high] -> [@a back, @b round] / _ C* [@a back, @b round]", &inv).unwrap();
        let w = inv.tokenize("IlIku").unwrap();
        let (out, _) = apply_rule(&r, &w, &inv).unwrap();
        assert_eq!(inv.spell(&out), "uluku");
        assert!(apply_capped(&r, &w, &inv, 2).is_ok());
        assert_eq!(apply_capped(&r, &w, &inv, 1), Err(ApplyError::IterationCapExceeded { rule: "r".into(), cap: 1 }));
    }

    #[test]
    fn applies_at_checks_environment() {
        let inv = turkish();
        let r = parse_rule(HARMONY, &inv).unwrap();
        let w = inv.tokenize("pulIn").unwrap();
        assert!(applies_at(&r, &w, 3, &inv).unwrap());
        assert!(!applies_at(&r, &w, 1, &inv).unwrap());
        assert!(!applies_at(&r, &w, 9, &inv).unwrap());
    }
}
