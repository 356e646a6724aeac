// A rule is compiled in three steps.
//
// 1. Variables are expanded over {+, -}, giving plain instances. Each has a
//    focus class, a change table (input symbol to output symbol), and two
//    automata: the left context, read on the output side as the word is
//    rewritten, and the right context, read on the input side.
// 2. One pass of the rule becomes a transducer whose states pair the left
//    automata's states with pending right-context obligations. At each
//    symbol the machine guesses, for every instance whose focus and left
//    context hold, whether its right context will hold; the guess is
//    carried as an obligation and checked against the rest of the input.
// 3. Rules whose change could feed or bleed a later pass are rejected, so a
//    single pass reaches the interpreter's fixpoint.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::dfa::{ClassItem, Dfa, START};
use super::{compose, FstError, Transducer, Transition};
use crate::inventory::{FeatureBundle, FeatureId, FeatureValue, Inventory, SegId};
use crate::rewrite::{EnvItem, Pattern, RewriteRule, SpecValue};

type Assignment = BTreeMap<String, FeatureValue>;

struct Instance {
    focus: Vec<bool>,
    /// Output for each focus symbol; `None` where the change leaves the
    /// inventory.
    out: Vec<Option<usize>>,
    left: Dfa,
    right: Dfa,
}

fn unsupported(r: &RewriteRule, reason: impl Into<String>) -> FstError {
    FstError::UnsupportedRule { rule: r.name.clone(), reason: reason.into() }
}

fn value(v: &SpecValue, a: &Assignment) -> FeatureValue {
    match v {
        SpecValue::Plus => FeatureValue::Plus,
        SpecValue::Minus => FeatureValue::Minus,
        SpecValue::Var(name) => a[name],
    }
}

/// The symbols a pattern matches once its variables are fixed.
fn class(p: &Pattern, a: &Assignment, inv: &Inventory) -> Result<Vec<bool>, FstError> {
    let mut b = FeatureBundle::new();
    let mut consistent = true;
    for m in &p.macros {
        let mb = inv.macro_bundle(m).map_err(|e| FstError::Inventory(e.to_string()))?;
        consistent &= b.merge(mb).is_ok();
    }
    for s in &p.specs {
        consistent &= b.merge(&FeatureBundle::from_pairs([(s.feature, value(&s.value, a))])).is_ok();
    }
    Ok(inv.ids().map(|s| consistent && b.is_subset_of(&inv.segment(s).features)).collect())
}

/// Context items listed in text order, and whether a word edge closes them.
fn side(items: &[EnvItem], a: &Assignment, inv: &Inventory) -> Result<(Vec<ClassItem>, bool), FstError> {
    let mut out = Vec::new();
    let mut anchored = false;
    for item in items {
        match item {
            EnvItem::Boundary => anchored = true,
            EnvItem::Star(inner) => {
                out.push(ClassItem { class: class(&inner.pattern().unwrap(), a, inv)?, star: true })
            }
            other => out.push(ClassItem { class: class(&other.pattern().unwrap(), a, inv)?, star: false }),
        }
    }
    Ok((out, anchored))
}

fn pattern_features(p: &Pattern, inv: &Inventory) -> BTreeSet<FeatureId> {
    let mut out: BTreeSet<FeatureId> = p.specs.iter().map(|s| s.feature).collect();
    for m in &p.macros {
        if let Ok(b) = inv.macro_bundle(m) {
            out.extend(b.features());
        }
    }
    out
}

/// Checks that one left-to-right pass is the whole story, and that no two
/// instances can disagree at the same place.
fn check_class(r: &RewriteRule, inv: &Inventory, instances: &[Instance]) -> Result<(), FstError> {
    let changed = r.changed_features();
    let right: BTreeSet<FeatureId> =
        r.right.iter().filter_map(EnvItem::pattern).flat_map(|p| pattern_features(&p, inv)).collect();
    if let Some(f) = changed.intersection(&right).next() {
        return Err(unsupported(r, format!("changes [{}], which the right context tests", inv.feature_name(*f))));
    }
    let bound: BTreeSet<FeatureId> = r.focus.vars().map(|(_, f)| f).collect();
    if let Some(f) = changed.intersection(&bound).next() {
        return Err(unsupported(r, format!("changes [{}], which a focus variable binds", inv.feature_name(*f))));
    }
    for (i, x) in instances.iter().enumerate() {
        for y in &instances[i + 1..] {
            let disagree = (0..x.focus.len()).any(|s| x.focus[s] && y.focus[s] && x.out[s] != y.out[s]);
            if disagree && x.left.intersects(&y.left) && x.right.intersects(&y.right) {
                return Err(unsupported(r, "variable instances overlap with different outcomes"));
            }
        }
    }
    Ok(())
}

fn instances(r: &RewriteRule, inv: &Inventory) -> Result<Vec<Instance>, FstError> {
    let n = inv.len();
    let vars: Vec<String> = r.vars().into_iter().collect();
    let mut out = Vec::new();
    for bits in 0..(1usize << vars.len()) {
        let a: Assignment = vars
            .iter()
            .enumerate()
            .map(|(k, v)| (v.clone(), if bits >> k & 1 == 0 { FeatureValue::Plus } else { FeatureValue::Minus }))
            .collect();
        let focus = class(&r.focus, &a, inv)?;
        let change = FeatureBundle::from_pairs(r.change.iter().map(|s| (s.feature, value(&s.value, &a))));
        let out_sym =
            inv.ids()
                .map(|s| {
                    if focus[s.0] {
                        inv.resolve(&inv.segment(s).features.overwrite(&change)).map(|t| t.0)
                    } else {
                        None
                    }
                })
                .collect();
        let (left, left_anchored) = side(&r.left, &a, inv)?;
        let (right, right_anchored) = side(&r.right, &a, inv)?;
        out.push(Instance {
            focus,
            out: out_sym,
            left: Dfa::sequence(n, &left, !left_anchored, false),
            right: Dfa::sequence(n, &right, false, !right_anchored),
        });
    }
    Ok(out)
}

/// Pending right-context checks: instance, automaton state, and whether
/// the context must hold (`true`) or must fail.
type Obligations = BTreeSet<(usize, usize, bool)>;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Config {
    left: Vec<usize>,
    pending: Obligations,
}

/// Advances obligations over `a` and settles those whose fate is known.
/// `None` means some obligation can no longer be met.
fn advance(pending: &Obligations, a: usize, inst: &[Instance]) -> Option<Obligations> {
    let mut out = Obligations::new();
    for &(i, s, must) in pending {
        let t = inst[i].right.next[s][a];
        if settle(i, t, must, inst)? {
            out.insert((i, t, must));
        }
    }
    Some(out)
}

/// `None`: violated. `Some(false)`: already met. `Some(true)`: still open.
fn settle(i: usize, s: usize, must: bool, inst: &[Instance]) -> Option<bool> {
    let r = &inst[i].right;
    match (must, r.universal[s], r.dead[s]) {
        (true, _, true) | (false, true, _) => None,
        (true, true, _) | (false, _, true) => Some(false),
        _ => Some(true),
    }
}

fn accepting(c: &Config, inst: &[Instance]) -> bool {
    c.pending.iter().all(|&(i, s, must)| inst[i].right.accept[s] == must)
}

/// One obligatory left-to-right pass of `r`, which for rules in the
/// compilable class is also its fixpoint.
pub fn compile_rule(r: &RewriteRule, inv: &Inventory) -> Result<Transducer, FstError> {
    let inst = instances(r, inv)?;
    check_class(r, inv, &inst)?;
    let n = inv.len();
    let start = Config { left: vec![START; inst.len()], pending: Obligations::new() };
    let mut ids: BTreeMap<Config, usize> = BTreeMap::from([(start.clone(), 0)]);
    let mut configs = vec![start];
    let mut transitions = BTreeSet::new();
    let mut finals = BTreeSet::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(from) = queue.pop_front() {
        let c = configs[from].clone();
        if accepting(&c, &inst) {
            finals.insert(from);
        }
        for a in 0..n {
            let Some(carried) = advance(&c.pending, a, &inst) else { continue };
            let candidates: Vec<usize> =
                (0..inst.len()).filter(|&i| inst[i].focus[a] && inst[i].left.accept[c.left[i]]).collect();
            'guess: for bits in 0..(1usize << candidates.len()) {
                let mut pending = carried.clone();
                let mut output: Option<Option<usize>> = None;
                for (k, &i) in candidates.iter().enumerate() {
                    let holds = bits >> k & 1 == 1;
                    match settle(i, START, holds, &inst) {
                        None => continue 'guess,
                        Some(true) => {
                            pending.insert((i, START, holds));
                        }
                        Some(false) => {}
                    }
                    if holds {
                        match output {
                            Some(o) if o != inst[i].out[a] => continue 'guess,
                            _ => output = Some(inst[i].out[a]),
                        }
                    }
                }
                let b = match output {
                    None => a,
                    Some(Some(b)) => b,
                    // The change has no segment to land on.
                    Some(None) => continue,
                };
                let left = inst.iter().zip(&c.left).map(|(x, &s)| x.left.next[s][b]).collect();
                let next = Config { left, pending };
                let id = match ids.get(&next) {
                    Some(&id) => id,
                    None => {
                        let id = configs.len();
                        ids.insert(next.clone(), id);
                        configs.push(next);
                        queue.push_back(id);
                        id
                    }
                };
                transitions.insert(Transition { from, input: Some(a), output: Some(b), to: id });
            }
        }
    }
    let alphabet = inv.segments().iter().map(|s| s.symbol.clone()).collect();
    Ok(Transducer { alphabet, states: configs.len(), initial: 0, finals, transitions }.trim())
}

/// Compiles each rule and composes them in order.
pub fn compile_cascade(rules: &[RewriteRule], inv: &Inventory) -> Result<Transducer, FstError> {
    let alphabet: Vec<String> = inv.segments().iter().map(|s| s.symbol.clone()).collect();
    let mut t = Transducer::identity(alphabet);
    for r in rules {
        t = compose(&t, &compile_rule(r, inv)?)?;
    }
    Ok(t)
}

/// Runs already compiled rule transducers one after another.
pub fn transduce_sequence(ts: &[Transducer], word: &[SegId]) -> Result<Vec<SegId>, FstError> {
    let mut w: Vec<usize> = word.iter().map(|s| s.0).collect();
    for t in ts {
        w = t.transduce(&w)?;
    }
    Ok(w.into_iter().map(SegId).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::{apply_rule, parse_rule};

    fn inv() -> Inventory {
        Inventory::parse(include_str!("../../data/inventories/fst-test.inv")).unwrap()
    }

    fn check(rule: &str, words: &[&str]) {
        let inv = inv();
        let r = parse_rule(rule, &inv).unwrap();
        let t = compile_rule(&r, &inv).unwrap();
        for w in words {
            let w = inv.tokenize(w).unwrap();
            let want = apply_rule(&r, &w, &inv).unwrap().0;
            let got = transduce_sequence(std::slice::from_ref(&t), &w).unwrap();
            assert_eq!(inv.spell(&got), inv.spell(&want), "{rule} on {}", inv.spell(&w));
        }
    }

    #[test]
    fn devoicing_and_voicing() {
        check("d: [C,+voiced] -> [-voiced] / _ #", &["bad", "dab", "", "d", "abab", "ddd"]);
        check("v: [C,-voiced] -> [+voiced] / _ V", &["pat", "tapa", "ppa", "a", "tt"]);
    }

    #[test]
    fn stars_and_left_contexts() {
        check("s: [C] -> [+voiced] / # C* _ [V,+back]", &["pta", "ta", "ppti", "apta"]);
        check("l: V -> [-back] / [V,-back] C* _", &["iptpa", "apa", "ipipa", "ia"]);
        check("h: V -> [@a back] / [@a back] C* _", &["apti", "iptpa", "aipa"]);
    }

    #[test]
    fn unsupported_rules() {
        let inv = inv();
        let r = parse_rule("r: V -> [@a back] / _ C* [@a back]", &inv).unwrap();
        assert!(matches!(compile_rule(&r, &inv), Err(FstError::UnsupportedRule { .. })));
        let r = parse_rule("r: [C, @a voiced] -> [-voiced]", &inv).unwrap();
        assert!(matches!(compile_rule(&r, &inv), Err(FstError::UnsupportedRule { .. })));
    }

    #[test]
    fn stray_changes_reject() {
        let inv = inv();
        let r = parse_rule("[C] -> [+syllabic]", &inv).unwrap();
        let t = compile_rule(&r, &inv).unwrap();
        assert_eq!(t.transduce(&[4]).unwrap(), [4]);
        assert_eq!(t.transduce(&[0]), Err(FstError::NoAccept));
    }
}
