use std::path::PathBuf;

use phonokit::inventory::{FeatureValue, Inventory, SegId};
use phonokit::rewrite::{
    applies_at, apply_rule, derive, parse_lexicon, parse_rule, parse_rules, AffixSpec, Lexeme, RewriteRule, RuleError,
};
use proptest::prelude::*;

fn data(rel: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "data", rel].iter().collect();
    std::fs::read_to_string(&p).unwrap()
}

fn load(inv: &str, rules: &str) -> (Inventory, Vec<RewriteRule>) {
    let inv = Inventory::parse(&data(&format!("inventories/{inv}.inv"))).unwrap();
    let rules = parse_rules(&data(&format!("rules/{rules}.rules")), &inv).unwrap().0;
    (inv, rules)
}

fn apply(r: &RewriteRule, inv: &Inventory, w: &str) -> String {
    inv.spell(&apply_rule(r, &inv.tokenize(w).unwrap(), inv).unwrap().0)
}

#[test]
fn rule_examples() {
    let (ru, rules) = load("russian", "russian");
    let devoice = &rules[0];
    assert_eq!(apply(devoice, &ru, "prud"), "prut");
    assert_eq!(apply(devoice, &ru, "prudu"), "prudu");
    let (_, v) = load("russian", "russian-voicing");
    assert_eq!(apply(&v[0], &ru, "xlepu"), "xlebu");

    let (tr, rules) = load("turkish", "turkish");
    for (w, out) in [("pulIn", "pulun"), ("ipIn", "ipin"), ("köyIn", "köyün")] {
        assert_eq!(apply(&rules[0], &tr, w), out);
    }
}

#[test]
fn parse_errors_and_round_trip() {
    let (tr, rules) = load("turkish", "turkish");
    let h = &rules[0];
    assert_eq!(h.vars().len(), 2);
    let text = h.display(&tr).to_string();
    assert_eq!(&parse_rule(&text, &tr).unwrap(), h);
    assert!(matches!(parse_rule("[C,-voiced] -> [@a voiced] / _", &tr), Err(RuleError::UnboundAlphaVariable(_))));
    assert!(matches!(parse_rule("[C,+wobbly] -> [-voiced] / _ #", &tr), Err(RuleError::UnknownFeature(_))));
    assert!(matches!(parse_rule("[C,+voiced] -> [-voiced] / _ # V", &tr), Err(RuleError::Syntax { .. })));
}

#[test]
fn derivations_with_affixes() {
    let (ru, rules) = load("russian", "russian");
    let lexicon = parse_lexicon(&data("lexicons/russian.tsv"), &ru).unwrap();
    let lex = |w: &str| lexicon.iter().find(|l| ru.spell(&l.underlying) == w).unwrap();
    let plural = AffixSpec::parse("class:y=y,a=a", &ru).unwrap();
    let dative = AffixSpec::parse("-u", &ru).unwrap();
    let run = |l: &Lexeme, a: &AffixSpec| ru.spell(&derive(l, a, &rules, &ru).unwrap().0);
    assert_eq!(run(lex("raz"), &AffixSpec::None), "ras");
    assert_eq!(run(lex("raz"), &dative), "razu");
    assert_eq!(run(lex("raz"), &plural), "razy");
    assert_eq!(run(lex("les"), &plural), "lesa");
    let bare = Lexeme { underlying: ru.tokenize("raz").unwrap(), gloss: String::new(), morph_class: None };
    assert!(derive(&bare, &plural, &rules, &ru).is_err());
    let (_, trace) = derive(lex("raz"), &AffixSpec::None, &rules, &ru).unwrap();
    assert_eq!(trace.rules_applied(), ["devoicing"]);
}

#[test]
fn harmony_agrees_with_preceding_vowel() {
    let (tr, rules) = load("turkish", "turkish");
    let f = |n: &str| tr.feature_id(n).unwrap();
    let (high, back, round) = (f("high"), f("back"), f("round"));
    let v = tr.macro_bundle("V").unwrap().clone();
    let vowels: Vec<SegId> = tr.ids().filter(|&s| tr.matches(&v, s).unwrap() && tr.symbol(s) != "I").collect();
    let consonants: Vec<SegId> = tr.ids().filter(|&s| !tr.matches(&v, s).unwrap()).collect();
    let suffix = tr.tokenize("In").unwrap();
    for &c1 in &consonants {
        for &vw in &vowels {
            for &c2 in &consonants {
                let w = [vec![c1, vw, c2], suffix.clone()].concat();
                let (out, _) = apply_rule(&rules[0], &w, &tr).unwrap();
                let got = &tr.segment(out[3]).features;
                let want = &tr.segment(vw).features;
                assert_eq!(got.get(high), FeatureValue::Plus);
                assert_eq!((got.get(back), got.get(round)), (want.get(back), want.get(round)));
            }
        }
    }
}

#[test]
fn harmony_chains_propagate() {
    let (tr, rules) = load("turkish", "turkish");
    assert_eq!(apply(&rules[0], &tr, "pulIlIk"), "pululuk");
}

fn word(n: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0..n, 1..8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn fixpoints_are_stable_and_sound(w in word(40), pick in 0usize..3) {
        let (inv, rules) = match pick {
            0 => load("russian", "russian"),
            1 => load("russian", "russian-voicing"),
            _ => load("turkish", "turkish"),
        };
        let w: Vec<SegId> = w.into_iter().map(|i| SegId(i % inv.len())).collect();
        let r = &rules[0];
        let Ok((out, trace)) = apply_rule(r, &w, &inv) else { return Ok(()) };
        prop_assert_eq!(apply_rule(r, &out, &inv).unwrap().0, out.clone());
        let mut prev = w.clone();
        for step in &trace.steps {
            prop_assert_eq!(&step.input, &prev);
            prop_assert!(applies_at(r, &step.input, step.position, &inv).unwrap());
            prev = step.output.clone();
        }
        prop_assert_eq!(prev, out);
    }

    #[test]
    fn devoicing_touches_only_the_last_segment(w in word(40)) {
        let (inv, rules) = load("russian", "russian");
        let w: Vec<SegId> = w.into_iter().map(|i| SegId(i % inv.len())).collect();
        let (out, _) = apply_rule(&rules[0], &w, &inv).unwrap();
        prop_assert_eq!(&out[..w.len() - 1], &w[..w.len() - 1]);
    }
}
