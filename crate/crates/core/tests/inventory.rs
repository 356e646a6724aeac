use std::collections::BTreeMap;
use std::path::PathBuf;

use phonokit::inventory::{FeatureBundle, FeatureValue, Inventory, InventoryError, SegId};
use proptest::prelude::*;

fn inv(name: &str) -> Inventory {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "data", "inventories", &format!("{name}.inv")].iter().collect();
    Inventory::parse(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn bundle(inv: &Inventory, text: &str) -> FeatureBundle {
    inv.parse_bundle(text).unwrap()
}

fn symbols(inv: &Inventory, ids: &[SegId]) -> Vec<String> {
    ids.iter().map(|&s| inv.symbol(s).to_string()).collect()
}

#[test]
fn natural_classes() {
    let ex1 = inv("ex1");
    assert_eq!(symbols(&ex1, &ex1.natural_class(&bundle(&ex1, "[-sonorant]")).unwrap()), ["t", "z"]);
    assert_eq!(ex1.natural_class(&FeatureBundle::new()).unwrap().len(), 5);
    let ru = inv("russian");
    let labial_stops = ru.natural_class(&bundle(&ru, "[+labial,-continuant]")).unwrap();
    assert_eq!(symbols(&ru, &labial_stops), ["p", "b", "m"]);
    let m = ex1.lookup("m").unwrap();
    assert!(ex1.matches(&bundle(&ex1, "[+nasal]"), m).unwrap());
    let tr = inv("turkish");
    let arch = tr.lookup("I").unwrap();
    assert!(tr.matches(&bundle(&tr, "[+high]"), arch).unwrap());
    assert!(!tr.matches(&bundle(&tr, "[+back]"), arch).unwrap());
    assert!(!tr.matches(&bundle(&tr, "[-back]"), arch).unwrap());
}

/// Every bundle over the ex1 features, grouped by the class it picks out,
/// keeping the smallest bundles for each class.
fn oracle(inv: &Inventory) -> BTreeMap<Vec<SegId>, Vec<FeatureBundle>> {
    let n = inv.feature_names().len();
    let mut best: BTreeMap<Vec<SegId>, Vec<FeatureBundle>> = BTreeMap::new();
    for code in 0..3usize.pow(n as u32) {
        let mut b = FeatureBundle::new();
        let mut c = code;
        for f in 0..n {
            match c % 3 {
                1 => b.set(f, FeatureValue::Plus),
                2 => b.set(f, FeatureValue::Minus),
                _ => {}
            }
            c /= 3;
        }
        let class: Vec<SegId> =
            inv.ids().filter(|&s| b.iter().all(|(f, v)| inv.segment(s).features.get(f) == v)).collect();
        let entry = best.entry(class).or_default();
        match entry.first().map(FeatureBundle::len) {
            Some(len) if len < b.len() => {}
            Some(len) if len == b.len() => entry.push(b),
            _ => *entry = vec![b],
        }
    }
    best
}

#[test]
fn describe_class_matches_brute_force() {
    let ex1 = inv("ex1");
    let best = oracle(&ex1);
    for mask in 0u32..32 {
        let target: Vec<SegId> = (0..5).filter(|i| mask & (1 << i) != 0).map(SegId).collect();
        let got = ex1.describe_class(&target);
        match best.get(&target) {
            Some(want) => {
                let mut want = want.clone();
                want.sort();
                let mut got = got.unwrap();
                got.sort();
                assert_eq!(got, want, "{:?}", symbols(&ex1, &target));
            }
            None => assert_eq!(got, Err(InventoryError::NotNatural), "{:?}", symbols(&ex1, &target)),
        }
    }
    let tz = [ex1.lookup("t").unwrap(), ex1.lookup("z").unwrap()];
    assert_eq!(ex1.describe_class(&tz).unwrap(), [bundle(&ex1, "[-sonorant]")]);
    let m = [ex1.lookup("m").unwrap()];
    assert_eq!(ex1.describe_class(&m).unwrap(), [bundle(&ex1, "[+labial]"), bundle(&ex1, "[+nasal]")]);
    let all: Vec<SegId> = ex1.ids().collect();
    assert_eq!(ex1.describe_class(&all).unwrap(), [FeatureBundle::new()]);
}

#[test]
fn similarity() {
    let ex1 = inv("ex1");
    let s = |a: &str, b: &str| ex1.similarity(ex1.lookup(a).unwrap(), ex1.lookup(b).unwrap()).unwrap();
    assert_eq!(s("t", "z"), 9);
    assert_eq!(s("t", "t"), 12);
    // t and i agree on labial, distributed, lateral, nasal and strident.
    assert_eq!(s("t", "i"), 5);
    for a in ex1.ids() {
        for b in ex1.ids() {
            assert_eq!(ex1.similarity(a, b), ex1.similarity(b, a));
        }
    }
    let tr = inv("turkish");
    assert!(matches!(
        tr.similarity(tr.lookup("I").unwrap(), tr.lookup("i").unwrap()),
        Err(InventoryError::PartiallySpecified(_))
    ));
}

#[test]
fn tokenization() {
    let ru = inv("russian");
    assert_eq!(ru.spell_with(&ru.tokenize("prud").unwrap(), " "), "p r u d");
    assert_eq!(ru.tokenize("prux!"), Err(InventoryError::UnknownSymbol(4)));
    assert_eq!(ru.tokenize("#pru.d#").unwrap(), ru.tokenize("prud").unwrap());
    assert!(ru.tokenize("pr#ud").is_err());
    let asp = Inventory::parse("features: a\nsegment t +\nsegment tʰ -\nsegment e +\nsegment n +\n").unwrap();
    assert_eq!(asp.spell_with(&asp.tokenize("tʰen").unwrap(), " "), "tʰ e n");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn tokenize_inverts_spelling(word in prop::collection::vec(any::<prop::sample::Index>(), 0..12), name in prop::sample::select(vec!["russian", "turkish", "ulwa", "dschang", "english"])) {
        let inv = inv(name);
        let word: Vec<SegId> = word.iter().map(|i| SegId(i.index(inv.len()))).collect();
        let text = inv.spell(&word);
        // Longest match may split differently only when the spelling is
        // itself ambiguous; re-spelling always gives the same text.
        let back = inv.tokenize(&text).unwrap();
        prop_assert_eq!(inv.spell(&back), text);
        let dotted = inv.spell_with(&word, ".");
        prop_assert_eq!(inv.tokenize(&dotted).unwrap(), word);
    }

    #[test]
    fn more_features_pick_out_fewer_segments(code in 0usize..3usize.pow(12), extra in 0usize..12, plus in any::<bool>()) {
        let ex1 = inv("ex1");
        let mut b = FeatureBundle::new();
        let mut c = code;
        for f in 0..12 {
            match c % 3 {
                1 => b.set(f, FeatureValue::Plus),
                2 => b.set(f, FeatureValue::Minus),
                _ => {}
            }
            c /= 3;
        }
        let mut bigger = b.clone();
        bigger.set(extra, if plus { FeatureValue::Plus } else { FeatureValue::Minus });
        let small = ex1.natural_class(&bigger).unwrap();
        let large = ex1.natural_class(&b).unwrap();
        if b.is_subset_of(&bigger) {
            prop_assert!(small.iter().all(|s| large.contains(s)));
        }
        if !large.is_empty() {
            let found = ex1.describe_class(&large).unwrap();
            prop_assert!(!found.is_empty());
            for d in found {
                prop_assert!(d.len() <= b.len());
                prop_assert_eq!(ex1.natural_class(&d).unwrap(), large.clone());
            }
        }
    }
}
