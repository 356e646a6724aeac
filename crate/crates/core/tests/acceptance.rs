//! Acceptance criteria. Each prints one PASS/FAIL line with its timing;
//! the test fails if any criterion does.

use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use phonokit::autoseg::{
    apply_hts, interval_census, parse_tracks, render_pitch, tone_intervals, tones_of_chart, transcribe_pitch, Chart,
    SyllableTones, Tone, ToneString,
};
use phonokit::fstc::{compile_rule, compose, transduce_sequence};
use phonokit::inventory::{FeatureBundle, FeatureValue, Inventory, SegId};
use phonokit::prosody::{build_moraic, build_onset_rhyme, syllabify, weight, Syllable, SyllableCanon, Weight};
use phonokit::rewrite::{apply_cascade, apply_rule, parse_rules, RewriteRule};
use phonokit::workbench::{run_corpus, Dataset, Status};

const INSTANCES: usize = 10_000;

fn path(rel: &str) -> PathBuf {
    [env!("CARGO_MANIFEST_DIR"), "data", rel].iter().collect()
}

fn data(rel: &str) -> String {
    fs::read_to_string(path(rel)).unwrap()
}

fn load(inv: &str, rules: &str) -> (Inventory, Vec<RewriteRule>) {
    let inv = Inventory::parse(&data(&format!("inventories/{inv}.inv"))).unwrap();
    let rules = parse_rules(&data(&format!("rules/{rules}.rules")), &inv).unwrap().0;
    (inv, rules)
}

/// Outcome of one criterion: failures found, and a short summary.
type Outcome = Result<String, String>;

fn check(failures: &mut Vec<String>, cond: bool, what: impl FnOnce() -> String) {
    if !cond {
        failures.push(what());
    }
}

fn finish(failures: Vec<String>, summary: String) -> Outcome {
    if failures.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{summary}; {}", failures.into_iter().take(5).collect::<Vec<_>>().join("; ")))
    }
}

fn russian_paradigm() -> Outcome {
    let r = run_corpus(&Dataset::load(&path("datasets/russian.toml")).unwrap());
    let mut fails = Vec::new();
    for affix in ["none", "-u", "class:a=a,y=y"] {
        let rows: Vec<_> = r.rows.iter().filter(|row| row.id.ends_with(&format!(" {affix}"))).collect();
        let ok = rows.iter().filter(|row| row.status == Status::Match).count();
        check(&mut fails, (rows.len(), ok) == (12, 12), || format!("{affix}: {ok}/{}", rows.len()));
    }
    for row in r.rows.iter().filter(|row| row.status != Status::Match) {
        fails.push(format!("{}: {:?}", row.id, row.status));
    }
    finish(fails, format!("{}/{} exact", r.matches(), r.total()))
}

fn turkish_harmony() -> Outcome {
    let (inv, rules) = load("turkish", "turkish");
    let printed = [
        ("ip", "ipin"),
        ("kız", "kızın"),
        ("yüz", "yüzün"),
        ("pul", "pulun"),
        ("el", "elin"),
        ("çan", "çanın"),
        ("köy", "köyün"),
        ("son", "sonun"),
    ];
    let mut fails = Vec::new();
    let mut ok = 0;
    for (stem, want) in printed {
        let w = inv.tokenize(&format!("{stem}In")).unwrap();
        let got = inv.spell(&apply_cascade(&rules, &w, &inv).unwrap().0);
        if got == want {
            ok += 1;
        } else {
            fails.push(format!("{stem}In -> {got}, expected {want}"));
        }
    }
    finish(fails, format!("{ok}/8 exact"))
}

/// Tone labels with the syllables they sit on; floating tones in
/// parentheses.
fn layout(c: &Chart) -> String {
    let (syl, tone) = (c.tier("syl").unwrap(), c.tier("tone").unwrap());
    let mut out = Vec::new();
    for (k, label) in c.tiers[tone].labels.iter().enumerate() {
        let on: Vec<&str> = (0..c.tiers[syl].labels.len())
            .filter(|&s| c.linked(syl, s, tone).contains(&k))
            .map(|s| c.tiers[syl].labels[s].as_str())
            .collect();
        out.push(if on.is_empty() { format!("({label})") } else { format!("{label}:{}", on.join("+")) });
    }
    out.join(" ")
}

fn chakosi_derivations() -> Outcome {
    let mut fails = Vec::new();
    // Columns B, D, E, F: spread layout and resulting transcription.
    let frames = [
        ("his-iron", "H:i+bu (L) H:lɑ L:li", "H.H.!H.L"),
        ("one-iron", "L:bu H:lɑ+li (L) L:kũ", "L.H.H.L"),
        ("your-iron", "H:am L:am L:bu H:lɑ+li (L) H:wo L:dɔ", "HL.L.H.H.!H.L"),
        ("that-iron", "L:jii H:ni+bu (L) H:lɑ+li (L) L:ni", "L.H.H.!H.H.L"),
    ];
    let mut transcriptions = Vec::new();
    for (name, want_layout, want_tones) in frames {
        let c = Chart::parse(&data(&format!("charts/{name}.chart"))).unwrap();
        let out = apply_hts(&c).unwrap();
        check(&mut fails, layout(&out) == want_layout, || format!("{name}: {}", layout(&out)));
        let t = tones_of_chart(&out).unwrap();
        check(&mut fails, t.to_string() == want_tones, || format!("{name}: {t}"));
        transcriptions.push((name, t));
    }
    // Isolation form, and the contour row from an explicit HL on `am`.
    let iso = Chart::associate_melody(&["bu", "lɑ", "li"], &[Tone::L, Tone::H, Tone::L]).unwrap();
    transcriptions.insert(0, ("isolation", tones_of_chart(&apply_hts(&iso).unwrap()).unwrap()));
    let contour = Chart::associate_explicit(
        &["am", "go", "ro", "bu", "lɑ", "li"],
        &[Tone::H, Tone::L, Tone::L, Tone::L, Tone::L, Tone::H, Tone::L],
        &[(0, 0), (0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6)],
    )
    .unwrap();
    transcriptions.insert(2, ("brother's", tones_of_chart(&apply_hts(&contour).unwrap()).unwrap()));
    let rows = [
        ("L.H.L", "2 3 1"),
        ("H.H.!H.L", "3 3 2 0"),
        ("HL.L.L.L.H.L", "3-1 1 1 1 2 0"),
        ("L.H.H.L", "2 3 3 1"),
        ("HL.L.H.H.!H.L", "4-2 2 3 3 2 0"),
        ("L.H.H.!H.H.L", "2 3 3 2 2 0"),
    ];
    for ((name, t), (tones, pitch)) in transcriptions.iter().zip(rows) {
        check(&mut fails, t.to_string() == tones, || format!("{name}: {t}, expected {tones}"));
        let bare: ToneString = t.to_string().parse().unwrap();
        let p = render_pitch(&bare).unwrap().to_string();
        check(&mut fails, p == pitch, || format!("{name}: pitch {p}, expected {pitch}"));
    }
    finish(fails, "4 charts, 6 transcriptions, 6 pitch rows".into())
}

fn interval_census_counts() -> Outcome {
    let records = parse_tracks(&data("pitch/chakosi.tracks")).unwrap();
    let c = interval_census(records.iter().filter_map(|r| r.track.as_ref()));
    let got: Vec<(i32, usize)> = c.counts.iter().map(|(&k, &n)| (k, n)).collect();
    let want = [(-2, 63), (-1, 8), (1, 39), (2, 3)];
    let summary = got.iter().map(|(k, n)| format!("{k:+}:{n}")).collect::<Vec<_>>().join(" ");
    finish(
        if got == want { vec![] } else { vec!["counts differ".into()] },
        format!("{summary} over {} tracks", c.tracks),
    )
}

fn ulwa_infixation() -> Outcome {
    let r = run_corpus(&Dataset::load(&path("datasets/ulwa.toml")).unwrap());
    let fails = r
        .rows
        .iter()
        .filter(|row| row.status != Status::Match)
        .map(|row| format!("{}: {:?}", row.id, row.status))
        .collect();
    finish(fails, format!("{}/{} exact", r.matches(), r.total()))
}

fn all_words(n: usize, max: usize) -> Vec<Vec<SegId>> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<SegId>> = vec![Vec::new()];
    for _ in 0..max {
        layer = layer.iter().flat_map(|w| (0..n).map(move |a| [w.clone(), vec![SegId(a)]].concat())).collect();
        out.extend(layer.iter().cloned());
    }
    out
}

fn fst_equivalence() -> Outcome {
    let mut fails = Vec::new();
    let (inv, rules) = load("fst-test", "fst-test");
    let words = all_words(inv.len(), 5);
    check(&mut fails, words.len() == 9330, || format!("{} words", words.len()));
    for r in &rules {
        let t = compile_rule(r, &inv).unwrap();
        for w in &words {
            let want = apply_rule(r, w, &inv).unwrap().0;
            let got = transduce_sequence(std::slice::from_ref(&t), w);
            check(&mut fails, got.as_ref() == Ok(&want), || format!("{} on {}", r.name, inv.spell(w)));
        }
    }
    let (tr, rules) = load("turkish", "turkish-devoicing");
    let both = compose(&compile_rule(&rules[0], &tr).unwrap(), &compile_rule(&rules[1], &tr).unwrap()).unwrap();
    let v = tr.macro_bundle("V").unwrap().clone();
    let vowels: Vec<SegId> = tr.ids().filter(|&s| tr.matches(&v, s).unwrap() && tr.symbol(s) != "I").collect();
    let consonants: Vec<SegId> = tr.ids().filter(|&s| !tr.matches(&v, s).unwrap()).collect();
    let suffix = tr.tokenize("In").unwrap();
    let mut n = 0;
    for &c1 in &consonants {
        for &vw in &vowels {
            for &c2 in &consonants {
                let w = [vec![c1, vw, c2], suffix.clone()].concat();
                let want = apply_cascade(&rules, &w, &tr).unwrap().0;
                let got = transduce_sequence(std::slice::from_ref(&both), &w);
                check(&mut fails, got.as_ref() == Ok(&want), || format!("composed on {}", tr.spell(&w)));
                n += 1;
            }
        }
    }
    finish(fails, format!("{} exhaustive, {n} Turkish CVC+In", words.len() * 2))
}

/// Bundles over `n` features with at most two specified values.
fn small_bundles(n: usize) -> Vec<FeatureBundle> {
    let values = [FeatureValue::Plus, FeatureValue::Minus];
    let mut out = vec![FeatureBundle::new()];
    for f in 0..n {
        for v in values {
            out.push(FeatureBundle::from_pairs([(f, v)]));
            for g in f + 1..n {
                for w in values {
                    out.push(FeatureBundle::from_pairs([(f, v), (g, w)]));
                }
            }
        }
    }
    out
}

fn random_chart(rng: &mut ChaCha8Rng) -> Chart {
    let n = rng.gen_range(1..8);
    let m = rng.gen_range(1..8);
    let melody: Vec<Tone> = (0..m).map(|_| if rng.gen() { Tone::H } else { Tone::L }).collect();
    let (mut s, mut t) = (0, 0);
    let mut links = vec![(0, 0)];
    while s < n - 1 || t < m - 1 {
        match rng.gen_range(0..3) {
            0 if s < n - 1 => s += 1,
            1 if t < m - 1 => t += 1,
            _ => {
                s = (s + 1).min(n - 1);
                t = (t + 1).min(m - 1);
            }
        }
        links.push((s, t));
    }
    let all = links.clone();
    for link in all {
        if rng.gen_bool(0.3) && links.iter().filter(|l| l.0 == link.0).count() > 1 {
            links.retain(|l| *l != link);
        }
    }
    let names: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let syls: Vec<&str> = names.iter().map(String::as_str).collect();
    Chart::associate_explicit(&syls, &melody, &links).unwrap()
}

fn random_tones(rng: &mut ChaCha8Rng) -> ToneString {
    let mut out = Vec::new();
    let mut prev = None;
    for _ in 0..rng.gen_range(1..9) {
        let tones = match rng.gen_range(0..6) {
            0 => vec![Tone::H, Tone::L],
            1 => vec![Tone::L, Tone::H],
            k => vec![if k % 2 == 0 { Tone::H } else { Tone::L }],
        };
        let downstep = tones[0] == Tone::H && prev == Some(Tone::H) && rng.gen();
        prev = tones.last().copied();
        out.push(SyllableTones { text: String::new(), tones, downstep });
    }
    ToneString::new(out).unwrap()
}

fn random_ulwa(rng: &mut ChaCha8Rng, canon: &SyllableCanon) -> Vec<SegId> {
    let inv = &canon.inventory;
    let vowels: Vec<SegId> = inv.ids().filter(|&s| canon.is_vowel(s)).collect();
    let consonants: Vec<SegId> = inv.ids().filter(|&s| !canon.is_vowel(s)).collect();
    let shapes: Vec<&String> = canon.shapes.iter().collect();
    let mut w = Vec::new();
    for _ in 0..rng.gen_range(1..6) {
        for k in shapes[rng.gen_range(0..shapes.len())].chars() {
            let pool = if k == 'V' { &vowels } else { &consonants };
            w.push(pool[rng.gen_range(0..pool.len())]);
        }
    }
    w
}

fn property_suites() -> Outcome {
    let mut fails = Vec::new();
    let ex1 = Inventory::parse(&data("inventories/ex1.inv")).unwrap();
    let bundles = small_bundles(ex1.feature_names().len());
    check(&mut fails, bundles.len() == 289, || format!("{} bundles", bundles.len()));
    // Independent class computation straight from the feature matrix.
    let oracle = |b: &FeatureBundle| -> BTreeSet<SegId> {
        ex1.ids().filter(|&s| b.iter().all(|(f, v)| ex1.segment(s).features.get(f) == v)).collect()
    };
    for b in &bundles {
        let class: BTreeSet<SegId> = ex1.natural_class(b).unwrap().into_iter().collect();
        check(&mut fails, class == oracle(b), || format!("class of {}", ex1.show_bundle(b)));
        for bigger in bundles.iter().filter(|x| b.is_subset_of(x)) {
            check(&mut fails, oracle(bigger).is_subset(&class), || format!("monotonicity at {}", ex1.show_bundle(b)));
        }
        if !class.is_empty() {
            let target: Vec<SegId> = class.iter().copied().collect();
            for d in ex1.describe_class(&target).unwrap() {
                check(&mut fails, oracle(&d) == class && d.len() <= b.len(), || {
                    format!("describe {}", ex1.show_bundle(b))
                });
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..INSTANCES {
        let c = random_chart(&mut rng);
        let ok = c.validate().unwrap().is_empty()
            && apply_hts(&c).is_ok_and(|out| out.validate().unwrap().is_empty() && out.tiers == c.tiers);
        check(&mut fails, ok, || format!("hts on\n{c}"));
    }
    let mut round_trips = 0;
    for _ in 0..INSTANCES {
        let t = random_tones(&mut rng);
        let Ok(p) = render_pitch(&t) else { continue };
        check(&mut fails, p.differences() == tone_intervals(&t), || format!("intervals of {t}"));
        if tone_intervals(&t).iter().any(|&d| d != 0) {
            round_trips += 1;
            check(&mut fails, transcribe_pitch(&p).as_ref() == Ok(&t), || format!("round trip of {t}"));
        }
    }
    check(&mut fails, round_trips >= INSTANCES / 2, || format!("only {round_trips} round trips"));

    let canon = SyllableCanon::load(&path("canons/ulwa.canon")).unwrap();
    for _ in 0..INSTANCES {
        let w = random_ulwa(&mut rng, &canon);
        let Ok(sylls) = syllabify(&w, &canon) else {
            fails.push(format!("cannot syllabify {}", canon.inventory.spell(&w)));
            continue;
        };
        let joined: Vec<SegId> = sylls.iter().flat_map(Syllable::segments).collect();
        check(&mut fails, joined == w, || format!("reconstruction of {}", canon.inventory.spell(&w)));
        for s in &sylls {
            let heavy = weight(s) == Weight::Heavy;
            let (a, b) = (build_onset_rhyme(s), build_moraic(s));
            check(&mut fails, a.is_heavy() == heavy && b.is_heavy() == heavy, || {
                format!("weight of {}", s.spell(&canon.inventory))
            });
        }
    }
    finish(fails, format!("289 bundles; {INSTANCES} charts, {round_trips} tone round trips, {INSTANCES} Ulwa words"))
}

fn syllable_models() -> Outcome {
    let canon = SyllableCanon::load(&path("canons/ulwa.canon")).unwrap();
    let inv = &canon.inventory;
    let diagrams = [
        ("ka", "σ[O[k] R[N[a]]]", "σ[k μ[a]]"),
        ("kah", "σ[O[k] R[N[a] C[h]]]", "σ[k μ[a] μ[h]]"),
        ("kaa", "σ[O[k] R[N[a a]]]", "σ[k μ[a] μ[a]]"),
        ("muih", "σ[O[m] R[N[u i] C[h]]]", "σ[m μ[u] μ[i h]]"),
        ("bilh", "σ[O[b] R[N[i] C[l h]]]", "σ[b μ[i] μ[l h]]"),
        ("ii", "σ[R[N[i i]]]", "σ[μ[i] μ[i]]"),
        ("on", "σ[R[N[o] C[n]]]", "σ[μ[o] μ[n]]"),
    ];
    let mut fails = Vec::new();
    for (w, or, mo) in diagrams {
        let sylls = syllabify(&inv.tokenize(w).unwrap(), &canon).unwrap();
        check(&mut fails, sylls.len() == 1, || format!("{w}: {} syllables", sylls.len()));
        let s = &sylls[0];
        let (a, b) = (build_onset_rhyme(s), build_moraic(s));
        check(&mut fails, a.render(inv) == or, || format!("{w}: {}", a.render(inv)));
        check(&mut fails, b.render(inv) == mo, || format!("{w}: {}", b.render(inv)));
        let heavy = weight(s) == Weight::Heavy;
        check(&mut fails, a.is_heavy() == heavy && b.is_heavy() == heavy && b.moras() == 1 + heavy as usize, || {
            format!("{w}: weight disagreement")
        });
    }
    finish(fails, "7 onset-rhyme and 7 moraic diagrams".into())
}

#[test]
fn acceptance() {
    type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);
    let criteria: [Criterion; 8] = [
        ("1 Russian paradigm 36/36", russian_paradigm, Some(Duration::from_secs(1))),
        ("2 Turkish harmony 8/8", turkish_harmony, Some(Duration::from_secs(1))),
        ("3 Chakosi derivations", chakosi_derivations, Some(Duration::from_secs(1))),
        ("4 interval census", interval_census_counts, Some(Duration::from_secs(1))),
        ("5 Ulwa infixation 18/18", ulwa_infixation, Some(Duration::from_secs(1))),
        ("6 FST equivalence", fst_equivalence, Some(Duration::from_secs(60))),
        ("7 property suites", property_suites, Some(Duration::from_secs(120))),
        ("8 syllable model fidelity", syllable_models, None),
    ];
    let mut failed = Vec::new();
    for (name, run, limit) in criteria {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let slow = limit.is_some_and(|l| took >= l);
        let (verdict, detail) = match (&outcome, slow) {
            (Ok(s), false) => ("PASS", s.clone()),
            (Ok(s), true) => ("FAIL", format!("{s}; over the {:?} limit", limit.unwrap())),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        println!("{verdict} criterion {name}: {detail} [{:.3}s]", took.as_secs_f64());
        if verdict == "FAIL" {
            failed.push(name);
        }
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}
