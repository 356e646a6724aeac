use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use phonokit::autoseg::{
    apply_hts, interval_census, parse_tracks, render_pitch, tones_of_chart, transcribe_pitch, Chart, ToneError,
};
use phonokit::fstc::{compile_cascade, compile_rule, transduce_sequence, FstError, Transducer};
use phonokit::inventory::{Inventory, InventoryError};
use phonokit::prosody::{
    build_moraic, build_onset_rhyme, infix_possessive, syllabify, weight, ProsodyError, SyllableCanon,
};
use phonokit::rewrite::{
    apply_cascade, derive, parse_lexicon, parse_rules, AffixSpec, ApplyError, RewriteRule, RuleError,
};
use phonokit::workbench::{data_dir, dataset_ids, export_chart, export_syllables, run_corpus, Dataset, WorkbenchError};

#[derive(Parser)]
#[command(name = "phonokit", version, about = "Computational phonology workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the segments picked out by a feature bundle.
    Class {
        #[arg(long)]
        inventory: PathBuf,
        #[arg(long)]
        bundle: String,
    },
    /// Run a rule cascade over one word.
    Apply {
        #[arg(long)]
        inventory: PathBuf,
        #[arg(long)]
        rules: PathBuf,
        #[arg(long)]
        word: String,
        #[arg(long)]
        trace: bool,
    },
    /// Derive every lexeme of a lexicon with an affix.
    Derive {
        #[arg(long)]
        inventory: PathBuf,
        #[arg(long)]
        rules: PathBuf,
        #[arg(long)]
        lexicon: PathBuf,
        /// `none`, `-SEGS` or `class:y=y,a=a`.
        #[arg(long, default_value = "none")]
        affix: String,
    },
    /// Autosegmental tone charts.
    Chart {
        action: ChartAction,
        #[arg(long)]
        chart: PathBuf,
    },
    /// Pitch tracks.
    Pitch {
        action: PitchAction,
        #[arg(long)]
        tracks: PathBuf,
    },
    /// Split a word into syllables and draw their trees.
    Syllabify {
        /// Overrides the inventory named in the canon file.
        #[arg(long)]
        inventory: Option<PathBuf>,
        #[arg(long)]
        canon: PathBuf,
        #[arg(long)]
        word: String,
        #[arg(long, value_enum, default_value_t = ModelArg::OnsetRhyme)]
        model: ModelArg,
    },
    /// Insert the possessive infix after the first metrical syllable.
    Infix {
        #[arg(long)]
        canon: PathBuf,
        #[arg(long)]
        word: String,
        #[arg(long, default_value = "ka")]
        infix: String,
    },
    /// Compile rules into transducers and run them.
    Fst {
        action: FstAction,
        #[arg(long)]
        inventory: PathBuf,
        #[arg(long)]
        rules: Option<PathBuf>,
        /// Which rule to compile; needed when the file has several.
        #[arg(long)]
        rule: Option<String>,
        /// A saved transducer to run instead of compiling rules.
        #[arg(long)]
        fst: Option<PathBuf>,
        #[arg(long)]
        word: Option<String>,
        /// Run one transducer per rule instead of their composition.
        #[arg(long)]
        sequential: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check datasets against their analyses.
    Corpus {
        action: CorpusAction,
        /// Manifest path or the id of a shipped dataset.
        #[arg(long)]
        dataset: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Attribute-value matrix export.
    Avm {
        action: AvmAction,
        #[arg(long, conflicts_with = "syllable")]
        chart: Option<PathBuf>,
        /// Apply high tone spread before exporting the chart.
        #[arg(long)]
        spread: bool,
        #[arg(long, required_unless_present = "chart")]
        syllable: Option<String>,
        /// Canon for --syllable; defaults to the shipped English canon.
        #[arg(long)]
        canon: Option<PathBuf>,
        /// Give each syllable its own consonants.
        #[arg(long)]
        no_share: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ChartAction {
    Validate,
    Spread,
    Tones,
    Render,
}

#[derive(Clone, Copy, ValueEnum)]
enum PitchAction {
    Transcribe,
    Census,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    OnsetRhyme,
    Moraic,
}

#[derive(Clone, Copy, ValueEnum)]
enum FstAction {
    Compile,
    Compose,
    Run,
}

#[derive(Clone, Copy, ValueEnum)]
enum CorpusAction {
    Run,
    List,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Tsv,
}

#[derive(Clone, Copy, ValueEnum)]
enum AvmAction {
    Export,
}

// Write errors (a closed pipe, say) are ignored rather than panicking.
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = write!(std::io::stdout(), $($t)*);
    }};
}

macro_rules! outln {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

const MISMATCH: u8 = 1;
const PARSE: u8 = 2;
const INVALID: u8 = 3;

struct Failure {
    code: u8,
    msg: String,
}

type Result<T> = std::result::Result<T, Failure>;

fn parse_err(e: impl Display) -> Failure {
    Failure { code: PARSE, msg: e.to_string() }
}

fn invalid(e: impl Display) -> Failure {
    Failure { code: INVALID, msg: e.to_string() }
}

/// Exit code for a library error: malformed input is a parse error,
/// anything else a validation error.
trait Code: Display + Sized {
    fn code(&self) -> u8;

    fn fail(self) -> Failure {
        Failure { code: self.code(), msg: self.to_string() }
    }
}

impl Code for InventoryError {
    fn code(&self) -> u8 {
        match self {
            InventoryError::NotNatural | InventoryError::PartiallySpecified(_) => INVALID,
            _ => PARSE,
        }
    }
}

impl Code for RuleError {
    fn code(&self) -> u8 {
        PARSE
    }
}

impl Code for ApplyError {
    fn code(&self) -> u8 {
        INVALID
    }
}

impl Code for ToneError {
    fn code(&self) -> u8 {
        match self {
            ToneError::Parse { .. } | ToneError::BadTone(_) | ToneError::BadPitch(_) => PARSE,
            _ => INVALID,
        }
    }
}

impl Code for ProsodyError {
    fn code(&self) -> u8 {
        match self {
            ProsodyError::Parse { .. } => PARSE,
            ProsodyError::Unsyllabifiable(_) => INVALID,
        }
    }
}

impl Code for FstError {
    fn code(&self) -> u8 {
        match self {
            FstError::Parse { .. } | FstError::UnknownSymbol(_) | FstError::Inventory(_) => PARSE,
            _ => INVALID,
        }
    }
}

impl Code for WorkbenchError {
    fn code(&self) -> u8 {
        PARSE
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| parse_err(format!("{}: {e}", path.display())))
}

fn load_inventory(path: &Path) -> Result<Inventory> {
    Inventory::parse(&read(path)?).map_err(|e| Failure { code: e.code(), msg: format!("{}: {e}", path.display()) })
}

fn load_rules(path: &Path, inv: &Inventory) -> Result<Vec<RewriteRule>> {
    let (rules, lints) = parse_rules(&read(path)?, inv)
        .map_err(|e| Failure { code: e.code(), msg: format!("{}: {e}", path.display()) })?;
    for l in lints {
        eprintln!("warning: rule `{}`: {}", l.rule, l.message);
    }
    Ok(rules)
}

fn load_canon(path: &Path, inventory: Option<&Path>) -> Result<SyllableCanon> {
    let with_path = |e: ProsodyError| Failure { code: e.code(), msg: format!("{}: {e}", path.display()) };
    match inventory {
        Some(inv) => SyllableCanon::parse(&read(path)?, load_inventory(inv)?).map_err(with_path),
        None => SyllableCanon::load(path).map_err(with_path),
    }
}

fn tokenize(inv: &Inventory, word: &str) -> Result<Vec<phonokit::inventory::SegId>> {
    inv.tokenize(word).map_err(|e| parse_err(format!("`{word}`: {e}")))
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| invalid(format!("{}: {e}", p.display()))),
        None => {
            out!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Class { inventory, bundle } => {
            let inv = load_inventory(&inventory)?;
            let b = inv.parse_bundle(&bundle).map_err(Code::fail)?;
            let class = inv.natural_class(&b).map_err(Code::fail)?;
            outln!("{}", inv.spell_with(&class, " "));
        }
        Command::Apply { inventory, rules, word, trace } => {
            let inv = load_inventory(&inventory)?;
            let rules = load_rules(&rules, &inv)?;
            let (out, d) = apply_cascade(&rules, &tokenize(&inv, &word)?, &inv).map_err(Code::fail)?;
            if trace {
                out!("{}", d.render(&inv));
            }
            outln!("{}", inv.spell(&out));
        }
        Command::Derive { inventory, rules, lexicon, affix } => {
            let inv = load_inventory(&inventory)?;
            let rules = load_rules(&rules, &inv)?;
            let lexicon = parse_lexicon(&read(&lexicon)?, &inv).map_err(Code::fail)?;
            let affix = AffixSpec::parse(&affix, &inv).map_err(Code::fail)?;
            for lex in &lexicon {
                let (out, _) = derive(lex, &affix, &rules, &inv).map_err(Code::fail)?;
                outln!("{}\t{}\t{}", inv.spell(&lex.underlying), inv.spell(&out), lex.gloss);
            }
        }
        Command::Chart { action, chart } => {
            let c = Chart::parse(&read(&chart)?).map_err(Code::fail)?;
            let crossings = c.validate().map_err(Code::fail)?;
            if let Some((a, b)) = crossings.first() {
                return Err(ToneError::Crossing(*a, *b).fail());
            }
            match action {
                ChartAction::Validate => outln!("ok"),
                ChartAction::Spread => out!("{}", apply_hts(&c).map_err(Code::fail)?),
                ChartAction::Tones => outln!("{}", tones_of_chart(&c).map_err(Code::fail)?),
                ChartAction::Render => {
                    let t = tones_of_chart(&c).map_err(Code::fail)?;
                    outln!("{}", render_pitch(&t).map_err(Code::fail)?);
                }
            }
        }
        Command::Pitch { action, tracks } => {
            let records = parse_tracks(&read(&tracks)?).map_err(Code::fail)?;
            match action {
                PitchAction::Census => {
                    out!("{}", interval_census(records.iter().filter_map(|r| r.track.as_ref())));
                }
                PitchAction::Transcribe => {
                    let mut failed = None;
                    for r in &records {
                        match r.track.as_ref().map(transcribe_pitch) {
                            None => outln!("{}\tmissing", r.id),
                            Some(Ok(t)) => outln!("{}\t{t}", r.id),
                            Some(Err(e)) => {
                                outln!("{}\terror: {e}", r.id);
                                failed.get_or_insert(e);
                            }
                        }
                    }
                    if let Some(e) = failed {
                        return Err(e.fail());
                    }
                }
            }
        }
        Command::Syllabify { inventory, canon, word, model } => {
            let canon = load_canon(&canon, inventory.as_deref())?;
            let inv = &canon.inventory;
            let sylls = syllabify(&tokenize(inv, &word)?, &canon).map_err(Code::fail)?;
            outln!("{}", sylls.iter().map(|s| s.spell(inv)).collect::<Vec<_>>().join("."));
            for s in &sylls {
                let tree = match model {
                    ModelArg::OnsetRhyme => build_onset_rhyme(s),
                    ModelArg::Moraic => build_moraic(s),
                };
                outln!("{}\t{}", tree.render(inv), weight(s));
            }
        }
        Command::Infix { canon, word, infix } => {
            let canon = load_canon(&canon, None)?;
            let inv = &canon.inventory;
            let out = infix_possessive(&tokenize(inv, &word)?, &canon, &tokenize(inv, &infix)?).map_err(Code::fail)?;
            outln!("{}", inv.spell(&out));
        }
        Command::Fst { action, inventory, rules, rule, fst, word, sequential, out } => {
            let inv = load_inventory(&inventory)?;
            let rules = match &rules {
                Some(p) => load_rules(p, &inv)?,
                None => Vec::new(),
            };
            let need_rules =
                || if rules.is_empty() { Err(parse_err("--rules with at least one rule is required")) } else { Ok(()) };
            match action {
                FstAction::Compile => {
                    need_rules()?;
                    let r = match &rule {
                        Some(name) => rules
                            .iter()
                            .find(|r| &r.name == name)
                            .ok_or_else(|| parse_err(format!("no rule named `{name}`")))?,
                        None if rules.len() == 1 => &rules[0],
                        None => return Err(parse_err("the rule file has several rules; pick one with --rule")),
                    };
                    emit(&compile_rule(r, &inv).map_err(Code::fail)?.to_string(), out.as_deref())?;
                }
                FstAction::Compose => {
                    need_rules()?;
                    emit(&compile_cascade(&rules, &inv).map_err(Code::fail)?.to_string(), out.as_deref())?;
                }
                FstAction::Run => {
                    let word = word.ok_or_else(|| parse_err("--word is required"))?;
                    let w = tokenize(&inv, &word)?;
                    let machines = match &fst {
                        Some(p) => vec![Transducer::parse(&read(p)?).map_err(Code::fail)?],
                        None => {
                            need_rules()?;
                            if sequential {
                                rules
                                    .iter()
                                    .map(|r| compile_rule(r, &inv))
                                    .collect::<std::result::Result<_, _>>()
                                    .map_err(Code::fail)?
                            } else {
                                vec![compile_cascade(&rules, &inv).map_err(Code::fail)?]
                            }
                        }
                    };
                    if let Some(m) = machines.first() {
                        let alphabet: Vec<&str> = inv.segments().iter().map(|s| s.symbol.as_str()).collect();
                        if m.alphabet != alphabet {
                            return Err(invalid(FstError::AlphabetMismatch));
                        }
                    }
                    let result = transduce_sequence(&machines, &w).map_err(Code::fail)?;
                    emit(&format!("{}\n", inv.spell(&result)), out.as_deref())?;
                }
            }
        }
        Command::Corpus { action, dataset, format } => match action {
            CorpusAction::List => {
                for id in dataset_ids() {
                    outln!("{id}");
                }
            }
            CorpusAction::Run => {
                let name = dataset.ok_or_else(|| parse_err("--dataset is required"))?;
                let d = Dataset::open(&name).map_err(Code::fail)?;
                let report = run_corpus(&d);
                match format {
                    Format::Text => out!("{report}"),
                    Format::Tsv => out!("{}", report.to_tsv()),
                }
                if !report.all_match() {
                    return Err(Failure { code: MISMATCH, msg: report.summary() });
                }
            }
        },
        Command::Avm { action: AvmAction::Export, chart, spread, syllable, canon, no_share } => {
            if let Some(path) = chart {
                let mut c = Chart::parse(&read(&path)?).map_err(Code::fail)?;
                if let Some((a, b)) = c.validate().map_err(Code::fail)?.first() {
                    return Err(ToneError::Crossing(*a, *b).fail());
                }
                if spread {
                    c = apply_hts(&c).map_err(Code::fail)?;
                }
                outln!("{}", export_chart(&c));
            } else if let Some(word) = syllable {
                let canon_path = canon.unwrap_or_else(|| data_dir().join("canons/english.canon"));
                let canon = load_canon(&canon_path, None)?;
                let inv = &canon.inventory;
                let sylls = syllabify(&tokenize(inv, &word)?, &canon).map_err(Code::fail)?;
                let avm = export_syllables(&sylls, inv, !no_share);
                // A single syllable prints as its own map.
                match &avm {
                    phonokit::workbench::Avm::List(items) if items.len() == 1 => outln!("{}", items[0]),
                    _ => outln!("{avm}"),
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("phonokit: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
