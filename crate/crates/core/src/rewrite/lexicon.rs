use std::collections::BTreeMap;

use super::{apply_cascade, ApplyError, Derivation, RewriteRule};
use crate::inventory::{Inventory, InventoryError, SegId, Word};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexeme {
    pub underlying: Word,
    pub gloss: String,
    pub morph_class: Option<String>,
}

/// Which suffix, if any, to attach before the rules run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AffixSpec {
    None,
    Suffix(Word),
    /// Suffix chosen by the lexeme's morphological class.
    ByClass(BTreeMap<String, Word>),
}

impl AffixSpec {
    /// Parses `none`, `-SEGS` (a literal suffix) or `class:y=y,a=a`.
    pub fn parse(text: &str, inv: &Inventory) -> Result<Self, InventoryError> {
        let t = text.trim();
        if t.is_empty() || t == "none" {
            return Ok(AffixSpec::None);
        }
        if let Some(segs) = t.strip_prefix('-') {
            return Ok(AffixSpec::Suffix(inv.tokenize(segs)?));
        }
        if let Some(table) = t.strip_prefix("class:") {
            let mut out = BTreeMap::new();
            for entry in table.split(',').map(str::trim).filter(|e| !e.is_empty()) {
                let (class, segs) = entry.split_once('=').ok_or_else(|| InventoryError::Parse {
                    line: 0,
                    msg: format!("class table entry `{entry}` needs `=`"),
                })?;
                out.insert(class.trim().to_string(), inv.tokenize(segs.trim())?);
            }
            return Ok(AffixSpec::ByClass(out));
        }
        Err(InventoryError::Parse { line: 0, msg: format!("bad affix spec `{t}`") })
    }

    fn select(&self, lex: &Lexeme, inv: &Inventory) -> Result<Vec<SegId>, ApplyError> {
        match self {
            AffixSpec::None => Ok(Vec::new()),
            AffixSpec::Suffix(s) => Ok(s.clone()),
            AffixSpec::ByClass(table) => {
                let class = lex
                    .morph_class
                    .as_ref()
                    .ok_or_else(|| ApplyError::MissingMorphClass(inv.spell(&lex.underlying)))?;
                table.get(class).cloned().ok_or_else(|| ApplyError::UnknownMorphClass(class.clone()))
            }
        }
    }
}

/// Parses TSV lines `underlying<TAB>gloss<TAB>morph_class`. The class
/// column may be empty or missing. `#` in column 1 starts a comment.
pub fn parse_lexicon(text: &str, inv: &Inventory) -> Result<Vec<Lexeme>, InventoryError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
        if cols.len() > 3 {
            return Err(InventoryError::Parse { line: i + 1, msg: "too many columns".into() });
        }
        let underlying = inv
            .tokenize(cols[0])
            .map_err(|e| InventoryError::Parse { line: i + 1, msg: format!("`{}`: {e}", cols[0]) })?;
        out.push(Lexeme {
            underlying,
            gloss: cols.get(1).unwrap_or(&"").to_string(),
            morph_class: cols.get(2).filter(|c| !c.is_empty()).map(|c| c.to_string()),
        });
    }
    Ok(out)
}

/// Attaches the selected suffix and runs the cascade.
pub fn derive(
    lex: &Lexeme,
    affix: &AffixSpec,
    cascade: &[RewriteRule],
    inv: &Inventory,
) -> Result<(Word, Derivation), ApplyError> {
    let mut word = lex.underlying.clone();
    word.extend(affix.select(lex, inv)?);
    apply_cascade(cascade, &word, inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::parse_rules;

    fn russian() -> Inventory {
        Inventory::parse(include_str!("../../data/inventories/russian.inv")).unwrap()
    }

    #[test]
    fn affix_specs() {
        let inv = russian();
        assert_eq!(AffixSpec::parse("none", &inv).unwrap(), AffixSpec::None);
        assert_eq!(AffixSpec::parse("-u", &inv).unwrap(), AffixSpec::Suffix(inv.tokenize("u").unwrap()));
        let AffixSpec::ByClass(t) = AffixSpec::parse("class:y=y, a=a", &inv).unwrap() else { panic!() };
        assert_eq!(t.len(), 2);
        assert!(AffixSpec::parse("u", &inv).is_err());
        assert!(AffixSpec::parse("class:y", &inv).is_err());
    }

    #[test]
    fn derives_with_classes() {
        let inv = russian();
        let lex = parse_lexicon("raz\ttime\ty\nles\tforest\ta\nxleb\tbread\n", &inv).unwrap();
        let (rules, _) = parse_rules("final: [C,+voiced] -> [-voiced] / _ #\n", &inv).unwrap();
        let plural = AffixSpec::parse("class:y=y,a=a", &inv).unwrap();
        let form = |l: &Lexeme, a: &AffixSpec| derive(l, a, &rules, &inv).map(|(w, _)| inv.spell(&w));
        assert_eq!(form(&lex[0], &AffixSpec::None).unwrap(), "ras");
        assert_eq!(form(&lex[0], &AffixSpec::parse("-u", &inv).unwrap()).unwrap(), "razu");
        assert_eq!(form(&lex[0], &plural).unwrap(), "razy");
        assert_eq!(form(&lex[1], &plural).unwrap(), "lesa");
        assert_eq!(form(&lex[2], &plural), Err(ApplyError::MissingMorphClass("xleb".into())));
        let (_, d) = derive(&lex[0], &AffixSpec::None, &rules, &inv).unwrap();
        assert_eq!(d.rules_applied(), ["final"]);
    }

    #[test]
    fn lexicon_errors_carry_line() {
        let inv = russian();
        assert!(matches!(parse_lexicon("# x\nraQ\tq\n", &inv), Err(InventoryError::Parse { line: 2, .. })));
    }
}
