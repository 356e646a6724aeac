//! SPE-style feature-changing rewrite rules.
//!
//! A rule `FOCUS -> CHANGE / LEFT _ RIGHT` rewrites the feature values of a
//! single segment when it sits in the given environment. Rules are applied
//! left to right, in place, until a full pass changes nothing.

mod apply;
mod lexicon;
mod parse;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::inventory::{FeatureId, Inventory, InventoryError};

pub use apply::{applies_at, apply_cascade, apply_rule, Derivation, Step};
pub use lexicon::{derive, parse_lexicon, AffixSpec, Lexeme};
pub use parse::{parse_rule, parse_rules};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<RuleError>,
    },
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("unknown macro `{0}`")]
    UnknownMacro(String),
    #[error("variable @{0} is used in the change but never bound")]
    UnboundAlphaVariable(String),
    #[error("rule `{0}` has an empty change")]
    EmptyChange(String),
    #[error("duplicate rule name `{0}`")]
    DuplicateRule(String),
}

impl From<InventoryError> for RuleError {
    fn from(e: InventoryError) -> Self {
        match e {
            InventoryError::UnknownFeature(f) => RuleError::UnknownFeature(f),
            InventoryError::UnknownMacro(m) => RuleError::UnknownMacro(m),
            other => RuleError::Syntax { pos: 0, msg: other.to_string() },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ApplyError {
    #[error("rule `{rule}` at position {position}: changed segment matches no inventory segment")]
    NoSuchSegment { rule: String, position: usize },
    #[error("rule `{rule}` did not reach a fixpoint within {cap} passes")]
    IterationCapExceeded { rule: String, cap: usize },
    #[error("lexeme `{0}` has no morphological class")]
    MissingMorphClass(String),
    #[error("no affix listed for morphological class `{0}`")]
    UnknownMorphClass(String),
    #[error(transparent)]
    Inventory(#[from] InventoryError),
}

/// A feature value in a rule: literal, or a variable ranging over `+`/`-`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpecValue {
    Plus,
    Minus,
    Var(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FeatureSpec {
    pub feature: FeatureId,
    pub value: SpecValue,
}

/// A segment description: class macros plus feature specs, all of which
/// must hold.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Pattern {
    pub macros: Vec<String>,
    pub specs: Vec<FeatureSpec>,
}

impl Pattern {
    pub fn vars(&self) -> impl Iterator<Item = (&str, FeatureId)> {
        self.specs.iter().filter_map(|s| match &s.value {
            SpecValue::Var(v) => Some((v.as_str(), s.feature)),
            _ => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum EnvItem {
    Bundle(Pattern),
    Macro(String),
    /// Word edge; only legal as the outermost item of an environment.
    Boundary,
    /// Zero or more repetitions of a bundle or macro item.
    Star(Box<EnvItem>),
}

impl EnvItem {
    /// The segment description this item tests, ignoring repetition.
    pub fn pattern(&self) -> Option<Pattern> {
        match self {
            EnvItem::Bundle(p) => Some(p.clone()),
            EnvItem::Macro(m) => Some(Pattern { macros: vec![m.clone()], specs: Vec::new() }),
            EnvItem::Star(inner) => inner.pattern(),
            EnvItem::Boundary => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RewriteRule {
    pub name: String,
    pub focus: Pattern,
    pub change: Vec<FeatureSpec>,
    pub left: Vec<EnvItem>,
    pub right: Vec<EnvItem>,
}

/// A permitted but suspicious construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lint {
    pub rule: String,
    pub message: String,
}

impl RewriteRule {
    /// Features whose values the change may set.
    pub fn changed_features(&self) -> BTreeSet<FeatureId> {
        self.change.iter().map(|s| s.feature).collect()
    }

    /// Variables bound in the focus or in a non-repeated environment item.
    pub fn bindable_vars(&self) -> BTreeSet<String> {
        let mut out: BTreeSet<String> = self.focus.vars().map(|(v, _)| v.to_string()).collect();
        for item in self.left.iter().chain(&self.right) {
            if let EnvItem::Bundle(p) = item {
                out.extend(p.vars().map(|(v, _)| v.to_string()));
            }
        }
        out
    }

    /// All variables mentioned anywhere in the rule.
    pub fn vars(&self) -> BTreeSet<String> {
        let mut out: BTreeSet<String> = self.focus.vars().map(|(v, _)| v.to_string()).collect();
        for s in &self.change {
            if let SpecValue::Var(v) = &s.value {
                out.insert(v.clone());
            }
        }
        for item in self.left.iter().chain(&self.right) {
            if let Some(p) = item.pattern() {
                out.extend(p.vars().map(|(v, _)| v.to_string()));
            }
        }
        out
    }

    /// Flags variables that are bound on one feature and used to set a
    /// different one (e.g. `@a back` in the context, `@a round` in the
    /// change). The formalism allows this, so it is only a warning.
    pub fn lints(&self, inv: &Inventory) -> Vec<Lint> {
        let mut bound: Vec<(&str, FeatureId)> = self.focus.vars().collect();
        let env_patterns: Vec<Pattern> = self.left.iter().chain(&self.right).filter_map(|i| i.pattern()).collect();
        for p in &env_patterns {
            bound.extend(p.vars());
        }
        let mut out = Vec::new();
        for s in &self.change {
            if let SpecValue::Var(v) = &s.value {
                let sites: BTreeSet<FeatureId> = bound.iter().filter(|(b, _)| b == v).map(|&(_, f)| f).collect();
                if !sites.contains(&s.feature) {
                    let names: Vec<&str> = sites.iter().map(|&f| inv.feature_name(f)).collect();
                    out.push(Lint {
                        rule: self.name.clone(),
                        message: format!(
                            "@{v} is bound on [{}] but sets [{}]",
                            names.join(", "),
                            inv.feature_name(s.feature)
                        ),
                    });
                }
            }
        }
        out
    }

    /// Renders the rule in the notation accepted by [`parse_rule`].
    pub fn display<'a>(&'a self, inv: &'a Inventory) -> RuleDisplay<'a> {
        RuleDisplay { rule: self, inv }
    }
}

pub struct RuleDisplay<'a> {
    rule: &'a RewriteRule,
    inv: &'a Inventory,
}

fn write_spec(f: &mut fmt::Formatter<'_>, inv: &Inventory, s: &FeatureSpec) -> fmt::Result {
    let name = inv.feature_name(s.feature);
    match &s.value {
        SpecValue::Plus => write!(f, "+{name}"),
        SpecValue::Minus => write!(f, "-{name}"),
        SpecValue::Var(v) => write!(f, "@{v} {name}"),
    }
}

fn write_pattern(f: &mut fmt::Formatter<'_>, inv: &Inventory, p: &Pattern) -> fmt::Result {
    f.write_str("[")?;
    let mut first = true;
    for m in &p.macros {
        if !first {
            f.write_str(", ")?;
        }
        first = false;
        f.write_str(m)?;
    }
    for s in &p.specs {
        if !first {
            f.write_str(", ")?;
        }
        first = false;
        write_spec(f, inv, s)?;
    }
    f.write_str("]")
}

fn write_item(f: &mut fmt::Formatter<'_>, inv: &Inventory, item: &EnvItem) -> fmt::Result {
    match item {
        EnvItem::Bundle(p) => write_pattern(f, inv, p),
        EnvItem::Macro(m) => f.write_str(m),
        EnvItem::Boundary => f.write_str("#"),
        EnvItem::Star(inner) => {
            write_item(f, inv, inner)?;
            f.write_str("*")
        }
    }
}

impl fmt::Display for RuleDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.rule;
        if !r.name.is_empty() {
            write!(f, "{}: ", r.name)?;
        }
        write_pattern(f, self.inv, &r.focus)?;
        f.write_str(" -> [")?;
        for (i, s) in r.change.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write_spec(f, self.inv, s)?;
        }
        f.write_str("]")?;
        if r.left.is_empty() && r.right.is_empty() {
            return Ok(());
        }
        f.write_str(" /")?;
        for item in &r.left {
            f.write_str(" ")?;
            write_item(f, self.inv, item)?;
        }
        f.write_str(" _")?;
        for item in &r.right {
            f.write_str(" ")?;
            write_item(f, self.inv, item)?;
        }
        Ok(())
    }
}
