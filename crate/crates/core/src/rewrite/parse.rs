use std::collections::BTreeSet;

use super::{EnvItem, FeatureSpec, Lint, Pattern, RewriteRule, RuleError, SpecValue};
use crate::inventory::Inventory;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    LBracket,
    RBracket,
    Comma,
    Arrow,
    Slash,
    Focus,
    Hash,
    Star,
    Sign(bool),
    Var(String),
    Ident(String),
}

fn greek_alias(c: char) -> Option<&'static str> {
    Some(match c {
        'α' => "a",
        'β' => "b",
        'γ' => "c",
        'δ' => "d",
        'ε' => "e",
        _ => return None,
    })
}

fn syntax(pos: usize, msg: impl Into<String>) -> RuleError {
    RuleError::Syntax { pos, msg: msg.into() }
}

fn lex(text: &str, offset: usize) -> Result<Vec<(usize, Tok)>, RuleError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = offset + i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let tok = match c {
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            ',' => Tok::Comma,
            '/' => Tok::Slash,
            '_' => Tok::Focus,
            '#' => Tok::Hash,
            '*' => Tok::Star,
            '→' => Tok::Arrow,
            '+' => Tok::Sign(true),
            '-' if chars.get(i + 1) == Some(&'>') => {
                i += 1;
                Tok::Arrow
            }
            '-' | '−' | '–' => Tok::Sign(false),
            '@' => {
                let start = i + 1;
                let mut j = start;
                while j < chars.len() && chars[j].is_alphanumeric() {
                    j += 1;
                }
                if j == start {
                    return Err(syntax(pos, "expected variable name after `@`"));
                }
                let name: String = chars[start..j].iter().collect();
                i = j;
                out.push((pos, Tok::Var(name)));
                continue;
            }
            c if greek_alias(c).is_some() => Tok::Var(greek_alias(c).unwrap().to_string()),
            c if c.is_alphabetic() => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let name: String = chars[i..j].iter().collect();
                i = j;
                out.push((pos, Tok::Ident(name)));
                continue;
            }
            other => return Err(syntax(pos, format!("unexpected character `{other}`"))),
        };
        out.push((pos, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    inv: &'a Inventory,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(_, t)| t.clone());
        self.at += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), RuleError> {
        let pos = self.pos();
        match self.next() {
            Some(t) if t == want => Ok(()),
            _ => Err(syntax(pos, format!("expected {what}"))),
        }
    }

    fn feature(&mut self) -> Result<usize, RuleError> {
        let pos = self.pos();
        match self.next() {
            Some(Tok::Ident(name)) => Ok(self.inv.feature_id(&name)?),
            _ => Err(syntax(pos, "expected feature name")),
        }
    }

    fn macro_name(&self, name: &str) -> Result<String, RuleError> {
        self.inv.macro_bundle(name)?;
        Ok(name.to_string())
    }

    /// `[item, ...]` with items a macro, `±feature` or `@var feature`.
    fn bracket(&mut self) -> Result<Pattern, RuleError> {
        self.expect(Tok::LBracket, "`[`")?;
        let mut p = Pattern::default();
        if self.peek() == Some(&Tok::RBracket) {
            self.next();
            return Ok(p);
        }
        loop {
            let pos = self.pos();
            match self.next() {
                Some(Tok::Sign(plus)) => {
                    let feature = self.feature()?;
                    let value = if plus { SpecValue::Plus } else { SpecValue::Minus };
                    p.specs.push(FeatureSpec { feature, value });
                }
                Some(Tok::Var(v)) => {
                    let feature = self.feature()?;
                    p.specs.push(FeatureSpec { feature, value: SpecValue::Var(v) });
                }
                Some(Tok::Ident(name)) => p.macros.push(self.macro_name(&name)?),
                _ => return Err(syntax(pos, "expected `+feature`, `-feature`, `@var feature` or macro")),
            }
            let pos = self.pos();
            match self.next() {
                Some(Tok::Comma) => continue,
                Some(Tok::RBracket) => break,
                _ => return Err(syntax(pos, "expected `,` or `]`")),
            }
        }
        let mut seen = BTreeSet::new();
        for s in &p.specs {
            if !seen.insert(s.feature) {
                return Err(syntax(self.pos(), format!("feature `{}` given twice", self.inv.feature_name(s.feature))));
            }
        }
        Ok(p)
    }

    fn pattern(&mut self) -> Result<Pattern, RuleError> {
        if let Some(Tok::Ident(name)) = self.peek().cloned() {
            self.next();
            return Ok(Pattern { macros: vec![self.macro_name(&name)?], specs: Vec::new() });
        }
        self.bracket()
    }

    /// Environment items up to the focus marker or end of input.
    fn env(&mut self, left: bool) -> Result<Vec<EnvItem>, RuleError> {
        let mut items = Vec::new();
        loop {
            let pos = self.pos();
            let item = match self.peek() {
                Some(Tok::Hash) => {
                    self.next();
                    EnvItem::Boundary
                }
                Some(Tok::LBracket) => EnvItem::Bundle(self.bracket()?),
                Some(Tok::Ident(name)) => {
                    let name = name.clone();
                    self.next();
                    EnvItem::Macro(self.macro_name(&name)?)
                }
                _ => break,
            };
            let item = if self.peek() == Some(&Tok::Star) {
                self.next();
                if item == EnvItem::Boundary {
                    return Err(syntax(pos, "`#` cannot be repeated"));
                }
                EnvItem::Star(Box::new(item))
            } else {
                item
            };
            if item == EnvItem::Boundary {
                let outer = if left { items.is_empty() } else { true };
                if !outer {
                    return Err(syntax(pos, "`#` is only allowed at the outer edge of an environment"));
                }
            } else if !left && items.last() == Some(&EnvItem::Boundary) {
                return Err(syntax(pos, "`#` is only allowed at the outer edge of an environment"));
            }
            items.push(item);
        }
        Ok(items)
    }
}

/// Parses one rule, `name: FOCUS -> CHANGE / LEFT _ RIGHT`. The name and
/// the environment are optional. Error positions are character offsets.
pub fn parse_rule(text: &str, inv: &Inventory) -> Result<RewriteRule, RuleError> {
    let (name, body, offset) = match text.split_once(':') {
        Some((head, rest)) if !head.contains('[') && !head.trim().is_empty() => {
            (head.trim().to_string(), rest, head.chars().count() + 1)
        }
        _ => (String::new(), text, 0),
    };
    let toks = lex(body, offset)?;
    let end = offset + body.chars().count();
    let mut p = Parser { toks, at: 0, end, inv };

    let focus = p.pattern()?;
    p.expect(Tok::Arrow, "`->`")?;
    let change_pos = p.pos();
    let change_pat = p.bracket()?;
    if !change_pat.macros.is_empty() {
        return Err(syntax(change_pos, "macros are not allowed in the change"));
    }
    if change_pat.specs.is_empty() {
        return Err(RuleError::EmptyChange(name));
    }

    let (mut left, mut right) = (Vec::new(), Vec::new());
    if p.peek() == Some(&Tok::Slash) {
        p.next();
        left = p.env(true)?;
        p.expect(Tok::Focus, "`_`")?;
        right = p.env(false)?;
    }
    if p.at < p.toks.len() {
        return Err(syntax(p.pos(), "unexpected trailing input"));
    }

    let rule = RewriteRule { name, focus, change: change_pat.specs, left, right };
    let bindable = rule.bindable_vars();
    for s in &rule.change {
        if let SpecValue::Var(v) = &s.value {
            if !bindable.contains(v) {
                return Err(RuleError::UnboundAlphaVariable(v.clone()));
            }
        }
    }
    Ok(rule)
}

/// Parses a rule file: one rule per line, `#` comments in column 1. Returns
/// the rules in file order together with any lint warnings.
pub fn parse_rules(text: &str, inv: &Inventory) -> Result<(Vec<RewriteRule>, Vec<Lint>), RuleError> {
    let mut rules: Vec<RewriteRule> = Vec::new();
    let mut lints = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let at = |e| RuleError::AtLine { line: i + 1, source: Box::new(e) };
        let mut rule = parse_rule(line, inv).map_err(at)?;
        if rule.name.is_empty() {
            rule.name = format!("rule{}", rules.len() + 1);
        }
        if rules.iter().any(|r| r.name == rule.name) {
            return Err(at(RuleError::DuplicateRule(rule.name)));
        }
        lints.extend(rule.lints(inv));
        rules.push(rule);
    }
    Ok((rules, lints))
}
