//! Distinctive features, segments and inventories.
//!
//! An [`Inventory`] fixes an ordered list of binary feature names, a list of
//! segments (each a symbol plus a partial feature assignment) and a table of
//! class macros such as `C` and `V`. Everything else in the crate speaks in
//! terms of [`SegId`]s into an inventory.

mod file;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

/// Characters ignored by [`Inventory::tokenize`] between segments.
pub const SEPARATORS: [char; 3] = ['.', ' ', '-'];

/// Word boundary marker accepted at the edges of a transcription.
pub const BOUNDARY: char = '#';

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InventoryError {
    #[error("unknown symbol at position {0}")]
    UnknownSymbol(usize),
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("unknown macro `{0}`")]
    UnknownMacro(String),
    #[error("segment `{0}` is not fully specified")]
    PartiallySpecified(String),
    #[error("no bundle picks out exactly the requested segments")]
    NotNatural,
    #[error("conflicting values for feature `{0}`")]
    Conflict(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// The three states a feature can be in on a segment or bundle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FeatureValue {
    Plus,
    Minus,
    Unspecified,
}

impl FeatureValue {
    pub fn sign(self) -> &'static str {
        match self {
            FeatureValue::Plus => "+",
            FeatureValue::Minus => "-",
            FeatureValue::Unspecified => "0",
        }
    }

    pub fn flip(self) -> Self {
        match self {
            FeatureValue::Plus => FeatureValue::Minus,
            FeatureValue::Minus => FeatureValue::Plus,
            FeatureValue::Unspecified => FeatureValue::Unspecified,
        }
    }
}

/// Index of a feature in its inventory's feature list.
pub type FeatureId = usize;

/// Index of a segment in its inventory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SegId(pub usize);

/// A string of segments over some inventory.
pub type Word = Vec<SegId>;

/// A partial assignment of `+`/`-` to features. Absent features are
/// unspecified.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FeatureBundle {
    values: BTreeMap<FeatureId, bool>,
}

impl FeatureBundle {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (FeatureId, FeatureValue)>) -> Self {
        let mut b = Self::new();
        for (f, v) in pairs {
            b.set(f, v);
        }
        b
    }

    pub fn get(&self, f: FeatureId) -> FeatureValue {
        match self.values.get(&f) {
            Some(true) => FeatureValue::Plus,
            Some(false) => FeatureValue::Minus,
            None => FeatureValue::Unspecified,
        }
    }

    pub fn set(&mut self, f: FeatureId, v: FeatureValue) {
        match v {
            FeatureValue::Plus => {
                self.values.insert(f, true);
            }
            FeatureValue::Minus => {
                self.values.insert(f, false);
            }
            FeatureValue::Unspecified => {
                self.values.remove(&f);
            }
        }
    }

    /// Specified features in ascending feature order.
    pub fn iter(&self) -> impl Iterator<Item = (FeatureId, FeatureValue)> + '_ {
        self.values.iter().map(|(&f, &v)| (f, if v { FeatureValue::Plus } else { FeatureValue::Minus }))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn features(&self) -> impl Iterator<Item = FeatureId> + '_ {
        self.values.keys().copied()
    }

    /// True if every value specified here is specified identically in `other`.
    pub fn is_subset_of(&self, other: &FeatureBundle) -> bool {
        self.values.iter().all(|(f, v)| other.values.get(f) == Some(v))
    }

    /// Adds every value of `other`, failing on a clash.
    pub fn merge(&mut self, other: &FeatureBundle) -> Result<(), FeatureId> {
        for (f, v) in &other.values {
            match self.values.get(f) {
                Some(old) if old != v => return Err(*f),
                _ => {
                    self.values.insert(*f, *v);
                }
            }
        }
        Ok(())
    }

    /// Copies `changes` over this bundle, overwriting clashes.
    pub fn overwrite(&self, changes: &FeatureBundle) -> FeatureBundle {
        let mut out = self.clone();
        out.values.extend(changes.values.iter());
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub symbol: String,
    pub features: FeatureBundle,
}

#[derive(Debug, Clone)]
pub struct Inventory {
    feature_names: Vec<String>,
    segments: Vec<Segment>,
    macros: BTreeMap<String, FeatureBundle>,
    by_symbol: HashMap<String, SegId>,
    longest_symbol: usize,
}

impl Inventory {
    /// Builds an inventory, checking symbol uniqueness and that macros only
    /// mention declared features.
    pub fn new(
        feature_names: Vec<String>,
        segments: Vec<Segment>,
        macros: BTreeMap<String, FeatureBundle>,
    ) -> Result<Self, InventoryError> {
        let n = feature_names.len();
        let mut seen = BTreeSet::new();
        for name in &feature_names {
            if !seen.insert(name.as_str()) {
                return Err(InventoryError::Parse { line: 0, msg: format!("duplicate feature `{name}`") });
            }
        }
        let mut by_symbol = HashMap::new();
        let mut longest_symbol = 0;
        for (i, seg) in segments.iter().enumerate() {
            if seg.symbol.is_empty()
                || seg.symbol.chars().any(|c| SEPARATORS.contains(&c) || c == BOUNDARY || c.is_whitespace())
            {
                return Err(InventoryError::Parse { line: 0, msg: format!("bad segment symbol `{}`", seg.symbol) });
            }
            if by_symbol.insert(seg.symbol.clone(), SegId(i)).is_some() {
                return Err(InventoryError::Parse { line: 0, msg: format!("duplicate segment `{}`", seg.symbol) });
            }
            if let Some(f) = seg.features.features().find(|&f| f >= n) {
                return Err(InventoryError::UnknownFeature(format!("#{f}")));
            }
            longest_symbol = longest_symbol.max(seg.symbol.chars().count());
        }
        for bundle in macros.values() {
            if let Some(f) = bundle.features().find(|&f| f >= n) {
                return Err(InventoryError::UnknownFeature(format!("#{f}")));
            }
        }
        Ok(Inventory { feature_names, segments, macros, by_symbol, longest_symbol })
    }

    pub fn parse(text: &str) -> Result<Self, InventoryError> {
        file::parse_inventory(text)
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn feature_id(&self, name: &str) -> Result<FeatureId, InventoryError> {
        self.feature_names
            .iter()
            .position(|f| f == name)
            .ok_or_else(|| InventoryError::UnknownFeature(name.to_string()))
    }

    pub fn feature_name(&self, f: FeatureId) -> &str {
        &self.feature_names[f]
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = SegId> {
        (0..self.segments.len()).map(SegId)
    }

    pub fn segment(&self, id: SegId) -> &Segment {
        &self.segments[id.0]
    }

    pub fn symbol(&self, id: SegId) -> &str {
        &self.segments[id.0].symbol
    }

    pub fn lookup(&self, symbol: &str) -> Option<SegId> {
        self.by_symbol.get(symbol).copied()
    }

    pub fn macro_bundle(&self, name: &str) -> Result<&FeatureBundle, InventoryError> {
        self.macros.get(name).ok_or_else(|| InventoryError::UnknownMacro(name.to_string()))
    }

    pub fn macros(&self) -> &BTreeMap<String, FeatureBundle> {
        &self.macros
    }

    /// Concatenates segment symbols.
    pub fn spell(&self, word: &[SegId]) -> String {
        word.iter().map(|&s| self.symbol(s)).collect()
    }

    /// Segment symbols joined with `sep`.
    pub fn spell_with(&self, word: &[SegId], sep: &str) -> String {
        word.iter().map(|&s| self.symbol(s)).collect::<Vec<_>>().join(sep)
    }

    /// Greedy longest-match segmentation of a transcription. Separators
    /// (`.`, space, `-`) are skipped and a `#` is accepted only at either edge.
    pub fn tokenize(&self, text: &str) -> Result<Word, InventoryError> {
        let chars: Vec<char> = text.chars().collect();
        let mut start = 0;
        let mut end = chars.len();
        // Edge boundaries, possibly padded by separators.
        while start < end && SEPARATORS.contains(&chars[start]) {
            start += 1;
        }
        if start < end && chars[start] == BOUNDARY {
            start += 1;
        }
        while end > start && SEPARATORS.contains(&chars[end - 1]) {
            end -= 1;
        }
        if end > start && chars[end - 1] == BOUNDARY {
            end -= 1;
        }

        let mut out = Vec::new();
        let mut i = start;
        let mut buf = String::new();
        while i < end {
            if SEPARATORS.contains(&chars[i]) {
                i += 1;
                continue;
            }
            let max = self.longest_symbol.min(end - i);
            let mut found = None;
            for len in (1..=max).rev() {
                buf.clear();
                buf.extend(&chars[i..i + len]);
                if let Some(id) = self.lookup(&buf) {
                    found = Some((id, len));
                    break;
                }
            }
            match found {
                Some((id, len)) => {
                    out.push(id);
                    i += len;
                }
                None => return Err(InventoryError::UnknownSymbol(i)),
            }
        }
        Ok(out)
    }

    fn check_bundle(&self, b: &FeatureBundle) -> Result<(), InventoryError> {
        match b.features().find(|&f| f >= self.feature_names.len()) {
            Some(f) => Err(InventoryError::UnknownFeature(format!("#{f}"))),
            None => Ok(()),
        }
    }

    /// Does `seg` carry every value `b` specifies? An unspecified segment
    /// feature never satisfies a specified requirement.
    pub fn matches(&self, b: &FeatureBundle, seg: SegId) -> Result<bool, InventoryError> {
        self.check_bundle(b)?;
        Ok(b.is_subset_of(&self.segment(seg).features))
    }

    /// Every segment matched by `b`, in inventory order.
    pub fn natural_class(&self, b: &FeatureBundle) -> Result<Vec<SegId>, InventoryError> {
        self.check_bundle(b)?;
        Ok(self.ids().filter(|&s| b.is_subset_of(&self.segment(s).features)).collect())
    }

    /// All minimum-size bundles whose natural class is exactly `target`,
    /// sorted by inventory feature order.
    pub fn describe_class(&self, target: &[SegId]) -> Result<Vec<FeatureBundle>, InventoryError> {
        let target: BTreeSet<SegId> = target.iter().copied().collect();
        let literals = self.candidate_literals(&target);

        // Every candidate literal is true of all targets, so the bundle of all
        // of them picks out the smallest reachable class. If even that is too
        // big, no subset will do.
        if !target.is_empty() {
            let all = FeatureBundle::from_pairs(literals.iter().copied());
            if self.class_set(&all) != target {
                return Err(InventoryError::NotNatural);
            }
        }

        let max_size = if target.is_empty() { self.feature_names.len().min(4) } else { literals.len() };
        for size in 0..=max_size {
            let mut found = Vec::new();
            for_each_combination(literals.len(), size, |idx| {
                // A feature may only appear once.
                if idx.windows(2).any(|w| literals[w[0]].0 == literals[w[1]].0) {
                    return;
                }
                let b = FeatureBundle::from_pairs(idx.iter().map(|&i| literals[i]));
                if self.class_set(&b) == target {
                    found.push(b);
                }
            });
            if !found.is_empty() {
                found.sort_by_key(|b| b.iter().collect::<Vec<_>>());
                return Ok(found);
            }
        }
        Err(InventoryError::NotNatural)
    }

    /// Literals `(feature, value)` that hold of every target segment, in
    /// feature order. For an empty target every literal is a candidate.
    fn candidate_literals(&self, target: &BTreeSet<SegId>) -> Vec<(FeatureId, FeatureValue)> {
        let mut out = Vec::new();
        for f in 0..self.feature_names.len() {
            if target.is_empty() {
                out.push((f, FeatureValue::Plus));
                out.push((f, FeatureValue::Minus));
                continue;
            }
            let mut vals = target.iter().map(|&s| self.segment(s).features.get(f));
            let first = vals.next().unwrap();
            if first != FeatureValue::Unspecified && vals.all(|v| v == first) {
                out.push((f, first));
            }
        }
        out
    }

    fn class_set(&self, b: &FeatureBundle) -> BTreeSet<SegId> {
        self.ids().filter(|&s| b.is_subset_of(&self.segment(s).features)).collect()
    }

    /// Number of features on which two fully specified segments agree.
    pub fn similarity(&self, a: SegId, b: SegId) -> Result<usize, InventoryError> {
        let n = self.feature_names.len();
        for &s in &[a, b] {
            if self.segment(s).features.len() != n {
                return Err(InventoryError::PartiallySpecified(self.symbol(s).to_string()));
            }
        }
        let (fa, fb) = (&self.segment(a).features, &self.segment(b).features);
        Ok((0..n).filter(|&f| fa.get(f) == fb.get(f)).count())
    }

    /// The segment whose feature bundle is exactly `b`, if any.
    pub fn resolve(&self, b: &FeatureBundle) -> Option<SegId> {
        self.ids().find(|&s| &self.segment(s).features == b)
    }

    /// Parses `[+labial, -continuant]`, `[C, +voiced]` or a bare macro
    /// name. Macros are expanded into their feature values.
    pub fn parse_bundle(&self, text: &str) -> Result<FeatureBundle, InventoryError> {
        let t = text.trim();
        let inner = match t.strip_prefix('[') {
            Some(rest) => rest
                .strip_suffix(']')
                .ok_or_else(|| InventoryError::Parse { line: 0, msg: format!("unterminated bundle `{t}`") })?,
            None => t,
        };
        let mut out = FeatureBundle::new();
        for item in inner.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let part = match parse_signed(item) {
                Some((v, name)) => FeatureBundle::from_pairs([(self.feature_id(name)?, v)]),
                None => self.macro_bundle(item)?.clone(),
            };
            out.merge(&part).map_err(|f| InventoryError::Conflict(self.feature_name(f).to_string()))?;
        }
        Ok(out)
    }

    /// Renders a bundle as `[+f, -g]`.
    pub fn show_bundle(&self, b: &FeatureBundle) -> String {
        let items: Vec<String> = b.iter().map(|(f, v)| format!("{}{}", v.sign(), self.feature_name(f))).collect();
        format!("[{}]", items.join(", "))
    }
}

/// Splits `+high`, `-back` or `−back` into value and feature name.
pub(crate) fn parse_signed(item: &str) -> Option<(FeatureValue, &str)> {
    let mut chars = item.chars();
    let v = match chars.next()? {
        '+' => FeatureValue::Plus,
        '-' | '−' | '–' => FeatureValue::Minus,
        _ => return None,
    };
    let name = chars.as_str().trim();
    (!name.is_empty()).then_some((v, name))
}

/// Calls `f` with each strictly increasing index tuple of length `k` drawn
/// from `0..n`, in lexicographic order.
pub(crate) fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] < i + n - k {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

impl fmt::Display for FeatureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.sign())
    }
}
