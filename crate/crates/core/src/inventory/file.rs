// Line-oriented inventory files:
//
//   features: f1 f2 ...
//   segment <symbol> <v1> <v2> ...      (vi in + - 0)
//   macro <Name> = [<±feat>, ...]
//
// Lines starting with `#` in column 1 are comments.

use std::collections::BTreeMap;

use super::{FeatureBundle, FeatureValue, Inventory, InventoryError, Segment};

fn err(line: usize, msg: impl Into<String>) -> InventoryError {
    InventoryError::Parse { line, msg: msg.into() }
}

pub(super) fn parse_inventory(text: &str) -> Result<Inventory, InventoryError> {
    let mut features: Option<Vec<String>> = None;
    let mut segments = Vec::new();
    let mut macro_src: Vec<(usize, String, String)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        if raw.starts_with('#') || raw.trim().is_empty() {
            continue;
        }
        let line = raw.trim();
        if let Some(rest) = line.strip_prefix("features:") {
            if features.is_some() {
                return Err(err(line_no, "duplicate features header"));
            }
            features = Some(rest.split_whitespace().map(String::from).collect());
        } else if let Some(rest) = line.strip_prefix("segment ") {
            let names = features.as_ref().ok_or_else(|| err(line_no, "segment before features header"))?;
            let mut parts = rest.split_whitespace();
            let symbol = parts.next().ok_or_else(|| err(line_no, "missing segment symbol"))?;
            let values: Vec<&str> = parts.collect();
            if values.len() != names.len() {
                return Err(err(
                    line_no,
                    format!("segment `{symbol}` has {} values, expected {}", values.len(), names.len()),
                ));
            }
            let mut bundle = FeatureBundle::new();
            for (f, v) in values.iter().enumerate() {
                let v = match *v {
                    "+" => FeatureValue::Plus,
                    "-" | "−" => FeatureValue::Minus,
                    "0" => FeatureValue::Unspecified,
                    other => return Err(err(line_no, format!("bad feature value `{other}`"))),
                };
                bundle.set(f, v);
            }
            segments.push(Segment { symbol: symbol.to_string(), features: bundle });
        } else if let Some(rest) = line.strip_prefix("macro ") {
            let (name, body) = rest.split_once('=').ok_or_else(|| err(line_no, "macro needs `=`"))?;
            macro_src.push((line_no, name.trim().to_string(), body.trim().to_string()));
        } else {
            return Err(err(line_no, format!("unrecognised line `{line}`")));
        }
    }

    let features = features.ok_or_else(|| err(0, "missing features header"))?;
    let mut inv = Inventory::new(features, segments, BTreeMap::new()).map_err(|e| match e {
        InventoryError::Parse { msg, .. } => err(0, msg),
        other => other,
    })?;

    // Macros may only use plain feature values, so they can be parsed against
    // the macro-free inventory.
    let mut macros = BTreeMap::new();
    for (line_no, name, body) in macro_src {
        if !body.starts_with('[') {
            return Err(err(line_no, "macro body must be a bracketed bundle"));
        }
        let bundle = inv.parse_bundle(&body).map_err(|e| match e {
            InventoryError::Parse { msg, .. } => err(line_no, msg),
            other => other,
        })?;
        if macros.insert(name.clone(), bundle).is_some() {
            return Err(err(line_no, format!("duplicate macro `{name}`")));
        }
    }
    inv.macros = macros;
    Ok(inv)
}
