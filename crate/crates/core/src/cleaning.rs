//! Value normalization applied before comparison and indexing.

use crate::record::{MatchConfig, Record};

/// Trims, collapses internal whitespace runs to a single space and lowercases.
///
/// Lowercasing is per character and only applied when the lowercase form is a
/// single character, so the result never has more characters than the input.
pub fn clean_basic(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    for word in raw.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.extend(word.chars().map(fold_char));
    }
    out
}

fn fold_char(c: char) -> char {
    if c.is_ascii() {
        return c.to_ascii_lowercase();
    }
    let mut lower = c.to_lowercase();
    match (lower.next(), lower.next()) {
        (Some(l), None) => l,
        _ => c,
    }
}

/// Returns a cleaned copy of `record`.
///
/// String-compared attributes go through [`clean_basic`]; numeric and
/// coordinate values are only trimmed. Values that are empty after cleaning
/// are dropped, so a whitespace-only cell counts as missing. Attributes not
/// present in the config are copied unchanged.
pub fn clean_record(record: &Record, config: &MatchConfig) -> Record {
    let values = record
        .values
        .iter()
        .map(|(name, vals)| {
            let string_kind = config
                .attribute(name)
                .map(|s| s.comparator.is_string())
                .unwrap_or(false);
            let cleaned = vals
                .iter()
                .map(|v| {
                    if string_kind {
                        clean_basic(v)
                    } else {
                        v.trim().to_string()
                    }
                })
                .filter(|v| !v.is_empty())
                .collect();
            (name.clone(), cleaned)
        })
        .collect();
    Record {
        id: record.id.clone(),
        values,
    }
}
