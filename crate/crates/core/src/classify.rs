//! Element classification, OCR agreement, and ambiguity filtering.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::snapshot::ElementRecord;

/// Default OCR agreement threshold.
pub const TEXTUAL_THRESHOLD: f64 = 0.7;

pub const INTERACTIVE_TAGS: [&str; 8] = ["a", "img", "button", "input", "svg", "select", "textarea", "video"];
pub const PURE_TEXT_TAGS: [&str; 11] = ["p", "h1", "h2", "h3", "h4", "h5", "h6", "span", "li", "td", "label"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementKind {
    Interactive,
    PureText,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ElementClass {
    pub kind: ElementKind,
    /// Only meaningful for interactive elements.
    pub textual: bool,
}

pub fn classify_tag(tag: &str) -> ElementKind {
    if INTERACTIVE_TAGS.contains(&tag) {
        ElementKind::Interactive
    } else if PURE_TEXT_TAGS.contains(&tag) {
        ElementKind::PureText
    } else {
        ElementKind::Other
    }
}

pub fn classify_element(e: &ElementRecord) -> ElementKind {
    classify_tag(&e.tag)
}

/// Full classification using `threshold` for the OCR agreement test.
pub fn classify(e: &ElementRecord, threshold: f64) -> ElementClass {
    let kind = classify_element(e);
    let textual = kind == ElementKind::Interactive && is_textual_with(e, threshold);
    ElementClass { kind, textual }
}

/// Case-folds, trims, and collapses internal whitespace runs to one space.
pub fn normalize_text(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for word in s.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.extend(word.chars().flat_map(char::to_lowercase));
    }
    out
}

/// Levenshtein distance over Unicode scalar values.
pub fn levenshtein(a: &[char], b: &[char]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let up = row[j + 1];
            let cost = if ca == cb { diag } else { diag + 1 };
            row[j + 1] = cost.min(up + 1).min(row[j] + 1);
            diag = up;
        }
    }
    row[b.len()]
}

/// Normalized Levenshtein ratio `(max_len - dist) / max_len` over normalized text.
///
/// Two empty strings are identical (1.0); one empty string scores 0.0.
pub fn text_similarity(a: &str, b: &str) -> f64 {
    let a: Vec<char> = normalize_text(a).chars().collect();
    let b: Vec<char> = normalize_text(b).chars().collect();
    let longest = a.len().max(b.len());
    if longest == 0 {
        return 1.0;
    }
    let dist = levenshtein(&a, &b);
    (longest - dist) as f64 / longest as f64
}

/// Whether OCR text agrees with `inner_text` strictly above the default threshold.
pub fn is_textual(e: &ElementRecord) -> bool {
    is_textual_with(e, TEXTUAL_THRESHOLD)
}

pub fn is_textual_with(e: &ElementRecord, threshold: f64) -> bool {
    match (e.ocr_text.as_deref(), e.inner_text()) {
        (Some(ocr), Some(text)) => text_similarity(ocr, text) > threshold,
        _ => false,
    }
}

/// Ids of every element whose normalized inner text is shared with another element.
///
/// Elements with no inner text never collide.
pub fn dedup_ambiguous<'a, I>(elements: I) -> BTreeSet<String>
where
    I: IntoIterator<Item = &'a ElementRecord>,
{
    let mut groups: BTreeMap<String, Vec<&str>> = BTreeMap::new();
    for e in elements {
        if let Some(text) = e.inner_text() {
            groups.entry(normalize_text(text)).or_default().push(&e.id);
        }
    }
    groups
        .into_values()
        .filter(|ids| ids.len() > 1)
        .flatten()
        .map(String::from)
        .collect()
}
