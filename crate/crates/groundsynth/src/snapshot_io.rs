//! Snapshot file ingestion.

use std::fs;
use std::path::{Path, PathBuf};

use groundsynth_core::snapshot::{validate_snapshot, PageSnapshot, Violation, ViolationRule};

#[derive(Debug, thiserror::Error)]
pub enum SnapshotError {
    #[error("malformed JSON at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("invalid field `{field}`: {message}")]
    Schema { field: String, message: String },
    #[error("{} ({} violation(s))", .violations[0], .violations.len())]
    Invalid {
        violations: Vec<Violation>,
        /// Document path of the first violation, e.g. `elements[3].bbox`.
        field: String,
    },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl SnapshotError {
    /// Schema path of the first offending field, when known.
    pub fn field(&self) -> Option<String> {
        match self {
            SnapshotError::Schema { field, .. } => Some(field.clone()),
            SnapshotError::Invalid { field, .. } => Some(field.clone()),
            _ => None,
        }
    }

    pub fn message(&self) -> String {
        match self {
            SnapshotError::Invalid { violations, .. } => violations[0].rule.message().to_string(),
            other => other.to_string(),
        }
    }
}

fn byte_offset(raw: &[u8], line: usize, column: usize) -> usize {
    let mut start = 0;
    for _ in 1..line {
        match raw[start..].iter().position(|&b| b == b'\n') {
            Some(i) => start += i + 1,
            None => break,
        }
    }
    (start + column.saturating_sub(1)).min(raw.len())
}

/// `missing field `bbox`` → `bbox`.
fn missing_field(message: &str) -> Option<&str> {
    let rest = message.strip_prefix("missing field `")?;
    rest.split('`').next()
}

/// Parses and validates one snapshot document. Unknown fields are ignored.
pub fn parse_snapshot(raw: &[u8]) -> Result<PageSnapshot, SnapshotError> {
    let mut de = serde_json::Deserializer::from_slice(raw);
    let snap: PageSnapshot = match serde_path_to_error::deserialize(&mut de) {
        Ok(s) => s,
        Err(err) => {
            let path = err.path().to_string();
            return Err(classify_error(raw, path, err.into_inner()));
        }
    };
    de.end().map_err(|e| classify_error(raw, ".".into(), e))?;
    let violations = validate_snapshot(&snap);
    if violations.is_empty() {
        Ok(snap)
    } else {
        let field = violation_path(&snap, &violations[0]);
        Err(SnapshotError::Invalid { violations, field })
    }
}

fn violation_path(s: &PageSnapshot, v: &Violation) -> String {
    let Some(id) = &v.element_id else {
        return v.rule.field().to_string();
    };
    // Duplicates are reported on their second occurrence.
    let nth = usize::from(v.rule == ViolationRule::DuplicateId);
    match s.elements.iter().enumerate().filter(|(_, e)| &e.id == id).nth(nth) {
        Some((i, _)) => format!("elements[{i}].{}", v.rule.field()),
        None => v.rule.field().to_string(),
    }
}

fn classify_error(raw: &[u8], path: String, inner: serde_json::Error) -> SnapshotError {
    match inner.classify() {
        serde_json::error::Category::Data => {
            let msg = inner.to_string();
            let field = match missing_field(&msg) {
                Some(f) if path == "." => f.to_string(),
                Some(f) => format!("{path}.{f}"),
                None => path,
            };
            SnapshotError::Schema { field, message: strip_position(&msg) }
        }
        _ => SnapshotError::Syntax {
            offset: byte_offset(raw, inner.line(), inner.column()),
            message: strip_position(&inner.to_string()),
        },
    }
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

pub fn read_snapshot(path: &Path) -> Result<PageSnapshot, SnapshotError> {
    let raw = fs::read(path).map_err(|source| SnapshotError::Io { path: path.into(), source })?;
    parse_snapshot(&raw)
}

pub fn write_snapshot(path: &Path, s: &PageSnapshot) -> std::io::Result<()> {
    let mut buf = serde_json::to_vec_pretty(s).map_err(std::io::Error::other)?;
    buf.push(b'\n');
    fs::write(path, buf)
}

/// Snapshot files under `dir` (`*.json`, non-recursive), sorted by file name.
/// A file path is returned as-is.
pub fn list_snapshots(input: &Path) -> std::io::Result<Vec<PathBuf>> {
    if input.is_file() {
        return Ok(vec![input.to_path_buf()]);
    }
    let mut out: Vec<PathBuf> = fs::read_dir(input)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    out.sort();
    Ok(out)
}
