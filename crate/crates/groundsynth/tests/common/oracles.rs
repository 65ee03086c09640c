//! Brute-force reference implementations used to cross-check the library.

use std::collections::HashMap;

use groundsynth::core::eval::{ElemType, EvalRecord, Platform};
use groundsynth::core::geometry::{BBox, Point};
use groundsynth::core::snapshot::ElementRecord;

pub fn norm(s: &str) -> String {
    s.split_whitespace().map(|w| w.to_lowercase()).collect::<Vec<_>>().join(" ")
}

/// Full-matrix edit distance.
pub fn edit_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for j in 0..=b.len() {
        d[0][j] = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let sub = d[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
            d[i][j] = sub.min(d[i - 1][j] + 1).min(d[i][j - 1] + 1);
        }
    }
    d[a.len()][b.len()]
}

pub fn similarity(a: &str, b: &str) -> f64 {
    let (a, b) = (norm(a), norm(b));
    let n = a.chars().count().max(b.chars().count());
    if n == 0 {
        return 1.0;
    }
    1.0 - edit_distance(&a, &b) as f64 / n as f64
}

fn center(b: &BBox) -> (i64, i64) {
    (b.x as i64 + b.w as i64 / 2, b.y as i64 + b.h as i64 / 2)
}

fn dist(a: &BBox, b: &BBox) -> f64 {
    let (ax, ay) = center(a);
    let (bx, by) = center(b);
    ((ax - bx) as f64).hypot((ay - by) as f64)
}

fn dist2(a: &BBox, b: &BBox) -> i64 {
    let (ax, ay) = center(a);
    let (bx, by) = center(b);
    (ax - bx).pow(2) + (ay - by).pow(2)
}

/// Half-open intervals `[a0, a1)` and `[b0, b1)` share at least one pixel.
fn spans_meet(a0: i64, a1: i64, b0: i64, b1: i64) -> bool {
    a0.max(b0) < a1.min(b1)
}

fn eligible<'a>(target: &'a ElementRecord, all: &'a [ElementRecord]) -> impl Iterator<Item = &'a ElementRecord> {
    all.iter().filter(move |e| e.visible && e.id != target.id)
}

fn sorted_ids(target: &ElementRecord, mut v: Vec<&ElementRecord>) -> Vec<String> {
    v.sort_by_key(|e| (dist2(&target.bbox, &e.bbox), e.id.clone()));
    v.into_iter().map(|e| e.id.clone()).collect()
}

/// `[left, right, above, below]`, each nearest first.
pub fn neighbors(target: &ElementRecord, all: &[ElementRecord]) -> [Vec<String>; 4] {
    let t = target.bbox;
    let (tx0, ty0, tx1, ty1) = (t.x as i64, t.y as i64, t.x as i64 + t.w as i64, t.y as i64 + t.h as i64);
    let mut out: [Vec<&ElementRecord>; 4] = Default::default();
    for e in eligible(target, all) {
        let b = e.bbox;
        let (x0, y0, x1, y1) = (b.x as i64, b.y as i64, b.x as i64 + b.w as i64, b.y as i64 + b.h as i64);
        let rows = spans_meet(ty0, ty1, y0, y1);
        let cols = spans_meet(tx0, tx1, x0, x1);
        if rows && x1 <= tx0 {
            out[0].push(e);
        }
        if rows && x0 >= tx1 {
            out[1].push(e);
        }
        if cols && y1 <= ty0 {
            out[2].push(e);
        }
        if cols && y0 >= ty1 {
            out[3].push(e);
        }
    }
    out.map(|v| sorted_ids(target, v))
}

pub fn relatives(target: &ElementRecord, all: &[ElementRecord], max_dist: u32) -> Vec<String> {
    let v = eligible(target, all).filter(|e| dist(&target.bbox, &e.bbox) <= max_dist as f64).collect();
    sorted_ids(target, v)
}

pub fn title(target: &ElementRecord, all: &[ElementRecord]) -> Option<String> {
    let mut v: Vec<&ElementRecord> = eligible(target, all)
        .filter(|e| matches!(e.tag.as_str(), "h1" | "h2" | "h3") && e.bbox.y < target.bbox.y)
        .collect();
    v.sort_by_key(|e| (std::cmp::Reverse(e.bbox.y), e.id.clone()));
    v.first().map(|e| e.id.clone())
}

fn is_labelable(e: &ElementRecord) -> bool {
    match e.tag.as_str() {
        "select" | "textarea" => true,
        "input" => {
            let ty = e.input_type.clone().unwrap_or_else(|| "text".into()).to_lowercase();
            !["submit", "button", "reset", "image", "hidden", "file"].contains(&ty.trim())
        }
        _ => false,
    }
}

const TEXT_TAGS: [&str; 11] = ["p", "h1", "h2", "h3", "h4", "h5", "h6", "span", "li", "td", "label"];

pub fn label(control: &ElementRecord, all: &[ElementRecord]) -> Option<String> {
    if !is_labelable(control) {
        return None;
    }
    let a = &control.attributes;
    let has = |v: &Option<String>| v.as_deref().is_some_and(|s| !s.trim().is_empty());
    if has(&a.aria_label) || has(&a.alt) || has(&a.title) {
        return None;
    }
    let b = control.bbox;
    let texts: Vec<&ElementRecord> = eligible(control, all)
        .filter(|e| TEXT_TAGS.contains(&e.tag.as_str()) && has(&e.attributes.inner_text))
        .collect();
    let row: Vec<&ElementRecord> = texts
        .iter()
        .copied()
        .filter(|e| (b.y as i64..=b.y as i64 + b.h as i64).contains(&center(&e.bbox).1))
        .collect();
    let pool = if row.is_empty() {
        texts
            .into_iter()
            .filter(|e| (b.x as i64..=b.x as i64 + b.w as i64).contains(&center(&e.bbox).0))
            .collect()
    } else {
        row
    };
    sorted_ids(control, pool).into_iter().next()
}

pub fn snap(p: Point, all: &[ElementRecord]) -> Option<String> {
    let mut best: Option<&ElementRecord> = None;
    for e in all {
        let b = e.bbox;
        let inside = p.x >= b.x && p.x - b.x <= b.w && p.y >= b.y && p.y - b.y <= b.h;
        if !e.visible || !inside {
            continue;
        }
        let better = match best {
            None => true,
            Some(cur) => {
                let (ea, ca) = (b.w as u64 * b.h as u64, cur.bbox.w as u64 * cur.bbox.h as u64);
                ea < ca || (ea == ca && e.id < cur.id)
            }
        };
        if better {
            best = Some(e);
        }
    }
    best.map(|e| e.id.clone())
}

/// Exhaustive grid search: `(cols, rows, pad_bottom)` or `None` when no
/// column count fits 36 cells.
///
/// Candidates are ranked by resolution lost to downscaling, then bottom
/// padding, then cell count, then fewer columns.
pub fn plan(w: u32, h: u32) -> Option<(u32, u32, u32)> {
    let mut best: Option<((u64, u64, u64, u32), (u32, u32, u32))> = None;
    for c in 1..=36u32 {
        for r in 1..=36u32 {
            if c * r > 36 {
                break;
            }
            let new_w = 224 * c as u64;
            let new_h = ((h as u64 * new_w) / w as u64).max(1);
            let canvas_h = 224 * r as u64;
            if new_h > canvas_h {
                continue;
            }
            let lost = (w as u64).saturating_sub(new_w);
            let key = (lost, canvas_h - new_h, (c * r) as u64, c);
            if best.is_none_or(|(k, _)| key < k) {
                best = Some((key, (c, r, (canvas_h - new_h) as u32)));
            }
        }
    }
    best.map(|(_, v)| v)
}

fn cells_needed(w: u64, h: u64) -> u64 {
    w.div_ceil(224) * h.div_ceil(224)
}

/// Widest width-first downscale that fits 36 cells, by linear scan.
pub fn resize(w: u32, h: u32) -> (u32, u32) {
    let mut nw = w as u64;
    loop {
        let nh = ((h as u64 * nw) / w as u64).max(1);
        if cells_needed(nw, nh) <= 36 || nw == 1 {
            return (nw as u32, nh as u32);
        }
        nw -= 1;
    }
}

/// Per-cell accuracy in percent, keyed by `(platform, type)`.
pub fn screenspot(records: &[EvalRecord]) -> HashMap<(Platform, ElemType), f64> {
    let mut tally: HashMap<(Platform, ElemType), (u32, u32)> = HashMap::new();
    for r in records {
        let b = r.gold_bbox;
        let hit = r.pred.x >= b.x && r.pred.x <= b.x + b.w && r.pred.y >= b.y && r.pred.y <= b.y + b.h;
        let t = tally.entry((r.platform, r.elem_type)).or_default();
        t.0 += u32::from(hit);
        t.1 += 1;
    }
    tally.into_iter().map(|(k, (c, n))| (k, 100.0 * c as f64 / n as f64)).collect()
}
