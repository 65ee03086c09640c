//! Slice-grid planning for high-resolution screenshots.
//!
//! Images are resized by width only so that the width is a whole number of
//! 224px cells, then padded at the bottom to a whole number of rows. At most
//! 36 cells are allowed, giving 1344×1344 (landscape) and 896×2016 (portrait)
//! as the largest native-scale inputs.

use alloc::format;
use alloc::string::String;

use serde::{Deserialize, Serialize};

use crate::geometry::Point;

pub const CELL: u32 = 224;
pub const MAX_CELLS: u32 = 36;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPlan {
    pub cols: u32,
    pub rows: u32,
    pub cell: u32,
    /// `(cols × cell, rows × cell)`.
    pub target: (u32, u32),
    /// Resize ratio from original to model space.
    pub scale: f64,
    pub pad_bottom: u32,
    /// Non-zero only for images taller than 36 cells even at one column wide,
    /// which must be fit by height instead.
    pub pad_right: u32,
}

impl GridPlan {
    pub fn cells(&self) -> u32 {
        self.cols * self.rows
    }
}

fn div_ceil(a: u64, b: u64) -> u64 {
    a.div_ceil(b)
}

/// Height after scaling width from `w` to `new_w`, floored.
fn scaled_height(w: u32, h: u32, new_w: u64) -> u64 {
    (h as u64 * new_w) / w as u64
}

/// Rows needed for `c` columns, and the resulting height.
fn rows_for(w: u32, h: u32, c: u32) -> (u64, u64) {
    let sh = scaled_height(w, h, c as u64 * CELL as u64).max(1);
    (div_ceil(sh, CELL as u64), sh)
}

/// Selection key; smaller is better.
///
/// Primary: keep as much resolution as possible (prefer `scale >= 1`, else
/// the largest scale). Then least bottom padding, then fewest cells.
fn plan_key(w: u32, c: u32, pad: u64, cells: u64) -> (u64, u64, u64) {
    let target_w = c as u64 * CELL as u64;
    let lost = (w as u64).saturating_sub(target_w);
    (lost, pad, cells)
}

/// Chooses the column count and derives rows, scale and padding.
pub fn plan_grid(w: u32, h: u32) -> GridPlan {
    assert!(w > 0 && h > 0, "plan_grid requires a non-empty image");
    let mut best: Option<((u64, u64, u64), u32, u64, u64)> = None;
    for c in 1..=MAX_CELLS {
        let (rows, sh) = rows_for(w, h, c);
        if c as u64 * rows > MAX_CELLS as u64 {
            continue;
        }
        let pad = rows * CELL as u64 - sh;
        let key = plan_key(w, c, pad, c as u64 * rows);
        if best.is_none_or(|b| key < b.0) {
            best = Some((key, c, rows, pad));
        }
    }
    match best {
        Some((_, cols, rows, pad)) => GridPlan {
            cols,
            rows: rows as u32,
            cell: CELL,
            target: (cols * CELL, rows as u32 * CELL),
            scale: (cols * CELL) as f64 / w as f64,
            pad_bottom: pad as u32,
            pad_right: 0,
        },
        None => tall_plan(w, h),
    }
}

/// Single-column plan for aspect ratios beyond 1:36, fit by height.
fn tall_plan(w: u32, h: u32) -> GridPlan {
    let max_h = (MAX_CELLS * CELL) as u64;
    let new_w = ((w as u64 * max_h) / h as u64).max(1);
    GridPlan {
        cols: 1,
        rows: MAX_CELLS,
        cell: CELL,
        target: (CELL, MAX_CELLS * CELL),
        scale: max_h as f64 / h as f64,
        pad_bottom: (max_h - scaled_height(w, h, new_w).min(max_h)) as u32,
        pad_right: (CELL as u64 - new_w.min(CELL as u64)) as u32,
    }
}

/// Whether an image fits the grid budget without resizing.
pub fn fits_natively(w: u32, h: u32) -> bool {
    div_ceil(w as u64, CELL as u64) * div_ceil(h as u64, CELL as u64) <= MAX_CELLS as u64
}

/// Shrinks an image by width (aspect preserved) until it fits the cell budget.
///
/// Returns `(w', h', scale)`; never upscales.
pub fn resize_for_model(w: u32, h: u32) -> (u32, u32, f64) {
    assert!(w > 0 && h > 0, "resize_for_model requires a non-empty image");
    if fits_natively(w, h) {
        return (w, h, 1.0);
    }
    // For each column budget c, the widest w' with ceil(w'/224) <= c and
    // ceil(floor(h*w'/w)/224) <= 36/c.
    let mut best_w = 0u64;
    for c in 1..=MAX_CELLS as u64 {
        let max_rows = MAX_CELLS as u64 / c;
        let max_h = max_rows * CELL as u64;
        // floor(h*w'/w) <= max_h  <=>  w' <= ((max_h+1)*w - 1) / h
        let by_height = ((max_h + 1) * w as u64 - 1) / h as u64;
        let cand = (w as u64).min(c * CELL as u64).min(by_height);
        best_w = best_w.max(cand);
    }
    let new_w = best_w.max(1);
    let new_h = scaled_height(w, h, new_w).max(1);
    (new_w as u32, new_h as u32, new_w as f64 / w as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapDirection {
    ToModel,
    ToOriginal,
}

/// Moves a point between original and model pixel space, flooring.
///
/// Bottom padding never shifts coordinates.
pub fn map_point(p: Point, scale: f64, direction: MapDirection) -> Point {
    assert!(scale > 0.0, "scale must be positive");
    let f = |v: u32| -> u32 {
        let r = match direction {
            MapDirection::ToModel => v as f64 * scale,
            MapDirection::ToOriginal => v as f64 / scale,
        };
        libm::floor(r).clamp(0.0, u32::MAX as f64) as u32
    };
    Point::new(f(p.x), f(p.y))
}

/// `"(x, y)"`.
pub fn format_coordinates(p: Point) -> String {
    format!("({}, {})", p.x, p.y)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("no \"(x, y)\" integer pair found in {input:?}")]
pub struct CoordinateParseError {
    pub input: String,
}

/// Extracts the first parenthesized non-negative integer pair, tolerating
/// surrounding prose and whitespace inside the parentheses.
pub fn parse_coordinates(s: &str) -> Result<Point, CoordinateParseError> {
    let bytes = s.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'(' {
            if let Some(p) = pair_at(bytes, i + 1) {
                return Ok(p);
            }
        }
        i += 1;
    }
    Err(CoordinateParseError { input: s.into() })
}

fn pair_at(b: &[u8], mut i: usize) -> Option<Point> {
    let skip_ws = |i: &mut usize| {
        while *i < b.len() && b[*i].is_ascii_whitespace() {
            *i += 1;
        }
    };
    let number = |i: &mut usize| -> Option<u32> {
        let start = *i;
        while *i < b.len() && b[*i].is_ascii_digit() {
            *i += 1;
        }
        core::str::from_utf8(&b[start..*i]).ok()?.parse().ok()
    };
    skip_ws(&mut i);
    let x = number(&mut i)?;
    skip_ws(&mut i);
    (b.get(i) == Some(&b',')).then_some(())?;
    i += 1;
    skip_ws(&mut i);
    let y = number(&mut i)?;
    skip_ws(&mut i);
    (b.get(i) == Some(&b')')).then_some(())?;
    Some(Point::new(x, y))
}
