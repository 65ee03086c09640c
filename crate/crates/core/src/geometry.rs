//! Pixel-space geometry shared by synthesis and evaluation.

use serde::{Deserialize, Serialize};

/// An integer point in screenshot pixel space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Point {
    pub x: u32,
    pub y: u32,
}

impl Point {
    pub const fn new(x: u32, y: u32) -> Self {
        Self { x, y }
    }

    /// Squared Euclidean distance, exact in integer arithmetic.
    pub fn distance_sq(self, other: Point) -> u64 {
        let dx = self.x.abs_diff(other.x) as u64;
        let dy = self.y.abs_diff(other.y) as u64;
        dx * dx + dy * dy
    }
}

/// Width/height pair, used for viewports and canvases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Size {
    pub width: u32,
    pub height: u32,
}

impl Size {
    pub const fn new(width: u32, height: u32) -> Self {
        Self { width, height }
    }
}

/// Axis-aligned element box: `(x, y)` is the top-left corner, `w`/`h` are extents.
///
/// The box covers the closed interval `[x, x + w] × [y, y + h]` for containment
/// checks; `w` and `h` must be positive for a well-formed box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BBox {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

impl BBox {
    pub const fn new(x: u32, y: u32, w: u32, h: u32) -> Self {
        Self { x, y, w, h }
    }

    pub fn right(&self) -> u64 {
        self.x as u64 + self.w as u64
    }

    pub fn bottom(&self) -> u64 {
        self.y as u64 + self.h as u64
    }

    pub fn area(&self) -> u64 {
        self.w as u64 * self.h as u64
    }

    pub fn is_well_formed(&self) -> bool {
        self.w > 0 && self.h > 0
    }

    /// Inclusive containment on all four edges.
    pub fn contains(&self, p: Point) -> bool {
        let (x, y) = (p.x as u64, p.y as u64);
        x >= self.x as u64 && x <= self.right() && y >= self.y as u64 && y <= self.bottom()
    }

    pub fn fits_within(&self, canvas: Size) -> bool {
        self.right() <= canvas.width as u64 && self.bottom() <= canvas.height as u64
    }

    /// Half-open projections onto the x axis overlap.
    pub fn overlaps_horizontally(&self, other: &BBox) -> bool {
        (self.x as u64) < other.right() && (other.x as u64) < self.right()
    }

    /// Half-open projections onto the y axis overlap.
    pub fn overlaps_vertically(&self, other: &BBox) -> bool {
        (self.y as u64) < other.bottom() && (other.y as u64) < self.bottom()
    }

    pub fn center(&self) -> Point {
        center_point(self)
    }
}

/// Floor of the true midpoint. Always inside the box.
pub fn center_point(b: &BBox) -> Point {
    Point {
        x: (b.x as u64 + b.w as u64 / 2) as u32,
        y: (b.y as u64 + b.h as u64 / 2) as u32,
    }
}
