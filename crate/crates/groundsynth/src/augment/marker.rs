//! Red box and arrow overlay marking one element on a screenshot.

use std::io::Cursor;
use std::path::Path;

use image::{ImageFormat, Rgb, RgbImage};

use groundsynth_core::geometry::{BBox, Size};

pub const RED: Rgb<u8> = Rgb([255, 0, 0]);
/// Box outline thickness, drawn inside the box.
pub const STROKE: u32 = 2;
pub const ARROW_LEN: u32 = 40;
pub const MIN_ARROW_LEN: u32 = 6;
pub const HEAD_LEN: u32 = 8;

#[derive(Debug, thiserror::Error)]
pub enum MarkerError {
    #[error("bbox out of canvas")]
    OutOfCanvas,
    #[error("bbox too small to annotate")]
    TooSmall,
    #[error("no room for the arrow around the bbox")]
    NoRoom,
    #[error(transparent)]
    Image(#[from] image::ImageError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Edge {
    Top,
    Right,
    Bottom,
    Left,
}

/// Arrow placement: a 45° shaft from `tail` (outside the box) to `tip`, the
/// midpoint of `edge`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arrow {
    pub edge: Edge,
    pub tip: (i64, i64),
    pub tail: (i64, i64),
}

impl Arrow {
    /// Unit step from tip towards tail.
    pub fn back(&self) -> (i64, i64) {
        ((self.tail.0 - self.tip.0).signum(), (self.tail.1 - self.tip.1).signum())
    }

    /// The two arrowhead barbs, each a unit step from the tip.
    pub fn barbs(&self) -> [(i64, i64); 2] {
        let (dx, dy) = self.back();
        [(dx, 0), (0, dy)]
    }
}

/// Picks the edge leaving the longest arrow; ties keep top, right, bottom, left order.
pub fn place_arrow(canvas: Size, b: &BBox) -> Result<Arrow, MarkerError> {
    if !b.is_well_formed() || !b.fits_within(canvas) {
        return Err(MarkerError::OutOfCanvas);
    }
    if b.w < 2 * STROKE + 1 || b.h < 2 * STROKE + 1 {
        return Err(MarkerError::TooSmall);
    }
    let (x0, y0) = (b.x as i64, b.y as i64);
    let (x1, y1) = (x0 + b.w as i64 - 1, y0 + b.h as i64 - 1);
    let (cx, cy) = (x0 + b.w as i64 / 2, y0 + b.h as i64 / 2);
    let (maxx, maxy) = (canvas.width as i64 - 1, canvas.height as i64 - 1);
    let options = [
        (Edge::Top, (cx, y0), (1, -1), (maxx - cx).min(y0)),
        (Edge::Right, (x1, cy), (1, -1), (maxx - x1).min(cy)),
        (Edge::Bottom, (cx, y1), (1, 1), (maxx - cx).min(maxy - y1)),
        (Edge::Left, (x0, cy), (-1, -1), x0.min(cy)),
    ];
    let mut best: Option<(i64, Arrow)> = None;
    for (edge, tip, (dx, dy), room) in options {
        let len = room.min(ARROW_LEN as i64);
        if len >= MIN_ARROW_LEN as i64 && best.is_none_or(|(l, _)| len > l) {
            best = Some((len, Arrow { edge, tip, tail: (tip.0 + dx * len, tip.1 + dy * len) }));
        }
    }
    best.map(|(_, a)| a).ok_or(MarkerError::NoRoom)
}

fn put(img: &mut RgbImage, x: i64, y: i64) {
    if x >= 0 && y >= 0 && (x as u32) < img.width() && (y as u32) < img.height() {
        img.put_pixel(x as u32, y as u32, RED);
    }
}

/// Draws `n + 1` pixels from `from` in unit steps `(dx, dy)`, two pixels wide.
fn ray(img: &mut RgbImage, from: (i64, i64), (dx, dy): (i64, i64), n: i64) {
    for i in 0..=n {
        let (x, y) = (from.0 + dx * i, from.1 + dy * i);
        put(img, x, y);
        if dx != 0 && dy != 0 {
            put(img, x - dx, y);
        } else if dx == 0 {
            put(img, x + 1, y);
        } else {
            put(img, x, y + 1);
        }
    }
}

/// Returns a copy of `img` with the box outline and arrow drawn.
pub fn render_marker(img: &RgbImage, b: BBox) -> Result<RgbImage, MarkerError> {
    let arrow = place_arrow(Size::new(img.width(), img.height()), &b)?;
    let mut out = img.clone();
    for y in b.y..b.y + b.h {
        for x in b.x..b.x + b.w {
            let edge_dist = (x - b.x).min(b.x + b.w - 1 - x).min(y - b.y).min(b.y + b.h - 1 - y);
            if edge_dist < STROKE {
                out.put_pixel(x, y, RED);
            }
        }
    }
    let len = (arrow.tail.0 - arrow.tip.0).abs();
    ray(&mut out, arrow.tip, arrow.back(), len);
    for barb in arrow.barbs() {
        ray(&mut out, arrow.tip, barb, HEAD_LEN as i64);
    }
    Ok(out)
}

pub fn encode_png(img: &RgbImage) -> Result<Vec<u8>, MarkerError> {
    let mut buf = Cursor::new(Vec::new());
    img.write_to(&mut buf, ImageFormat::Png)?;
    Ok(buf.into_inner())
}

/// Reads `screenshot`, marks `b` and writes a new PNG to `out`.
pub fn render_marker_file(screenshot: &Path, b: BBox, out: &Path) -> Result<(), MarkerError> {
    let img = image::open(screenshot)?.to_rgb8();
    let marked = render_marker(&img, b)?;
    std::fs::write(out, encode_png(&marked)?).map_err(|e| MarkerError::Image(image::ImageError::IoError(e)))
}

/// Crops `b` out of `img` as PNG bytes.
pub fn crop_png(img: &RgbImage, b: BBox) -> Result<Vec<u8>, MarkerError> {
    if !b.is_well_formed() || !b.fits_within(Size::new(img.width(), img.height())) {
        return Err(MarkerError::OutOfCanvas);
    }
    let crop = image::imageops::crop_imm(img, b.x, b.y, b.w, b.h).to_image();
    encode_png(&crop)
}
