//! Small random element sets for spatial cross-checks.

use groundsynth::core::geometry::{BBox, Point};
use groundsynth::core::snapshot::{ElementRecord, SalientAttr};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

const TAGS: [&str; 14] = ["h1", "h2", "h3", "h4", "p", "span", "label", "li", "a", "button", "input", "select", "textarea", "div"];
const INPUT_TYPES: [Option<&str>; 6] = [None, Some("radio"), Some("checkbox"), Some("submit"), Some("TEXT"), Some("file")];

fn coord<R: Rng>(rng: &mut R, max: u32) -> u32 {
    // Coarse grid values make edge contact and distance ties common.
    if rng.random_bool(0.5) {
        rng.random_range(0..=max / 20) * 20
    } else {
        rng.random_range(0..=max)
    }
}

/// Up to 25 elements on a 1200×1200 canvas, ids shuffled relative to layout.
pub fn scene<R: Rng>(rng: &mut R) -> Vec<ElementRecord> {
    let n = rng.random_range(1..=25);
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(rng);
    let mut out: Vec<ElementRecord> = Vec::with_capacity(n);
    for id in ids {
        let bbox = if !out.is_empty() && rng.random_bool(0.15) {
            // Exactly 500px away from an earlier element's center.
            let base = out.choose(rng).unwrap().bbox;
            let (dx, dy) = *[(300, 400), (400, 300), (500, 0), (0, 500)].choose(rng).unwrap();
            BBox::new(base.x + dx, base.y + dy, base.w, base.h)
        } else {
            BBox::new(coord(rng, 600), coord(rng, 600), rng.random_range(1..=200), rng.random_range(1..=120))
        };
        let tag = *TAGS.choose(rng).unwrap();
        let mut e = ElementRecord::new(format!("n{id:02}"), tag, bbox);
        if tag == "input" {
            e.input_type = INPUT_TYPES.choose(rng).unwrap().map(String::from);
        }
        match rng.random_range(0..8) {
            0 => e.attributes.set(SalientAttr::AriaLabel, "x"),
            1 => e.attributes.set(SalientAttr::Title, "  "),
            2 => e.attributes.set(SalientAttr::Alt, "pic"),
            _ => {}
        }
        if rng.random_bool(0.7) {
            e.attributes.set(SalientAttr::InnerText, if rng.random_bool(0.1) { " " } else { "word" });
        }
        e.visible = rng.random_bool(0.9);
        out.push(e);
    }
    out
}

/// Probe points: random ones plus box corners and edges.
pub fn probes<R: Rng>(rng: &mut R, els: &[ElementRecord]) -> Vec<Point> {
    let mut pts: Vec<Point> = (0..10).map(|_| Point::new(rng.random_range(0..1300), rng.random_range(0..1300))).collect();
    for e in els.iter().take(5) {
        let b = e.bbox;
        pts.push(Point::new(b.x, b.y));
        pts.push(Point::new(b.x + b.w, b.y + b.h));
        pts.push(Point::new(b.x + b.w + 1, b.y));
    }
    pts
}
