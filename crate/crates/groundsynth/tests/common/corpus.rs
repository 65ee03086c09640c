//! Deterministic synthetic page snapshots resembling real web layouts.

use std::path::{Path, PathBuf};

use groundsynth::core::geometry::{BBox, Size};
use groundsynth::core::hash::derive_rng;
use groundsynth::core::snapshot::{ElementRecord, PageSnapshot, SalientAttr};
use rand::seq::IndexedRandom;
use rand::Rng;

const NAV: [&str; 12] = [
    "Home", "About", "Products", "Pricing", "Blog", "Contact", "Careers", "Support", "Docs", "News", "Shop", "Login",
];
const WORDS: [&str; 24] = [
    "fast", "secure", "shipping", "account", "order", "latest", "update", "review", "guide", "travel", "garden", "music",
    "recipe", "weather", "market", "health", "sports", "city", "design", "coffee", "camera", "story", "event", "offer",
];
const TITLES: [&str; 8] = ["Billing", "Overview", "Features", "Latest news", "Our team", "Settings", "Reviews", "Newsletter"];
const ICON_LABELS: [&str; 8] = ["Search", "Menu", "Close", "Share", "Settings", "Cart", "Notifications", "Profile"];

trait Fill {
    fn text(&mut self, s: impl Into<String>) -> &mut Self;
    fn kind(&mut self, ty: &str) -> &mut Self;
}

impl Fill for ElementRecord {
    fn text(&mut self, s: impl Into<String>) -> &mut Self {
        self.attributes.set(SalientAttr::InnerText, s);
        self
    }

    fn kind(&mut self, ty: &str) -> &mut Self {
        self.input_type = Some(ty.into());
        self
    }
}

struct Page {
    canvas: Size,
    elements: Vec<ElementRecord>,
    next: usize,
}

impl Page {
    fn push(&mut self, tag: &str, x: u32, y: u32, w: u32, h: u32) -> &mut ElementRecord {
        let x = x.min(self.canvas.width - 1);
        let y = y.min(self.canvas.height - 1);
        let w = w.clamp(1, self.canvas.width.saturating_sub(x).max(1));
        let h = h.clamp(1, self.canvas.height.saturating_sub(y).max(1));
        let id = format!("e{:04}", self.next);
        self.next += 1;
        self.elements.push(ElementRecord::new(id, tag, BBox::new(x, y, w, h)));
        self.elements.last_mut().unwrap()
    }

    fn fits(&self, y: u32, h: u32) -> bool {
        y + h <= self.canvas.height
    }
}

fn sentence<R: Rng>(rng: &mut R, n: usize) -> String {
    let mut s: Vec<&str> = (0..n).map(|_| *WORDS.choose(rng).unwrap()).collect();
    let first = s[0].to_string();
    let cap = first[..1].to_uppercase() + &first[1..];
    s[0] = &cap;
    s.join(" ")
}

/// OCR output for visible text: usually exact, sometimes garbled, sometimes missing.
fn ocr<R: Rng>(rng: &mut R, text: &str) -> Option<String> {
    match rng.random_range(0..10) {
        0 => None,
        1 => Some("|||".into()),
        2 => Some(text.chars().filter(|c| !"aeiou".contains(*c)).collect()),
        _ => Some(text.to_string()),
    }
}

/// Snapshot number `i` of the fixture corpus. Every third page is a mobile
/// layout; every tenth is an oversized page with hundreds of links.
pub fn snapshot(i: usize) -> PageSnapshot {
    let mut rng = derive_rng(0xF1C7, &format!("fixture-{i}"));
    let mobile = i % 3 == 2;
    let (vw, vh) = if mobile { (390, 844) } else { (1280, 800) };
    let canvas = Size::new(vw, vh * rng.random_range(1..=3));
    let mut p = Page { canvas, elements: Vec::new(), next: 0 };
    let margin = if mobile { 12 } else { 40 };

    // Header.
    let logo = p.push("img", margin, 12, 120, 40);
    if rng.random_bool(0.7) {
        logo.attributes.set(SalientAttr::Alt, "Company logo");
    }
    let nav_n = if mobile { 3 } else { rng.random_range(4..8) };
    let mut x = margin + 160;
    for name in NAV.choose_multiple(&mut rng, nav_n) {
        let w = 14 + 9 * name.len() as u32;
        if x + w > vw {
            break;
        }
        let ocr_text = ocr(&mut rng, name);
        let a = p.push("a", x, 22, w, 20).text(*name);
        a.ocr_text = ocr_text;
        x += w + 16;
    }
    let icon = p.push("svg", vw - margin - 24, 20, 24, 24);
    if rng.random_bool(0.5) {
        icon.attributes.set(SalientAttr::AriaLabel, *ICON_LABELS.choose(&mut rng).unwrap());
    }
    p.push("div", 0, 0, vw, 64);

    // Body sections.
    let mut y = 96;
    let col_w = vw - 2 * margin;
    while p.fits(y, 420) {
        let title = *TITLES.choose(&mut rng).unwrap();
        let tag = ["h1", "h2", "h3", "h4"][rng.random_range(0..4)];
        p.push(tag, margin, y, 12 * title.len() as u32, 32).attributes.set(SalientAttr::InnerText, title);
        y += 48;
        match rng.random_range(0..4) {
            0 => {
                // Form block.
                let lw = 90;
                let label = ["Email", "Name", "Birthday", "Phone"][rng.random_range(0..4)];
                p.push("label", margin, y + 4, lw, 18).attributes.set(SalientAttr::InnerText, label);
                let input = p.push("input", margin + lw + 8, y, 200.min(col_w - lw - 8), 28).kind("text");
                if rng.random_bool(0.5) {
                    input.attributes.set(SalientAttr::Placeholder, format!("Enter {}", label.to_lowercase()));
                }
                y += 40;
                for opt in ["Yes", "No"] {
                    p.push("input", margin, y, 18, 18).input_type = Some("radio".into());
                    p.push("span", margin + 26, y + 1, 40, 16).attributes.set(SalientAttr::InnerText, opt);
                    y += 28;
                }
                let cb = p.push("input", margin, y, 18, 18).kind("checkbox");
                if rng.random_bool(0.3) {
                    cb.attributes.set(SalientAttr::AriaLabel, "Accept terms");
                }
                p.push("span", margin + 26, y + 1, 160, 16).attributes.set(SalientAttr::InnerText, "Subscribe to updates");
                y += 30;
                let sel = p.push("select", margin, y, 180, 28);
                if rng.random_bool(0.5) {
                    sel.attributes.set(SalientAttr::Title, "Country");
                }
                y += 40;
                let ta = p.push("textarea", margin, y, col_w.min(400), 80);
                if rng.random_bool(0.4) {
                    ta.attributes.set(SalientAttr::Placeholder, "Your message");
                }
                y += 96;
                let text = ["Submit", "Send", "Save"][rng.random_range(0..3)];
                let o = ocr(&mut rng, text);
                let b = p.push("button", margin, y, 100, 36).text(text);
                b.ocr_text = o;
                y += 52;
            }
            1 => {
                // Card grid.
                let cols = if mobile { 1 } else { 3 };
                let cw = (col_w - 24 * (cols - 1)) / cols;
                for c in 0..cols {
                    let cx = margin + c * (cw + 24);
                    let img = p.push("img", cx, y, cw, 120);
                    match rng.random_range(0..3) {
                        0 => img.attributes.set(SalientAttr::Alt, sentence(&mut rng, 3)),
                        1 => img.attributes.set(SalientAttr::Title, sentence(&mut rng, 2)),
                        _ => {}
                    }
                    let s = sentence(&mut rng, 4);
                    p.push("p", cx, y + 128, cw, 40).attributes.set(SalientAttr::InnerText, s);
                    let o = ocr(&mut rng, "Read more");
                    let a = p.push("a", cx, y + 176, 90, 18).text("Read more");
                    a.ocr_text = o;
                }
                y += 220;
            }
            2 => {
                // Article text with inline links.
                for _ in 0..rng.random_range(2..5) {
                    let words = rng.random_range(6..14);
                    let s = sentence(&mut rng, words);
                    p.push("p", margin, y, col_w, 44).attributes.set(SalientAttr::InnerText, s);
                    y += 52;
                }
                for _ in 0..rng.random_range(1..4) {
                    let s = sentence(&mut rng, 2);
                    let o = ocr(&mut rng, &s);
                    let a = p.push("a", margin, y, 10 * s.len() as u32, 18).text(s);
                    a.ocr_text = o;
                    y += 26;
                }
                let li = rng.random_range(2..5);
                for _ in 0..li {
                    let s = sentence(&mut rng, 3);
                    p.push("li", margin + 20, y, col_w - 20, 20).attributes.set(SalientAttr::InnerText, s);
                    y += 24;
                }
            }
            _ => {
                // Toolbar of icon buttons.
                let mut x = margin;
                for _ in 0..rng.random_range(3..6) {
                    if x + 40 > vw {
                        break;
                    }
                    let tag = ["button", "svg", "img"][rng.random_range(0..3)];
                    let e = p.push(tag, x, y, 32, 32);
                    match rng.random_range(0..4) {
                        0 => e.attributes.set(SalientAttr::AriaLabel, *ICON_LABELS.choose(&mut rng).unwrap()),
                        1 => e.attributes.set(SalientAttr::Title, *ICON_LABELS.choose(&mut rng).unwrap()),
                        2 => e.attributes.set(SalientAttr::AriaDescribedby, sentence(&mut rng, 3)),
                        _ => {}
                    }
                    x += 44;
                }
                y += 48;
            }
        }
        p.push("div", 0, y, vw, 8);
        y += 24;
    }

    // Oversized pages: a long link directory at the bottom.
    if i % 10 == 0 {
        let cols = if mobile { 2 } else { 6 };
        let cw = (vw - 2 * margin) / cols;
        let mut n = 0;
        let mut yy = 96;
        while n < 240 {
            for c in 0..cols {
                let s = format!("{} {n}", WORDS[n % WORDS.len()]);
                let a = p.push("a", margin + c * cw, yy, cw - 8, 14).text(s.clone());
                a.ocr_text = Some(s);
                n += 1;
            }
            yy += 3;
            if yy + 14 > canvas.height {
                yy = 96;
            }
        }
    }

    // A few hidden elements.
    for _ in 0..rng.random_range(0..3) {
        p.push("a", margin, 70, 60, 16).text("Hidden link").visible = false;
    }

    PageSnapshot {
        snapshot_id: format!("fixture-{i:04}"),
        url: format!("https://site{}.example/page/{i}", i % 17),
        viewport: Size::new(vw, vh),
        canvas,
        screenshot_ref: format!("fixture-{i:04}.png"),
        elements: p.elements,
    }
}

/// Writes snapshots `0..n` as JSON files into `dir`.
pub fn write_corpus(dir: &Path, n: usize) -> Vec<PathBuf> {
    (0..n)
        .map(|i| {
            let path = dir.join(format!("fixture-{i:04}.json"));
            std::fs::write(&path, serde_json::to_vec(&snapshot(i)).unwrap()).unwrap();
            path
        })
        .collect()
}
