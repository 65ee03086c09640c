//! Geometric and structural relations between elements of one snapshot.
//!
//! Every query takes the target plus a slice of candidate elements from the
//! same snapshot. The target itself (matched by id) and invisible elements are
//! never returned. Results never depend on the order of the candidate slice:
//! ties always break by ascending element id.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::classify::{classify_element, ElementKind};
use crate::geometry::{center_point, BBox, Size};
use crate::snapshot::{ElementRecord, SalientAttr};

/// Default radius for relative-position references.
pub const DEFAULT_RELATIVE_DISTANCE: u32 = 500;

pub const TITLE_TAGS: [&str; 3] = ["h1", "h2", "h3"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationKind {
    LeftOf,
    RightOf,
    Above,
    Below,
    NextTo,
    Between,
    UnderTitle,
    LabeledBy,
}

/// `subject` relates to `object` by `kind`; e.g. subject `LeftOf` object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Relation {
    pub subject_id: alloc::string::String,
    pub object_id: alloc::string::String,
    pub kind: RelationKind,
    /// Center-to-center Euclidean distance in pixels.
    pub distance: f64,
}

impl Relation {
    pub fn between(subject: &ElementRecord, object: &ElementRecord, kind: RelationKind) -> Self {
        Self {
            subject_id: subject.id.clone(),
            object_id: object.id.clone(),
            kind,
            distance: libm::sqrt(center_distance_sq(subject, object) as f64),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Left,
    Right,
    Above,
    Below,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::Left, Direction::Right, Direction::Above, Direction::Below];

    pub fn opposite(self) -> Direction {
        match self {
            Direction::Left => Direction::Right,
            Direction::Right => Direction::Left,
            Direction::Above => Direction::Below,
            Direction::Below => Direction::Above,
        }
    }

    /// Relation of the *target* to a neighbor found in this direction.
    ///
    /// A neighbor on the right means the target is left of it.
    pub fn target_relation(self) -> RelationKind {
        match self {
            Direction::Left => RelationKind::RightOf,
            Direction::Right => RelationKind::LeftOf,
            Direction::Above => RelationKind::Below,
            Direction::Below => RelationKind::Above,
        }
    }
}

/// One cell of the 3×3 equal-thirds grid over the canvas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RegionLabel {
    #[serde(rename = "top-left corner")]
    TopLeft,
    #[serde(rename = "top")]
    Top,
    #[serde(rename = "top-right corner")]
    TopRight,
    #[serde(rename = "left")]
    Left,
    #[serde(rename = "center")]
    Center,
    #[serde(rename = "right")]
    Right,
    #[serde(rename = "bottom-left corner")]
    BottomLeft,
    #[serde(rename = "bottom")]
    Bottom,
    #[serde(rename = "bottom-right corner")]
    BottomRight,
}

impl RegionLabel {
    const GRID: [[RegionLabel; 3]; 3] = [
        [RegionLabel::TopLeft, RegionLabel::Top, RegionLabel::TopRight],
        [RegionLabel::Left, RegionLabel::Center, RegionLabel::Right],
        [RegionLabel::BottomLeft, RegionLabel::Bottom, RegionLabel::BottomRight],
    ];

    pub fn from_cell(row: usize, col: usize) -> RegionLabel {
        Self::GRID[row][col]
    }

    pub fn name(self) -> &'static str {
        match self {
            RegionLabel::TopLeft => "top-left corner",
            RegionLabel::Top => "top",
            RegionLabel::TopRight => "top-right corner",
            RegionLabel::Left => "left",
            RegionLabel::Center => "center",
            RegionLabel::Right => "right",
            RegionLabel::BottomLeft => "bottom-left corner",
            RegionLabel::Bottom => "bottom",
            RegionLabel::BottomRight => "bottom-right corner",
        }
    }
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn third(coord: u32, extent: u32) -> usize {
    if extent == 0 {
        return 1;
    }
    ((3 * coord as u64) / extent as u64).min(2) as usize
}

/// Region of the canvas grid that contains the element's center.
pub fn absolute_region(b: &BBox, canvas: Size) -> RegionLabel {
    let c = center_point(b);
    RegionLabel::from_cell(third(c.y, canvas.height), third(c.x, canvas.width))
}

pub fn center_distance_sq(a: &ElementRecord, b: &ElementRecord) -> u64 {
    center_point(&a.bbox).distance_sq(center_point(&b.bbox))
}

fn by_distance_then_id<'a>(target: &ElementRecord) -> impl FnMut(&&'a ElementRecord, &&'a ElementRecord) -> Ordering + '_ {
    move |a, b| {
        center_distance_sq(target, a)
            .cmp(&center_distance_sq(target, b))
            .then_with(|| a.id.cmp(&b.id))
    }
}

fn is_candidate(target: &ElementRecord, e: &ElementRecord) -> bool {
    e.visible && e.id != target.id
}

/// Whether `other` lies strictly on side `dir` of `target` with overlapping
/// projections on the perpendicular axis.
pub fn lies_in_direction(target: &BBox, other: &BBox, dir: Direction) -> bool {
    match dir {
        Direction::Left => other.right() <= target.x as u64 && other.overlaps_vertically(target),
        Direction::Right => other.x as u64 >= target.right() && other.overlaps_vertically(target),
        Direction::Above => other.bottom() <= target.y as u64 && other.overlaps_horizontally(target),
        Direction::Below => other.y as u64 >= target.bottom() && other.overlaps_horizontally(target),
    }
}

/// Neighbors of a target per direction, each list nearest first.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Neighbors<'a> {
    pub left: Vec<&'a ElementRecord>,
    pub right: Vec<&'a ElementRecord>,
    pub above: Vec<&'a ElementRecord>,
    pub below: Vec<&'a ElementRecord>,
}

impl<'a> Neighbors<'a> {
    pub fn get(&self, dir: Direction) -> &[&'a ElementRecord] {
        match dir {
            Direction::Left => &self.left,
            Direction::Right => &self.right,
            Direction::Above => &self.above,
            Direction::Below => &self.below,
        }
    }

    fn get_mut(&mut self, dir: Direction) -> &mut Vec<&'a ElementRecord> {
        match dir {
            Direction::Left => &mut self.left,
            Direction::Right => &mut self.right,
            Direction::Above => &mut self.above,
            Direction::Below => &mut self.below,
        }
    }

    pub fn ids(&self, dir: Direction) -> Vec<&'a str> {
        self.get(dir).iter().map(|e| e.id.as_str()).collect()
    }

    pub fn is_empty(&self) -> bool {
        Direction::ALL.iter().all(|d| self.get(*d).is_empty())
    }

    /// Keeps only neighbors accepted by `keep`.
    pub fn retain(&mut self, mut keep: impl FnMut(&ElementRecord) -> bool) {
        for d in Direction::ALL {
            self.get_mut(d).retain(|e| keep(e));
        }
    }
}

pub fn directional_neighbors<'a>(target: &ElementRecord, others: &'a [ElementRecord]) -> Neighbors<'a> {
    let mut out = Neighbors::default();
    for e in others.iter().filter(|e| is_candidate(target, e)) {
        for dir in Direction::ALL {
            if lies_in_direction(&target.bbox, &e.bbox, dir) {
                out.get_mut(dir).push(e);
            }
        }
    }
    for dir in Direction::ALL {
        out.get_mut(dir).sort_by(by_distance_then_id(target));
    }
    out
}

/// Elements whose center lies within `max_dist` pixels of the target's center (inclusive).
pub fn candidate_relatives<'a>(target: &ElementRecord, others: &'a [ElementRecord], max_dist: u32) -> Vec<&'a ElementRecord> {
    let limit = max_dist as u64 * max_dist as u64;
    let mut out: Vec<_> = others
        .iter()
        .filter(|e| is_candidate(target, e) && center_distance_sq(target, e) <= limit)
        .collect();
    out.sort_by(by_distance_then_id(target));
    out
}

/// The vertically nearest `h1`–`h3` whose top edge is strictly above the target's.
pub fn nearest_title<'a>(target: &ElementRecord, others: &'a [ElementRecord]) -> Option<&'a ElementRecord> {
    others
        .iter()
        .filter(|e| is_candidate(target, e) && TITLE_TAGS.contains(&e.tag.as_str()) && e.bbox.y < target.bbox.y)
        .min_by(|a, b| b.bbox.y.cmp(&a.bbox.y).then_with(|| a.id.cmp(&b.id)))
}

const NON_LABELABLE_INPUTS: [&str; 6] = ["submit", "button", "reset", "image", "hidden", "file"];

/// The form controls that carry a contextual label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ControlKind {
    Radio,
    Checkbox,
    TextInput,
    Select,
    TextArea,
}

pub fn control_kind(e: &ElementRecord) -> Option<ControlKind> {
    match e.tag.as_str() {
        "select" => Some(ControlKind::Select),
        "textarea" => Some(ControlKind::TextArea),
        "input" => {
            let ty = e.input_type.as_deref().unwrap_or("text").trim().to_ascii_lowercase();
            match ty.as_str() {
                "radio" => Some(ControlKind::Radio),
                "checkbox" => Some(ControlKind::Checkbox),
                t if NON_LABELABLE_INPUTS.contains(&t) => None,
                _ => Some(ControlKind::TextInput),
            }
        }
        _ => None,
    }
}

/// Label text carried directly by the control's attributes.
pub fn attribute_label(e: &ElementRecord) -> Option<&str> {
    [SalientAttr::AriaLabel, SalientAttr::Alt, SalientAttr::Title]
        .into_iter()
        .find_map(|a| e.attributes.non_empty(a))
}

/// Nearest pure-text element on the control's row, falling back to its column.
///
/// Returns `None` for non-controls and for controls whose attributes already
/// carry a label; callers use [`attribute_label`] for those.
pub fn associate_label<'a>(control: &ElementRecord, others: &'a [ElementRecord]) -> Option<&'a ElementRecord> {
    if control_kind(control).is_none() || attribute_label(control).is_some() {
        return None;
    }
    let b = control.bbox;
    let texts: Vec<&ElementRecord> = others
        .iter()
        .filter(|e| is_candidate(control, e) && classify_element(e) == ElementKind::PureText && e.inner_text().is_some())
        .collect();
    let same_row = texts.iter().copied().filter(|e| {
        let c = center_point(&e.bbox).y as u64;
        c >= b.y as u64 && c <= b.bottom()
    });
    let mut cmp = by_distance_then_id(control);
    if let Some(best) = same_row.min_by(|a, b| cmp(a, b)) {
        return Some(best);
    }
    texts
        .into_iter()
        .filter(|e| {
            let c = center_point(&e.bbox).x as u64;
            c >= b.x as u64 && c <= b.right()
        })
        .min_by(|a, b| cmp(a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn el(id: &str, x: u32, y: u32, w: u32, h: u32) -> ElementRecord {
        ElementRecord::new(id, "a", BBox::new(x, y, w, h))
    }

    #[test]
    fn regions() {
        let canvas = Size::new(1200, 900);
        assert_eq!(absolute_region(&BBox::new(590, 440, 20, 20), canvas), RegionLabel::Center);
        assert_eq!(absolute_region(&BBox::new(90, 90, 20, 20), canvas), RegionLabel::TopLeft);
        assert_eq!(absolute_region(&BBox::new(590, 870, 20, 20), canvas), RegionLabel::Bottom);
        assert_eq!(absolute_region(&BBox::new(1190, 890, 10, 10), canvas), RegionLabel::BottomRight);
    }

    #[test]
    fn single_right_neighbor() {
        let t = el("t", 0, 0, 10, 10);
        let others = vec![el("r", 50, 2, 10, 10)];
        let n = directional_neighbors(&t, &others);
        assert_eq!(n.ids(Direction::Right), vec!["r"]);
        assert!(n.left.is_empty() && n.above.is_empty() && n.below.is_empty());
    }

    #[test]
    fn diagonal_is_no_neighbor() {
        let t = el("t", 0, 0, 10, 10);
        let others = vec![el("d", 50, 50, 10, 10)];
        assert!(directional_neighbors(&t, &others).is_empty());
    }

    #[test]
    fn relative_distance_boundary() {
        let t = el("t", 0, 0, 2, 2);
        let others = vec![el("in", 499, 0, 2, 2), el("edge", 0, 500, 2, 2), el("out", 501, 0, 2, 2)];
        let ids: Vec<_> = candidate_relatives(&t, &others, 500).iter().map(|e| e.id.as_str()).collect();
        assert_eq!(ids, vec!["in", "edge"]);
    }

    #[test]
    fn titles() {
        let mut h1 = el("h1", 0, 100, 100, 20);
        h1.tag = "h1".into();
        let mut h2 = el("h2", 0, 300, 100, 20);
        h2.tag = "h2".into();
        let t = el("t", 0, 500, 10, 10);
        let others = vec![h1.clone(), h2.clone()];
        assert_eq!(nearest_title(&t, &others).map(|e| e.id.as_str()), Some("h2"));
        let top = el("t", 0, 50, 10, 10);
        assert!(nearest_title(&top, &others).is_none());

        let mut a = el("b-title", 0, 300, 100, 20);
        a.tag = "h3".into();
        let others = vec![a, h2];
        assert_eq!(nearest_title(&t, &others).map(|e| e.id.as_str()), Some("b-title"));
    }

    #[test]
    fn radio_label_same_row() {
        let radio = ElementRecord::new("r", "input", BBox::new(100, 100, 20, 20)).with_input_type("radio");
        let yes = ElementRecord::new("yes", "span", BBox::new(130, 102, 40, 16)).with_text("Yes");
        let far = ElementRecord::new("far", "span", BBox::new(600, 104, 40, 16)).with_text("Other");
        let others = vec![far, yes];
        assert_eq!(associate_label(&radio, &others).map(|e| e.id.as_str()), Some("yes"));

        let labeled = radio.clone().with_attr(SalientAttr::AriaLabel, "Yes");
        assert!(associate_label(&labeled, &others).is_none());
    }

    #[test]
    fn label_falls_back_to_column() {
        let input = ElementRecord::new("i", "input", BBox::new(100, 100, 200, 30));
        let below = ElementRecord::new("lbl", "label", BBox::new(110, 140, 80, 16)).with_text("Birthday");
        let div = ElementRecord::new("div", "div", BBox::new(120, 50, 80, 16)).with_text("not text tag");
        let others = vec![below, div];
        assert_eq!(associate_label(&input, &others).map(|e| e.id.as_str()), Some("lbl"));
    }

    #[test]
    fn non_controls_have_no_label() {
        let submit = ElementRecord::new("s", "input", BBox::new(0, 0, 10, 10)).with_input_type("submit");
        assert!(control_kind(&submit).is_none());
        let others = vec![ElementRecord::new("t", "span", BBox::new(20, 0, 10, 10)).with_text("x")];
        assert!(associate_label(&submit, &others).is_none());
    }

    #[test]
    fn relation_distance() {
        let a = el("a", 0, 0, 2, 2);
        let b = el("b", 3, 4, 2, 2);
        let r = Relation::between(&a, &b, RelationKind::LeftOf);
        assert!((r.distance - 5.0).abs() < 1e-12);
    }
}
