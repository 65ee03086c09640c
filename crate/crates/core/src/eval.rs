//! Grounding evaluation geometry and accuracy aggregation.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::geometry::{BBox, Point};
use crate::snapshot::ElementRecord;

/// Viewport used when splitting full-page screenshots into scroll blocks.
pub const BLOCK_VIEWPORT: (u32, u32) = (1280, 1000);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Platform {
    Mobile,
    Desktop,
    Web,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElemType {
    Text,
    IconWidget,
}

impl Platform {
    pub const ALL: [Platform; 3] = [Platform::Mobile, Platform::Desktop, Platform::Web];
}

impl ElemType {
    pub const ALL: [ElemType; 2] = [ElemType::Text, ElemType::IconWidget];
}

impl fmt::Display for Platform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Platform::Mobile => "Mobile",
            Platform::Desktop => "Desktop",
            Platform::Web => "Web",
        })
    }
}

impl fmt::Display for ElemType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ElemType::Text => "Text",
            ElemType::IconWidget => "Icon/Widget",
        })
    }
}

/// A prediction is correct when it falls in the gold box, edges included.
pub fn score_grounding(pred: Point, gold: &BBox) -> bool {
    gold.contains(pred)
}

/// Element accuracy for full-page web benchmarks; same predicate as [`score_grounding`].
pub fn score_element_accuracy(pred: Point, gold_element_bbox: &BBox) -> bool {
    score_grounding(pred, gold_element_bbox)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub id: String,
    pub pred: Point,
    pub gold_bbox: BBox,
    pub platform: Platform,
    pub elem_type: ElemType,
    pub correct: bool,
}

impl EvalRecord {
    pub fn new(id: impl Into<String>, pred: Point, gold_bbox: BBox, platform: Platform, elem_type: ElemType) -> Self {
        Self { id: id.into(), pred, gold_bbox, platform, elem_type, correct: score_grounding(pred, &gold_bbox) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub platform: Platform,
    pub elem_type: ElemType,
    pub correct: u64,
    pub total: u64,
    /// `None` when the cell has no records.
    pub accuracy: Option<f64>,
}

/// Platform × element-type accuracy table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreenSpotTable {
    /// Always six cells, platform-major.
    pub cells: Vec<Cell>,
    /// Mean of the non-empty cells.
    pub average_unweighted: Option<f64>,
    /// Correct over total across all records.
    pub average_weighted: Option<f64>,
}

impl ScreenSpotTable {
    pub fn cell(&self, platform: Platform, elem_type: ElemType) -> &Cell {
        self.cells
            .iter()
            .find(|c| c.platform == platform && c.elem_type == elem_type)
            .expect("table always has six cells")
    }
}

fn pct(correct: u64, total: u64) -> Option<f64> {
    (total > 0).then(|| correct as f64 * 100.0 / total as f64)
}

pub fn aggregate_screenspot<'a, I>(records: I) -> ScreenSpotTable
where
    I: IntoIterator<Item = &'a EvalRecord>,
{
    let mut counts = [[(0u64, 0u64); 2]; 3];
    for r in records {
        let slot = &mut counts[r.platform as usize][r.elem_type as usize];
        slot.1 += 1;
        if r.correct {
            slot.0 += 1;
        }
    }
    let mut cells = Vec::with_capacity(6);
    for p in Platform::ALL {
        for t in ElemType::ALL {
            let (correct, total) = counts[p as usize][t as usize];
            cells.push(Cell { platform: p, elem_type: t, correct, total, accuracy: pct(correct, total) });
        }
    }
    let present: Vec<f64> = cells.iter().filter_map(|c| c.accuracy).collect();
    let average_unweighted = (!present.is_empty()).then(|| present.iter().sum::<f64>() / present.len() as f64);
    let (c, t) = cells.iter().fold((0, 0), |(c, t), cell| (c + cell.correct, t + cell.total));
    ScreenSpotTable { cells, average_unweighted, average_weighted: pct(c, t) }
}

/// Viewport-height blocks `(y_offset, height)` covering a full-page screenshot.
/// The last block may be shorter.
pub fn split_page_blocks(canvas_h: u32, block_h: u32) -> Vec<(u32, u32)> {
    assert!(block_h > 0, "block height must be positive");
    let mut out = Vec::new();
    let mut y = 0;
    while y < canvas_h {
        let h = block_h.min(canvas_h - y);
        out.push((y, h));
        y += h;
    }
    out
}

/// The smallest visible element containing `p`; ties go to the lower id.
pub fn snap_to_element(p: Point, elements: &[ElementRecord]) -> Option<&ElementRecord> {
    elements
        .iter()
        .filter(|e| e.visible && e.bbox.contains(p))
        .min_by(|a, b| a.bbox.area().cmp(&b.bbox.area()).then_with(|| a.id.cmp(&b.id)))
}
