//! Training samples and their per-screenshot output records.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::expression::{DescriptorSource, ReType, ReferringExpression};
use crate::geometry::{center_point, BBox, Point};
use crate::resolution::format_coordinates;
use crate::snapshot::{ElementRecord, PageSnapshot};

/// `⟨screenshot, expression, center point⟩` plus element metadata.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundingSample {
    pub snapshot_id: String,
    pub screenshot_ref: String,
    pub element_id: String,
    pub tag: String,
    pub bbox: BBox,
    pub target: Point,
    pub re: ReferringExpression,
    /// The primary descriptor text, used as the label for frequency capping.
    pub descriptor: String,
}

impl GroundingSample {
    pub fn new(snapshot_id: &str, screenshot_ref: &str, element: &ElementRecord, re: ReferringExpression, descriptor: String) -> Self {
        Self {
            snapshot_id: snapshot_id.into(),
            screenshot_ref: screenshot_ref.into(),
            element_id: element.id.clone(),
            tag: element.tag.clone(),
            bbox: element.bbox,
            target: center_point(&element.bbox),
            re,
            descriptor,
        }
    }

    pub fn entry(&self) -> SampleEntry {
        SampleEntry {
            element_id: self.element_id.clone(),
            tag: self.tag.clone(),
            bbox: self.bbox,
            target: self.target,
            re_text: self.re.text.clone(),
            re_types: self.re.re_types.iter().copied().collect(),
            descriptor_source: self.re.descriptor_source,
            descriptor: self.descriptor.clone(),
            question: question_for(&self.re.text),
            answer: format_coordinates(self.target),
        }
    }
}

/// The instruction every sample is posed with.
pub fn question_for(description: &str) -> String {
    format!("In the screenshot, what are the pixel element coordinates corresponding to {description}?")
}

/// One QA pair inside a [`ScreenshotRecord`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleEntry {
    pub element_id: String,
    pub tag: String,
    pub bbox: BBox,
    pub target: Point,
    pub re_text: String,
    pub re_types: Vec<ReType>,
    pub descriptor_source: DescriptorSource,
    #[serde(default)]
    pub descriptor: String,
    pub question: String,
    pub answer: String,
}

impl SampleEntry {
    pub fn has_type(&self, t: ReType) -> bool {
        self.re_types.contains(&t)
    }

    /// Whether the target is the center of the box and inside it.
    pub fn is_closed(&self) -> bool {
        self.target == center_point(&self.bbox) && self.bbox.contains(self.target)
    }
}

/// All samples of one screenshot, the unit written per output line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScreenshotRecord {
    pub snapshot_id: String,
    pub screenshot_ref: String,
    pub samples: Vec<SampleEntry>,
}

impl ScreenshotRecord {
    /// Groups samples by snapshot, keeping first-seen snapshot order.
    pub fn batch(samples: &[GroundingSample]) -> Vec<ScreenshotRecord> {
        let mut out: Vec<ScreenshotRecord> = Vec::new();
        for s in samples {
            match out.last_mut() {
                Some(r) if r.snapshot_id == s.snapshot_id => r.samples.push(s.entry()),
                _ => out.push(ScreenshotRecord {
                    snapshot_id: s.snapshot_id.clone(),
                    screenshot_ref: s.screenshot_ref.clone(),
                    samples: alloc::vec![s.entry()],
                }),
            }
        }
        out
    }

    pub fn sample_id(&self, entry: &SampleEntry) -> String {
        sample_id(&self.snapshot_id, &entry.element_id)
    }
}

/// Corpus-unique sample identity.
pub fn sample_id(snapshot_id: &str, element_id: &str) -> String {
    format!("{snapshot_id}/{element_id}")
}

/// Builds the samples of one snapshot and its batched output record.
///
/// Returns an empty sample list and no record when nothing was selected.
pub fn emit_samples<'a, I>(snapshot: &PageSnapshot, selected: I) -> (Vec<GroundingSample>, Option<ScreenshotRecord>)
where
    I: IntoIterator<Item = (&'a ElementRecord, ReferringExpression, String)>,
{
    let samples: Vec<GroundingSample> = selected
        .into_iter()
        .map(|(e, re, descriptor)| GroundingSample::new(&snapshot.snapshot_id, &snapshot.screenshot_ref, e, re, descriptor))
        .collect();
    let record = ScreenshotRecord::batch(&samples).into_iter().next();
    (samples, record)
}

/// Convenience for callers that need the type set as a set.
pub fn re_type_set(entry: &SampleEntry) -> BTreeSet<ReType> {
    entry.re_types.iter().copied().collect()
}
