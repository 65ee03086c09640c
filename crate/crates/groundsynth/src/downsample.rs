//! Streaming two-pass label capping over a sample JSONL file.

use std::path::Path;

use serde::Serialize;

use groundsynth_core::sample::{sample_id, SampleEntry, ScreenshotRecord};
use groundsynth_core::select::LabelCounter;

use crate::jsonl::{JsonlError, JsonlReader, JsonlWriter};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct DownsampleSummary {
    pub samples_in: u64,
    pub samples_out: u64,
    pub records_out: u64,
    pub capped_labels: u64,
}

/// The frequency-counting label of an entry; older files without a
/// descriptor fall back to the full expression.
pub fn entry_label(e: &SampleEntry) -> &str {
    if e.descriptor.is_empty() {
        &e.re_text
    } else {
        &e.descriptor
    }
}

/// Counts labels on a first read, filters on a second. Records left without
/// samples are dropped.
pub fn downsample_file(input: &Path, output: &Path, cap: usize, seed: u64) -> Result<DownsampleSummary, JsonlError> {
    let mut counter = LabelCounter::new(cap, seed);
    let mut summary = DownsampleSummary::default();
    for rec in JsonlReader::<ScreenshotRecord>::open(input)? {
        let (_, rec) = rec?;
        for e in &rec.samples {
            counter.observe(entry_label(e), &sample_id(&rec.snapshot_id, &e.element_id));
            summary.samples_in += 1;
        }
    }
    let filter = counter.freeze();
    summary.capped_labels = filter.capped_labels() as u64;

    let mut out = JsonlWriter::create(output)?;
    for rec in JsonlReader::<ScreenshotRecord>::open(input)? {
        let (_, mut rec) = rec?;
        let snap = rec.snapshot_id.clone();
        rec.samples.retain(|e| filter.keep(entry_label(e), &sample_id(&snap, &e.element_id)));
        if !rec.samples.is_empty() {
            summary.samples_out += rec.samples.len() as u64;
            summary.records_out += 1;
            out.write(&rec)?;
        }
    }
    out.finish()?;
    Ok(summary)
}
