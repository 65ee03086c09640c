//! Corpus-level synthesis: parallel per-snapshot work, then global label capping.

use std::path::{Path, PathBuf};
use std::sync::OnceLock;
use std::time::Instant;

use image::RgbImage;
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use groundsynth_core::classify::{classify_element, ElementKind};
use groundsynth_core::expression::{DescriptorSource, ReType, ReferringExpression, SynthesisPolicy};
use groundsynth_core::hash::derive_rng;
use groundsynth_core::sample::{emit_samples, GroundingSample, ScreenshotRecord};
use groundsynth_core::select::downsample_labels;
use groundsynth_core::snapshot::{ElementRecord, PageSnapshot};
use groundsynth_core::synth::{synthesize_page, Annotator, Caps, DropCounts, PageOutput};

use crate::augment::client::ClientStats;
use crate::augment::marker::{crop_png, encode_png, render_marker, MarkerError};
use crate::augment::{AugmentClient, AugmentError, DirectStyle};
use crate::snapshot_io::{read_snapshot, SnapshotError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Rule-based expressions with model descriptions for non-textual elements.
    Hybrid,
    /// Model descriptions of marker-annotated screenshots.
    DirectFree,
    DirectFunctional,
}

#[derive(Debug, Clone)]
pub struct SynthesisOptions {
    pub seed: u64,
    pub caps: Caps,
    pub policy: SynthesisPolicy,
    pub jobs: usize,
    pub mode: Mode,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        Self { seed: 0, caps: Caps::default(), policy: SynthesisPolicy::default(), jobs: 1, mode: Mode::Hybrid }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("{}: {source}", path.display())]
    Data { path: PathBuf, source: SnapshotError },
    #[error("{}: screenshot: {source}", path.display())]
    Screenshot { path: PathBuf, source: MarkerError },
    #[error(transparent)]
    Remote(#[from] AugmentError),
    #[error("worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct RunSummary {
    pub snapshots: usize,
    pub samples: usize,
    pub records: usize,
    pub drops: DropCounts,
    pub augment: ClientStats,
    pub elapsed_secs: f64,
    pub snapshots_per_sec: f64,
}

/// Resolves a snapshot's screenshot path against the snapshot file's directory.
pub fn screenshot_path(snapshot_file: &Path, s: &PageSnapshot) -> PathBuf {
    let r = Path::new(&s.screenshot_ref);
    if r.is_absolute() {
        r.to_path_buf()
    } else {
        snapshot_file.parent().unwrap_or(Path::new(".")).join(r)
    }
}

/// Loads the screenshot once, on first use.
struct Screenshot {
    path: PathBuf,
    img: OnceLock<Result<RgbImage, String>>,
}

impl Screenshot {
    fn new(path: PathBuf) -> Self {
        Self { path, img: OnceLock::new() }
    }

    fn get(&self) -> Result<&RgbImage, PipelineError> {
        self.img
            .get_or_init(|| image::open(&self.path).map(|i| i.to_rgb8()).map_err(|e| e.to_string()))
            .as_ref()
            .map_err(|e| PipelineError::Screenshot {
                path: self.path.clone(),
                source: MarkerError::Image(image::ImageError::IoError(std::io::Error::other(e.clone()))),
            })
    }
}

/// Describes elements through the model client: crop, describe, condense.
struct ClientAnnotator<'a> {
    client: &'a AugmentClient,
    shot: Screenshot,
}

impl Annotator for ClientAnnotator<'_> {
    type Error = PipelineError;

    fn describe(&self, _: &PageSnapshot, e: &ElementRecord) -> Result<Option<String>, PipelineError> {
        let crop = if self.client.is_mock() {
            None
        } else {
            let img = self.shot.get()?;
            Some(crop_png(img, e.bbox).map_err(|source| PipelineError::Screenshot { path: self.shot.path.clone(), source })?)
        };
        let Some(long) = self.client.describe_element(crop, e)? else {
            return Ok(None);
        };
        Ok(self.client.condense_description(&long)?)
    }
}

fn direct_page(
    snapshot: &PageSnapshot,
    shot: &Screenshot,
    client: &AugmentClient,
    style: DirectStyle,
    caps: &Caps,
    seed: u64,
) -> Result<PageOutput, PipelineError> {
    let mut rng = derive_rng(seed, &snapshot.snapshot_id);
    let mut drops = DropCounts::default();
    let mut targets: Vec<&ElementRecord> = Vec::new();
    for e in &snapshot.elements {
        if !e.visible {
            drops.invisible += 1;
        } else if classify_element(e) != ElementKind::Interactive {
            drops.untargeted += 1;
        } else {
            targets.push(e);
        }
    }
    targets.sort_by(|a, b| a.id.cmp(&b.id));
    targets.shuffle(&mut rng);
    if targets.len() > caps.page_elems {
        drops.page_limit += (targets.len() - caps.page_elems) as u64;
        targets.truncate(caps.page_elems);
    }
    targets.sort_by(|a, b| a.id.cmp(&b.id));

    let re_type = match style {
        DirectStyle::Free => ReType::Visual,
        DirectStyle::Functional => ReType::Functional,
    };
    let mut selected = Vec::new();
    for e in targets {
        let png = if client.is_mock() {
            Vec::new()
        } else {
            let err = |source| PipelineError::Screenshot { path: shot.path.clone(), source };
            encode_png(&render_marker(shot.get()?, e.bbox).map_err(err)?).map_err(err)?
        };
        match client.direct_describe(png, style)? {
            None => drops.augmentation_skipped += 1,
            Some(r) if !r.visible => drops.occluded += 1,
            Some(r) => {
                let re = ReferringExpression {
                    text: r.description.clone(),
                    re_types: [re_type].into_iter().collect(),
                    descriptor_source: DescriptorSource::MllmDescription,
                };
                selected.push((e, re, r.description));
            }
        }
    }
    let (samples, _) = emit_samples(snapshot, selected);
    Ok(PageOutput { samples, drops })
}

fn process(path: &Path, client: &AugmentClient, opts: &SynthesisOptions) -> Result<PageOutput, PipelineError> {
    let snapshot = read_snapshot(path).map_err(|source| PipelineError::Data { path: path.into(), source })?;
    let shot = Screenshot::new(screenshot_path(path, &snapshot));
    match opts.mode {
        Mode::Hybrid => {
            let mut rng = derive_rng(opts.seed, &snapshot.snapshot_id);
            let annotator = ClientAnnotator { client, shot };
            synthesize_page(&snapshot, &annotator, &opts.policy, &opts.caps, &mut rng)
        }
        Mode::DirectFree => direct_page(&snapshot, &shot, client, DirectStyle::Free, &opts.caps, opts.seed),
        Mode::DirectFunctional => direct_page(&snapshot, &shot, client, DirectStyle::Functional, &opts.caps, opts.seed),
    }
}

/// Synthesizes samples from `inputs` (processed in the given order).
///
/// Output is independent of `opts.jobs`: each snapshot draws from its own
/// generator seeded by `(seed, snapshot_id)`, results are gathered in input
/// order, and label capping runs afterwards over the whole corpus.
pub fn synthesize(
    inputs: &[PathBuf],
    client: &AugmentClient,
    opts: &SynthesisOptions,
) -> Result<(Vec<ScreenshotRecord>, RunSummary), PipelineError> {
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs.max(1))
        .build()
        .map_err(|e| PipelineError::Pool(e.to_string()))?;
    let outputs: Vec<Result<PageOutput, PipelineError>> =
        pool.install(|| inputs.par_iter().map(|p| process(p, client, opts)).collect());

    let mut drops = DropCounts::default();
    let mut samples: Vec<GroundingSample> = Vec::new();
    for (i, out) in outputs.into_iter().enumerate() {
        let out = out?;
        drops.merge(&out.drops);
        samples.extend(out.samples);
        if (i + 1) % 1000 == 0 {
            log::info!("{} snapshots gathered, {} samples", i + 1, samples.len());
        }
    }
    let before = samples.len();
    let samples = downsample_labels(samples, opts.caps.label_cap, opts.seed);
    drops.label_cap += (before - samples.len()) as u64;

    let records = ScreenshotRecord::batch(&samples);
    let elapsed = start.elapsed().as_secs_f64();
    let summary = RunSummary {
        snapshots: inputs.len(),
        samples: samples.len(),
        records: records.len(),
        drops,
        augment: client.stats(),
        elapsed_secs: elapsed,
        snapshots_per_sec: if elapsed > 0.0 { inputs.len() as f64 / elapsed } else { 0.0 },
    };
    Ok((records, summary))
}
