//! Converts third-party grounding datasets into the sample record format.
//!
//! Field locations come from a declarative profile (JSON pointers); the
//! source name selects the filtering rules.

use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::index::sample as sample_indices;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use groundsynth_core::expression::{DescriptorSource, ReType, ReferringExpression};
use groundsynth_core::geometry::BBox;
use groundsynth_core::hash::derive_rng;
use groundsynth_core::sample::{GroundingSample, ScreenshotRecord};
use groundsynth_core::snapshot::ElementRecord;

use crate::jsonl::{JsonlError, JsonlReader, JsonlWriter};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum SourceName {
    Guiact,
    Androidcontrol,
    WidgetCaption,
    Uibert,
    Aitz,
    WebDirect,
}

impl SourceName {
    pub fn as_str(self) -> &'static str {
        match self {
            SourceName::Guiact => "guiact",
            SourceName::Androidcontrol => "androidcontrol",
            SourceName::WidgetCaption => "widget_caption",
            SourceName::Uibert => "uibert",
            SourceName::Aitz => "aitz",
            SourceName::WebDirect => "web_direct",
        }
    }

    /// The bundled profile for this source.
    pub fn default_profile(self) -> Profile {
        let raw = match self {
            SourceName::Guiact => include_str!("../profiles/guiact.json"),
            SourceName::Androidcontrol => include_str!("../profiles/androidcontrol.json"),
            SourceName::WidgetCaption => include_str!("../profiles/widget_caption.json"),
            SourceName::Uibert => include_str!("../profiles/uibert.json"),
            SourceName::Aitz => include_str!("../profiles/aitz.json"),
            SourceName::WebDirect => include_str!("../profiles/web_direct.json"),
        };
        serde_json::from_str(raw).expect("bundled profile parses")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoxFormat {
    Xywh,
    Xyxy,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxSpec {
    pub pointer: String,
    pub format: BoxFormat,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextSpec {
    pub pointer: String,
    pub re_type: ReType,
}

fn default_captions() -> usize {
    2
}

/// Where each field lives in one input record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Profile {
    pub source: SourceName,
    pub id: String,
    pub screenshot: String,
    #[serde(default)]
    pub tag: Option<String>,
    #[serde(default)]
    pub bbox: Option<BoxSpec>,
    /// `[x, y]` or `{"x", "y"}`; becomes a 1×1 box centered on the point.
    #[serde(default)]
    pub point: Option<String>,
    #[serde(default)]
    pub expressions: Vec<TextSpec>,
    /// Array of alternative captions; a seeded subset is used.
    #[serde(default)]
    pub captions: Option<TextSpec>,
    #[serde(default = "default_captions")]
    pub captions_per_element: usize,
    #[serde(default)]
    pub multi_step_flag: Option<String>,
    #[serde(default)]
    pub visible: Option<String>,
}

pub fn load_profile(path: &Path) -> Result<Profile, AdaptError> {
    let raw = std::fs::read(path).map_err(|e| AdaptError::Profile(format!("{}: {e}", path.display())))?;
    serde_json::from_slice(&raw).map_err(|e| AdaptError::Profile(format!("{}: {e}", path.display())))
}

#[derive(Debug, thiserror::Error)]
pub enum AdaptError {
    #[error("bad profile: {0}")]
    Profile(String),
    #[error("profile is for {profile:?} but source {requested:?} was requested")]
    SourceMismatch { profile: SourceName, requested: SourceName },
    #[error("input does not match the {source_name} profile: first record lacks {pointer}")]
    InputMismatch { source_name: &'static str, pointer: String },
    #[error(transparent)]
    Jsonl(#[from] JsonlError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DropReason {
    Unmappable,
    MissingCoordinates,
    MultiStep,
    NotVisible,
    NoExpression,
}

/// Per-source accounting; `records_in == records_emitted + sum(dropped)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct AdaptCounters {
    pub records_in: u64,
    pub records_emitted: u64,
    pub samples: u64,
    pub dropped: BTreeMap<DropReason, u64>,
}

impl AdaptCounters {
    pub fn is_conserved(&self) -> bool {
        self.records_in == self.records_emitted + self.dropped.values().sum::<u64>()
    }
}

fn text_at<'a>(v: &'a Value, ptr: &str) -> Option<&'a str> {
    v.pointer(ptr)?.as_str().map(str::trim).filter(|s| !s.is_empty())
}

fn id_at(v: &Value, ptr: &str) -> Option<String> {
    match v.pointer(ptr)? {
        Value::String(s) if !s.is_empty() => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

fn coord(v: &Value) -> Option<u32> {
    let f = v.as_f64()?;
    (f.is_finite() && f >= 0.0 && f <= u32::MAX as f64).then(|| f.floor() as u32)
}

fn four(v: &Value, keys: [&str; 4]) -> Option<[u32; 4]> {
    let get = |i: usize| match v {
        Value::Array(a) => a.get(i).and_then(coord),
        Value::Object(o) => o.get(keys[i]).and_then(coord),
        _ => None,
    };
    if let Value::Array(a) = v {
        if a.len() != 4 {
            return None;
        }
    }
    Some([get(0)?, get(1)?, get(2)?, get(3)?])
}

/// `Ok(None)`: no coordinates. `Err(())`: coordinates present but unusable.
fn target_box(rec: &Value, p: &Profile) -> Result<Option<BBox>, ()> {
    if let Some(spec) = &p.bbox {
        if let Some(v) = rec.pointer(&spec.pointer).filter(|v| !v.is_null()) {
            let b = match spec.format {
                BoxFormat::Xywh => four(v, ["x", "y", "w", "h"]).map(|[x, y, w, h]| BBox::new(x, y, w, h)),
                BoxFormat::Xyxy => four(v, ["x1", "y1", "x2", "y2"])
                    .filter(|[x1, y1, x2, y2]| x2 > x1 && y2 > y1)
                    .map(|[x1, y1, x2, y2]| BBox::new(x1, y1, x2 - x1, y2 - y1)),
            };
            return b.filter(|b| b.is_well_formed()).map(Some).ok_or(());
        }
    }
    if let Some(ptr) = &p.point {
        if let Some(v) = rec.pointer(ptr).filter(|v| !v.is_null()) {
            let pt = match v {
                Value::Array(a) if a.len() == 2 => coord(&a[0]).zip(coord(&a[1])),
                Value::Object(o) => o.get("x").and_then(coord).zip(o.get("y").and_then(coord)),
                _ => None,
            };
            return pt.map(|(x, y)| Some(BBox::new(x, y, 1, 1))).ok_or(());
        }
    }
    Ok(None)
}

fn is_multi_step(rec: &Value, p: &Profile, texts: &[(String, ReType)]) -> bool {
    let flagged = p
        .multi_step_flag
        .as_deref()
        .and_then(|ptr| rec.pointer(ptr))
        .and_then(Value::as_bool)
        .unwrap_or(false);
    flagged || texts.iter().any(|(t, _)| t.split(|c: char| !c.is_alphanumeric()).any(|w| w.eq_ignore_ascii_case("then")))
}

/// One converted input record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Adapted {
    Samples(Vec<GroundingSample>),
    Dropped(DropReason),
}

/// Applies `p` and the source's rules to one record.
pub fn adapt_record(rec: &Value, p: &Profile, seed: u64) -> Adapted {
    use Adapted::Dropped;
    let (Some(id), Some(shot)) = (id_at(rec, &p.id), text_at(rec, &p.screenshot)) else {
        return Dropped(DropReason::Unmappable);
    };
    let bbox = match target_box(rec, p) {
        Ok(Some(b)) => b,
        Ok(None) => return Dropped(DropReason::MissingCoordinates),
        Err(()) => return Dropped(DropReason::Unmappable),
    };
    if let Some(ptr) = &p.visible {
        if rec.pointer(ptr).and_then(Value::as_bool) == Some(false) {
            return Dropped(DropReason::NotVisible);
        }
    }

    let mut texts: Vec<(String, ReType)> = p
        .expressions
        .iter()
        .filter_map(|s| text_at(rec, &s.pointer).map(|t| (t.to_string(), s.re_type)))
        .collect();
    if let Some(spec) = &p.captions {
        let all: Vec<&str> = rec
            .pointer(&spec.pointer)
            .and_then(Value::as_array)
            .map(|a| a.iter().filter_map(|c| c.as_str().map(str::trim).filter(|s| !s.is_empty())).collect())
            .unwrap_or_default();
        let k = p.captions_per_element.min(all.len());
        let mut rng = derive_rng(seed, &id);
        let mut picked = sample_indices(&mut rng, all.len(), k).into_vec();
        picked.sort_unstable();
        texts.extend(picked.into_iter().map(|i| (all[i].to_string(), spec.re_type)));
    }
    if p.source == SourceName::Guiact && is_multi_step(rec, p, &texts) {
        return Dropped(DropReason::MultiStep);
    }
    if texts.is_empty() {
        return Dropped(DropReason::NoExpression);
    }

    let tag = p.tag.as_deref().and_then(|ptr| text_at(rec, ptr)).unwrap_or("element");
    let snapshot_id = format!("{}:{shot}", p.source.as_str());
    let multi = texts.len() > 1;
    let samples = texts
        .into_iter()
        .enumerate()
        .map(|(k, (text, re_type))| {
            let eid = if multi { format!("{id}#{k}") } else { id.clone() };
            let element = ElementRecord::new(eid, tag, bbox);
            let re = ReferringExpression {
                text: text.clone(),
                re_types: [re_type].into_iter().collect(),
                descriptor_source: DescriptorSource::Annotation,
            };
            GroundingSample::new(&snapshot_id, shot, &element, re, text)
        })
        .collect();
    Adapted::Samples(samples)
}

fn check_first(rec: &Value, p: &Profile) -> Result<(), AdaptError> {
    for ptr in [&p.id, &p.screenshot] {
        if rec.pointer(ptr).is_none() {
            return Err(AdaptError::InputMismatch { source_name: p.source.as_str(), pointer: ptr.clone() });
        }
    }
    Ok(())
}

/// Converts every record of `input` and writes batched records to `output`.
///
/// Consecutive samples sharing a screenshot go into one output record. A
/// profile for another source, or a first record missing the id or
/// screenshot field, is a hard error; later unusable records are counted.
pub fn adapt_file(
    requested: SourceName,
    profile: &Profile,
    input: &Path,
    output: &Path,
    seed: u64,
) -> Result<AdaptCounters, AdaptError> {
    if profile.source != requested {
        return Err(AdaptError::SourceMismatch { profile: profile.source, requested });
    }
    let mut counters = AdaptCounters::default();
    let mut out = JsonlWriter::create(output)?;
    let mut pending: Vec<GroundingSample> = Vec::new();
    let flush = |pending: &mut Vec<GroundingSample>, out: &mut JsonlWriter| -> Result<(), AdaptError> {
        for r in ScreenshotRecord::batch(pending) {
            out.write(&r)?;
        }
        pending.clear();
        Ok(())
    };
    for (n, rec) in JsonlReader::<Value>::open(input)?.enumerate() {
        let (_, rec) = rec?;
        if n == 0 {
            check_first(&rec, profile)?;
        }
        counters.records_in += 1;
        match adapt_record(&rec, profile, seed) {
            Adapted::Dropped(r) => *counters.dropped.entry(r).or_default() += 1,
            Adapted::Samples(s) => {
                counters.records_emitted += 1;
                counters.samples += s.len() as u64;
                if pending.last().is_some_and(|l| l.snapshot_id != s[0].snapshot_id) {
                    flush(&mut pending, &mut out)?;
                }
                pending.extend(s);
            }
        }
    }
    flush(&mut pending, &mut out)?;
    out.finish()?;
    Ok(counters)
}
