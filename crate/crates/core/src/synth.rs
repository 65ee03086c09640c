//! Turns one snapshot into grounding samples.
//!
//! The model-backed description step is abstracted behind [`Annotator`] so
//! this module stays free of IO.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::convert::Infallible;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::classify::{classify, dedup_ambiguous, ElementKind, TEXTUAL_THRESHOLD};
use crate::expression::{
    assemble_re, choose_primary_descriptor, contextual_phrase, positional_phrase, ReferringExpression, SynthesisPolicy,
};
use crate::sample::{emit_samples, GroundingSample};
use crate::select::{select_page_elements, Candidate, DEFAULT_LABEL_CAP, DEFAULT_PAGE_ELEMENTS};
use crate::snapshot::{ElementRecord, PageSnapshot, SalientAttr};
use crate::spatial::{
    absolute_region, associate_label, attribute_label, center_distance_sq, control_kind, directional_neighbors,
    nearest_title, Direction, RelationKind, DEFAULT_RELATIVE_DISTANCE,
};

/// Longest text usable when referring to another element.
pub const MAX_REFERENCE_CHARS: usize = 60;

/// Numeric limits applied during synthesis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Caps {
    pub page_elems: usize,
    pub label_cap: usize,
    pub rel_dist: u32,
    pub sim_threshold: f64,
}

impl Default for Caps {
    fn default() -> Self {
        Self {
            page_elems: DEFAULT_PAGE_ELEMENTS,
            label_cap: DEFAULT_LABEL_CAP,
            rel_dist: DEFAULT_RELATIVE_DISTANCE,
            sim_threshold: TEXTUAL_THRESHOLD,
        }
    }
}

/// Source of model-written element descriptions.
///
/// `Ok(None)` means the description was skipped (retries exhausted, empty or
/// malformed reply); the element may still be described by its attributes.
/// `Err` aborts the page.
pub trait Annotator {
    type Error;

    fn describe(&self, snapshot: &PageSnapshot, element: &ElementRecord) -> Result<Option<String>, Self::Error>;
}

/// Annotator that never describes anything.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoAnnotator;

impl Annotator for NoAnnotator {
    type Error = Infallible;

    fn describe(&self, _: &PageSnapshot, _: &ElementRecord) -> Result<Option<String>, Infallible> {
        Ok(None)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DropCounts {
    pub invisible: u64,
    pub untargeted: u64,
    pub ambiguous: u64,
    pub no_descriptor: u64,
    pub augmentation_skipped: u64,
    /// Reported not visible by the marker-based describer.
    pub occluded: u64,
    pub pure_text_cap: u64,
    pub page_limit: u64,
    pub label_cap: u64,
}

impl DropCounts {
    pub fn merge(&mut self, o: &DropCounts) {
        self.invisible += o.invisible;
        self.untargeted += o.untargeted;
        self.ambiguous += o.ambiguous;
        self.no_descriptor += o.no_descriptor;
        self.augmentation_skipped += o.augmentation_skipped;
        self.occluded += o.occluded;
        self.pure_text_cap += o.pure_text_cap;
        self.page_limit += o.page_limit;
        self.label_cap += o.label_cap;
    }
}

#[derive(Debug, Clone, Default)]
pub struct PageOutput {
    pub samples: Vec<GroundingSample>,
    pub drops: DropCounts,
}

/// Short text for mentioning `e` inside another element's expression.
pub fn reference_text(e: &ElementRecord) -> Option<&str> {
    [
        SalientAttr::InnerText,
        SalientAttr::AriaLabel,
        SalientAttr::Alt,
        SalientAttr::Title,
        SalientAttr::Placeholder,
        SalientAttr::Value,
    ]
    .into_iter()
    .find_map(|a| e.attributes.non_empty(a))
    .filter(|t| t.chars().count() <= MAX_REFERENCE_CHARS)
}

/// Candidate relative clauses for `target`, in random order.
///
/// One randomly chosen neighbor per direction (within `max_dist`), optionally
/// merged into "between" clauses, plus the enclosing section title.
pub fn relative_clauses<R: Rng + ?Sized>(
    target: &ElementRecord,
    elements: &[ElementRecord],
    is_reference: impl Fn(&ElementRecord) -> bool,
    max_dist: u32,
    policy: &SynthesisPolicy,
    rng: &mut R,
) -> Vec<String> {
    let limit = max_dist as u64 * max_dist as u64;
    let mut neighbors = directional_neighbors(target, elements);
    neighbors.retain(|e| is_reference(e) && center_distance_sq(target, e) <= limit);

    let mut picks: [Option<&str>; 4] = [None; 4];
    for (slot, dir) in picks.iter_mut().zip(Direction::ALL) {
        let list = neighbors.get(dir);
        if !list.is_empty() {
            *slot = reference_text(list[rng.random_range(0..list.len())]);
        }
    }

    let mut specs: Vec<(RelationKind, Vec<&str>)> = Vec::new();
    for (a, b) in [(0usize, 1usize), (2, 3)] {
        match (picks[a], picks[b]) {
            (Some(x), Some(y)) if policy.p_between > 0.0 && rng.random_bool(policy.p_between) => {
                specs.push((RelationKind::Between, alloc::vec![x, y]));
            }
            _ => {
                for i in [a, b] {
                    if let Some(t) = picks[i] {
                        specs.push((Direction::ALL[i].target_relation(), alloc::vec![t]));
                    }
                }
            }
        }
    }
    if let Some(title) = nearest_title(target, elements).and_then(reference_text) {
        specs.push((RelationKind::UnderTitle, alloc::vec![title]));
    }

    specs.shuffle(rng);
    specs
        .into_iter()
        .map(|(kind, objs)| positional_phrase(kind, &objs, policy.p_next_to, rng))
        .collect()
}

/// Label text for a form control: its own attribute, else the associated text element.
pub fn control_label<'a>(control: &'a ElementRecord, elements: &'a [ElementRecord]) -> Option<&'a str> {
    control_kind(control)?;
    attribute_label(control).or_else(|| associate_label(control, elements).and_then(reference_text))
}

/// Builds the full expression for one element given its chosen descriptor.
pub fn compose_expression<R: Rng + ?Sized>(
    snapshot: &PageSnapshot,
    target: &ElementRecord,
    descriptor: (String, crate::expression::DescriptorSource),
    is_reference: impl Fn(&ElementRecord) -> bool,
    policy: &SynthesisPolicy,
    caps: &Caps,
    rng: &mut R,
) -> ReferringExpression {
    let region = absolute_region(&target.bbox, snapshot.canvas);
    let contextual = control_label(target, &snapshot.elements).and_then(|l| contextual_phrase(target, l));
    let mut rels = relative_clauses(target, &snapshot.elements, is_reference, caps.rel_dist, policy, rng);
    let ctx = usize::from(contextual.is_some());
    let n = policy.draw_clause_count(rels.len() + ctx, rng);
    rels.truncate(n.saturating_sub(ctx));
    assemble_re(descriptor, Some(region), contextual, rels, policy, rng)
}

/// Runs classification, description, expression synthesis and per-page
/// selection for one snapshot.
pub fn synthesize_page<A: Annotator, R: Rng + ?Sized>(
    snapshot: &PageSnapshot,
    annotator: &A,
    policy: &SynthesisPolicy,
    caps: &Caps,
    rng: &mut R,
) -> Result<PageOutput, A::Error> {
    let mut drops = DropCounts::default();
    let mut targets = Vec::new();
    let mut textual_ids = BTreeSet::new();
    for e in &snapshot.elements {
        if !e.visible {
            drops.invisible += 1;
            continue;
        }
        let class = classify(e, caps.sim_threshold);
        if class.kind == ElementKind::Other {
            drops.untargeted += 1;
            continue;
        }
        let textual = class.kind == ElementKind::PureText || class.textual;
        if textual {
            textual_ids.insert(e.id.as_str());
        }
        targets.push((e, class.kind, textual));
    }

    let ambiguous = dedup_ambiguous(targets.iter().filter(|t| t.2).map(|t| t.0));
    let is_reference = |e: &ElementRecord| {
        e.visible
            && crate::classify::classify_element(e) != ElementKind::Other
            && !ambiguous.contains(&e.id)
            && reference_text(e).is_some()
    };

    let mut candidates = Vec::new();
    for (e, kind, textual) in targets {
        if ambiguous.contains(&e.id) {
            drops.ambiguous += 1;
            continue;
        }
        let mllm = if kind == ElementKind::Interactive && !textual {
            let d = annotator.describe(snapshot, e)?;
            if d.is_none() {
                drops.augmentation_skipped += 1;
            }
            d
        } else {
            None
        };
        let Some(descriptor) = choose_primary_descriptor(e, textual, mllm.as_deref(), rng) else {
            drops.no_descriptor += 1;
            continue;
        };
        let text = descriptor.0.clone();
        let re = compose_expression(snapshot, e, descriptor, is_reference, policy, caps, rng);
        candidates.push(Candidate {
            element: e,
            kind,
            re,
            descriptor: text,
            labeled: e.attributes.has_accessibility_label(),
            mllm_annotated: mllm.is_some(),
        });
    }

    let selection = select_page_elements(candidates, caps.page_elems, rng);
    drops.pure_text_cap += selection.dropped_pure_text as u64;
    drops.page_limit += selection.dropped_page_limit as u64;
    let (samples, _) = emit_samples(
        snapshot,
        selection.selected.into_iter().map(|c| (c.element, c.re, c.descriptor)),
    );
    Ok(PageOutput { samples, drops })
}
