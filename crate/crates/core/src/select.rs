//! Per-page element selection and corpus-wide label frequency capping.

use alloc::collections::{BTreeMap, BinaryHeap};
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::classify::{normalize_text, ElementKind};
use crate::expression::ReferringExpression;
use crate::hash::stable_hash;
use crate::sample::{sample_id, GroundingSample};
use crate::snapshot::ElementRecord;

pub const DEFAULT_PAGE_ELEMENTS: usize = 100;
pub const DEFAULT_LABEL_CAP: usize = 1000;
/// Pure-text allowance per labeled or annotated element.
pub const PURE_TEXT_RATIO: usize = 3;
pub const PURE_TEXT_FLOOR: usize = 10;

/// A classified element with its synthesized expression.
#[derive(Debug, Clone)]
pub struct Candidate<'a> {
    pub element: &'a ElementRecord,
    pub kind: ElementKind,
    pub re: ReferringExpression,
    pub descriptor: String,
    /// Carries a non-empty `alt`, `title`, `aria-label` or `aria-describedby`.
    pub labeled: bool,
    /// Received a model-written description.
    pub mllm_annotated: bool,
}

impl Candidate<'_> {
    fn tier(&self) -> u8 {
        if self.labeled || self.mllm_annotated {
            0
        } else if self.kind != ElementKind::PureText {
            1
        } else {
            2
        }
    }
}

/// Pure-text allowance: three per labeled/annotated element, at least
/// `min(10, available)`, at most `available`.
pub fn pure_text_cap(labeled_or_annotated: usize, available: usize) -> usize {
    let floor = PURE_TEXT_FLOOR.min(available);
    available.min((PURE_TEXT_RATIO * labeled_or_annotated).max(floor))
}

#[derive(Debug, Clone, Default)]
pub struct Selection<'a> {
    pub selected: Vec<Candidate<'a>>,
    /// Pure-text elements removed by the ratio cap.
    pub dropped_pure_text: usize,
    /// Elements removed by the per-page limit.
    pub dropped_page_limit: usize,
}

/// Keeps at most `max` candidates of one page.
///
/// Order of preference: labeled or annotated elements, then other targets,
/// then pure-text elements (a random subset within [`pure_text_cap`]). Within
/// each tier, ascending element id.
pub fn select_page_elements<'a, R: Rng + ?Sized>(candidates: Vec<Candidate<'a>>, max: usize, rng: &mut R) -> Selection<'a> {
    let mut tiers: [Vec<Candidate<'a>>; 3] = Default::default();
    for c in candidates {
        tiers[c.tier() as usize].push(c);
    }
    let cap = pure_text_cap(tiers[0].len(), tiers[2].len());
    let dropped_pure_text = tiers[2].len() - cap;
    tiers[2].sort_by(|a, b| a.element.id.cmp(&b.element.id));
    tiers[2].shuffle(rng);
    tiers[2].truncate(cap);

    let mut selected = Vec::new();
    for mut tier in tiers {
        tier.sort_by(|a, b| a.element.id.cmp(&b.element.id));
        selected.extend(tier);
    }
    let dropped_page_limit = selected.len().saturating_sub(max);
    selected.truncate(max);
    Selection { selected, dropped_pure_text, dropped_page_limit }
}

/// Frequency-counting identity of a descriptor.
pub fn label_key(descriptor: &str) -> String {
    normalize_text(descriptor)
}

#[derive(Debug, Default)]
struct LabelState {
    count: u64,
    /// Max-heap of the `cap` smallest `(hash, id)` seen so far.
    lowest: BinaryHeap<(u64, String)>,
}

/// First pass of label downsampling: counts labels and tracks survivor ranks.
///
/// Survivors of an over-cap label are the `cap` samples with the smallest
/// `stable_hash(seed, sample id)`, so the result does not depend on input order.
#[derive(Debug)]
pub struct LabelCounter {
    cap: usize,
    seed: u64,
    labels: BTreeMap<String, LabelState>,
}

impl LabelCounter {
    pub fn new(cap: usize, seed: u64) -> Self {
        Self { cap, seed, labels: BTreeMap::new() }
    }

    pub fn observe(&mut self, label: &str, id: &str) {
        let key = label_key(label);
        let st = self.labels.entry(key).or_default();
        st.count += 1;
        let rank = (stable_hash(self.seed, id), String::from(id));
        if st.lowest.len() < self.cap {
            st.lowest.push(rank);
        } else if st.lowest.peek().is_some_and(|top| rank < *top) {
            st.lowest.pop();
            st.lowest.push(rank);
        }
    }

    pub fn frequencies(&self) -> BTreeMap<&str, u64> {
        self.labels.iter().map(|(k, v)| (k.as_str(), v.count)).collect()
    }

    pub fn freeze(self) -> LabelFilter {
        let cap = self.cap;
        let thresholds = self
            .labels
            .into_iter()
            .filter(|(_, st)| st.count > cap as u64)
            .map(|(k, mut st)| (k, st.lowest.pop()))
            .collect();
        LabelFilter { seed: self.seed, thresholds }
    }
}

/// Second pass of label downsampling; read-only and shareable.
#[derive(Debug, Clone)]
pub struct LabelFilter {
    seed: u64,
    /// Largest surviving rank per over-cap label; `None` when the cap is zero.
    thresholds: BTreeMap<String, Option<(u64, String)>>,
}

impl LabelFilter {
    pub fn keep(&self, label: &str, id: &str) -> bool {
        match self.thresholds.get(&label_key(label)) {
            None => true,
            Some(None) => false,
            Some(Some((h, max_id))) => {
                let hash = stable_hash(self.seed, id);
                (hash, id) <= (*h, max_id.as_str())
            }
        }
    }

    pub fn capped_labels(&self) -> usize {
        self.thresholds.len()
    }
}

/// In-memory two-pass downsampling over grounding samples.
pub fn downsample_labels(samples: Vec<GroundingSample>, cap: usize, seed: u64) -> Vec<GroundingSample> {
    let mut counter = LabelCounter::new(cap, seed);
    for s in &samples {
        counter.observe(&s.descriptor, &sample_id(&s.snapshot_id, &s.element_id));
    }
    let filter = counter.freeze();
    samples
        .into_iter()
        .filter(|s| filter.keep(&s.descriptor, &sample_id(&s.snapshot_id, &s.element_id)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expression::{DescriptorSource, ReType};
    use crate::geometry::BBox;
    use crate::hash::derive_rng;
    use alloc::format;

    fn re() -> ReferringExpression {
        ReferringExpression {
            text: "x".into(),
            re_types: [ReType::Visual].into_iter().collect(),
            descriptor_source: DescriptorSource::InnerText,
        }
    }

    fn elements(prefix: &str, n: usize, tag: &str) -> Vec<ElementRecord> {
        (0..n)
            .map(|i| ElementRecord::new(format!("{prefix}{i:03}"), tag, BBox::new(0, 0, 1, 1)))
            .collect()
    }

    fn cands<'a>(els: &'a [ElementRecord], kind: ElementKind, labeled: bool, mllm: bool) -> Vec<Candidate<'a>> {
        els.iter()
            .map(|e| Candidate { element: e, kind, re: re(), descriptor: e.id.clone(), labeled, mllm_annotated: mllm })
            .collect()
    }

    #[test]
    fn cap_formula() {
        assert_eq!(pure_text_cap(7, 50), 21);
        assert_eq!(pure_text_cap(2, 4), 4);
        assert_eq!(pure_text_cap(0, 50), 10);
        assert_eq!(pure_text_cap(0, 0), 0);
    }

    #[test]
    fn pure_text_capped() {
        let a11y = elements("a", 5, "img");
        let mllm = elements("m", 2, "svg");
        let text = elements("t", 50, "p");
        let mut c = cands(&a11y, ElementKind::Interactive, true, false);
        c.extend(cands(&mllm, ElementKind::Interactive, false, true));
        c.extend(cands(&text, ElementKind::PureText, false, false));
        let sel = select_page_elements(c, 100, &mut derive_rng(0, "p"));
        let n_text = sel.selected.iter().filter(|c| c.kind == ElementKind::PureText).count();
        assert_eq!(n_text, 21);
        assert_eq!(sel.dropped_pure_text, 29);
        assert_eq!(sel.selected.len(), 28);
    }

    #[test]
    fn small_pages_keep_all_text() {
        let lab = elements("a", 2, "img");
        let text = elements("t", 4, "p");
        let mut c = cands(&lab, ElementKind::Interactive, true, false);
        c.extend(cands(&text, ElementKind::PureText, false, false));
        let sel = select_page_elements(c, 100, &mut derive_rng(0, "p"));
        assert_eq!(sel.selected.len(), 6);
    }

    #[test]
    fn page_limit_prefers_labeled() {
        let lab = elements("z", 60, "img");
        let plain = elements("b", 140, "a");
        let text = elements("t", 100, "p");
        let mut c = cands(&plain, ElementKind::Interactive, false, false);
        c.extend(cands(&text, ElementKind::PureText, false, false));
        c.extend(cands(&lab, ElementKind::Interactive, true, false));
        let sel = select_page_elements(c, 100, &mut derive_rng(0, "p"));
        assert_eq!(sel.selected.len(), 100);
        assert!(sel.selected[..60].iter().all(|c| c.labeled));
        assert!(sel.selected[..60].windows(2).all(|w| w[0].element.id < w[1].element.id));
    }

    fn sample(snap: &str, id: &str, label: &str) -> GroundingSample {
        let e = ElementRecord::new(id, "a", BBox::new(0, 0, 2, 2));
        GroundingSample::new(snap, "s.png", &e, re(), label.into())
    }

    #[test]
    fn label_cap_exact() {
        let many: Vec<_> = (0..13_000).map(|i| sample(&format!("p{i}"), "e", "Next")).collect();
        assert_eq!(downsample_labels(many, 1000, 7).len(), 1000);
        let few: Vec<_> = (0..999).map(|i| sample(&format!("p{i}"), "e", "Next")).collect();
        assert_eq!(downsample_labels(few, 1000, 7).len(), 999);
    }

    #[test]
    fn label_identity_is_case_folded() {
        let mut v: Vec<_> = (0..6).map(|i| sample(&format!("p{i}"), "e", "NEXT")).collect();
        v.extend((6..12).map(|i| sample(&format!("p{i}"), "e", "next ")));
        assert_eq!(downsample_labels(v, 5, 1).len(), 5);
    }

    #[test]
    fn zero_cap_drops_everything_over() {
        let v: Vec<_> = (0..3).map(|i| sample(&format!("p{i}"), "e", "x")).collect();
        assert!(downsample_labels(v, 0, 1).is_empty());
    }
}
