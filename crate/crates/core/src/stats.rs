//! Corpus statistics: element tags, descriptor sources, and positional RE usage.
//!
//! Every share is `elements with the property / total elements × 100`.
//! Contextual expressions also count toward the relative share.

use alloc::collections::BTreeMap;
use alloc::string::String;

use serde::{Deserialize, Serialize};

use crate::expression::{DescriptorSource, ReType};
use crate::sample::SampleEntry;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ReTypeShares {
    pub relative: f64,
    pub contextual: f64,
    pub absolute: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub total: u64,
    pub tag_shares: BTreeMap<String, f64>,
    pub descriptor_shares: BTreeMap<String, f64>,
    pub re_type_shares: ReTypeShares,
}

/// Streaming counter behind [`corpus_stats`].
#[derive(Debug, Clone, Default)]
pub struct StatsAccumulator {
    total: u64,
    tags: BTreeMap<String, u64>,
    sources: BTreeMap<DescriptorSource, u64>,
    relative: u64,
    contextual: u64,
    absolute: u64,
}

impl StatsAccumulator {
    pub fn add(&mut self, e: &SampleEntry) {
        self.total += 1;
        *self.tags.entry(e.tag.clone()).or_default() += 1;
        *self.sources.entry(e.descriptor_source).or_default() += 1;
        let contextual = e.has_type(ReType::Contextual);
        if contextual || e.has_type(ReType::RelativePositional) {
            self.relative += 1;
        }
        if contextual {
            self.contextual += 1;
        }
        if e.has_type(ReType::AbsolutePositional) {
            self.absolute += 1;
        }
    }

    pub fn merge(&mut self, other: StatsAccumulator) {
        self.total += other.total;
        for (k, v) in other.tags {
            *self.tags.entry(k).or_default() += v;
        }
        for (k, v) in other.sources {
            *self.sources.entry(k).or_default() += v;
        }
        self.relative += other.relative;
        self.contextual += other.contextual;
        self.absolute += other.absolute;
    }

    pub fn finish(self) -> StatsReport {
        let total = self.total;
        let pct = |n: u64| if total == 0 { 0.0 } else { n as f64 * 100.0 / total as f64 };
        StatsReport {
            total,
            tag_shares: self.tags.into_iter().map(|(k, v)| (k, pct(v))).collect(),
            descriptor_shares: self.sources.into_iter().map(|(k, v)| (String::from(k.name()), pct(v))).collect(),
            re_type_shares: ReTypeShares {
                relative: pct(self.relative),
                contextual: pct(self.contextual),
                absolute: pct(self.absolute),
            },
        }
    }
}

pub fn corpus_stats<'a, I>(samples: I) -> StatsReport
where
    I: IntoIterator<Item = &'a SampleEntry>,
{
    let mut acc = StatsAccumulator::default();
    for s in samples {
        acc.add(s);
    }
    acc.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{BBox, Point};
    use alloc::vec;
    use alloc::vec::Vec;

    fn entry(tag: &str, types: Vec<ReType>) -> SampleEntry {
        SampleEntry {
            element_id: "e".into(),
            tag: tag.into(),
            bbox: BBox::new(0, 0, 2, 2),
            target: Point::new(1, 1),
            re_text: "x".into(),
            re_types: types,
            descriptor_source: DescriptorSource::InnerText,
            descriptor: "x".into(),
            question: String::new(),
            answer: String::new(),
        }
    }

    #[test]
    fn tag_percentages() {
        let v = vec![entry("a", vec![]), entry("a", vec![]), entry("button", vec![])];
        let r = corpus_stats(&v);
        assert!((r.tag_shares["a"] - 66.67).abs() < 0.01);
        assert!((r.tag_shares["button"] - 33.33).abs() < 0.01);
        let sum: f64 = r.tag_shares.values().sum();
        assert!((sum - 100.0).abs() < 0.01);
    }

    #[test]
    fn relative_everywhere() {
        let v = vec![entry("a", vec![ReType::RelativePositional]); 4];
        assert_eq!(corpus_stats(&v).re_type_shares.relative, 100.0);
    }

    #[test]
    fn contextual_counts_as_relative() {
        let v = vec![entry("input", vec![ReType::Contextual]), entry("a", vec![])];
        let s = corpus_stats(&v).re_type_shares;
        assert_eq!((s.relative, s.contextual, s.absolute), (50.0, 50.0, 0.0));
    }

    #[test]
    fn empty_corpus() {
        let r = corpus_stats(&[]);
        assert_eq!(r.total, 0);
        assert!(r.tag_shares.is_empty());
    }
}
