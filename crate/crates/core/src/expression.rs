//! Referring-expression construction.
//!
//! An expression is a primary descriptor (an attribute value, the element's own
//! text, or a model-written description), optionally followed by an absolute
//! position phrase and up to two relative or contextual clauses, joined by
//! `", "`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::snapshot::{ElementRecord, SalientAttr};
use crate::spatial::{control_kind, ControlKind, RegionLabel, RelationKind};

/// Maximum relative plus contextual clauses in one expression.
pub const REL_COUNT_MAX: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReType {
    Visual,
    Functional,
    AbsolutePositional,
    RelativePositional,
    Contextual,
}

impl ReType {
    pub fn name(self) -> &'static str {
        match self {
            ReType::Visual => "visual",
            ReType::Functional => "functional",
            ReType::AbsolutePositional => "absolute_positional",
            ReType::RelativePositional => "relative_positional",
            ReType::Contextual => "contextual",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DescriptorSource {
    InnerText,
    Alt,
    Title,
    AriaLabel,
    AriaDescribedby,
    Placeholder,
    Value,
    MllmDescription,
    /// Expression supplied by an external dataset.
    Annotation,
}

impl DescriptorSource {
    /// Sources produced by page synthesis.
    pub const ALL: [DescriptorSource; 8] = [
        DescriptorSource::MllmDescription,
        DescriptorSource::InnerText,
        DescriptorSource::Title,
        DescriptorSource::Alt,
        DescriptorSource::AriaLabel,
        DescriptorSource::AriaDescribedby,
        DescriptorSource::Placeholder,
        DescriptorSource::Value,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DescriptorSource::InnerText => "inner_text",
            DescriptorSource::Alt => "alt",
            DescriptorSource::Title => "title",
            DescriptorSource::AriaLabel => "aria_label",
            DescriptorSource::AriaDescribedby => "aria_describedby",
            DescriptorSource::Placeholder => "placeholder",
            DescriptorSource::Value => "value",
            DescriptorSource::MllmDescription => "mllm_description",
            DescriptorSource::Annotation => "annotation",
        }
    }

    /// The RE category a descriptor from this source contributes.
    ///
    /// `title`, `alt` and ARIA attributes mostly carry function; visible text,
    /// form values and model descriptions mostly carry appearance.
    pub fn re_type(self) -> ReType {
        match self {
            DescriptorSource::Title
            | DescriptorSource::Alt
            | DescriptorSource::AriaLabel
            | DescriptorSource::AriaDescribedby
            | DescriptorSource::Annotation => ReType::Functional,
            DescriptorSource::InnerText
            | DescriptorSource::Placeholder
            | DescriptorSource::Value
            | DescriptorSource::MllmDescription => ReType::Visual,
        }
    }

    pub fn is_accessibility_label(self) -> bool {
        matches!(
            self,
            DescriptorSource::Title | DescriptorSource::Alt | DescriptorSource::AriaLabel | DescriptorSource::AriaDescribedby
        )
    }
}

impl From<SalientAttr> for DescriptorSource {
    fn from(a: SalientAttr) -> Self {
        match a {
            SalientAttr::InnerText => DescriptorSource::InnerText,
            SalientAttr::Alt => DescriptorSource::Alt,
            SalientAttr::Title => DescriptorSource::Title,
            SalientAttr::AriaLabel => DescriptorSource::AriaLabel,
            SalientAttr::AriaDescribedby => DescriptorSource::AriaDescribedby,
            SalientAttr::Placeholder => DescriptorSource::Placeholder,
            SalientAttr::Value => DescriptorSource::Value,
        }
    }
}

impl fmt::Display for DescriptorSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferringExpression {
    pub text: String,
    pub re_types: BTreeSet<ReType>,
    pub descriptor_source: DescriptorSource,
}

/// Randomization knobs for expression assembly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthesisPolicy {
    /// Probability of appending the absolute-position phrase.
    pub p_absolute: f64,
    /// Relative weights of drawing 0, 1 or 2 relative/contextual clauses.
    pub rel_weights: [f64; 3],
    /// When false the absolute phrase is always included if available.
    pub abs_included_at_random: bool,
    /// Probability that a directional clause is rephrased as "next to".
    pub p_next_to: f64,
    /// Probability that opposite neighbors are merged into a "between" clause.
    pub p_between: f64,
    pub seed: u64,
}

impl Default for SynthesisPolicy {
    fn default() -> Self {
        Self {
            p_absolute: 0.05,
            rel_weights: [1.0, 1.0, 1.0],
            abs_included_at_random: true,
            p_next_to: 0.1,
            p_between: 0.1,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolicyError {
    #[error("{field} must be a probability in [0, 1], got {value}")]
    Probability { field: &'static str, value: String },
    #[error("rel_weights must be non-negative with a positive sum")]
    Weights,
}

impl SynthesisPolicy {
    pub fn validate(&self) -> Result<(), PolicyError> {
        for (field, v) in [("p_absolute", self.p_absolute), ("p_next_to", self.p_next_to), ("p_between", self.p_between)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(PolicyError::Probability { field, value: v.to_string() });
            }
        }
        let sum: f64 = self.rel_weights.iter().sum();
        if self.rel_weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) || !(sum > 0.0) {
            return Err(PolicyError::Weights);
        }
        Ok(())
    }

    /// Expected share of expressions with at least one clause, given clauses are available.
    pub fn expected_clause_share(&self) -> f64 {
        let sum: f64 = self.rel_weights.iter().sum();
        1.0 - self.rel_weights[0] / sum
    }

    /// Draws the clause count, clamped to what is available.
    pub fn draw_clause_count<R: Rng + ?Sized>(&self, available: usize, rng: &mut R) -> usize {
        let sum: f64 = self.rel_weights.iter().sum();
        let mut r = rng.random::<f64>() * sum;
        let mut n = REL_COUNT_MAX;
        for (i, w) in self.rel_weights.iter().enumerate() {
            if r < *w {
                n = i;
                break;
            }
            r -= w;
        }
        n.min(available)
    }
}

/// Uniform choice among the element's non-empty attributes plus the model description.
///
/// Textual elements always use their inner text. Returns `None` when no
/// candidate exists; callers skip the element.
pub fn choose_primary_descriptor<R: Rng + ?Sized>(
    e: &ElementRecord,
    textual: bool,
    mllm_desc: Option<&str>,
    rng: &mut R,
) -> Option<(String, DescriptorSource)> {
    if textual {
        if let Some(t) = e.inner_text() {
            return Some((t.to_string(), DescriptorSource::InnerText));
        }
    }
    let mut candidates: Vec<(&str, DescriptorSource)> =
        e.attributes.present().map(|(a, v)| (v, DescriptorSource::from(a))).collect();
    if let Some(d) = mllm_desc.map(str::trim).filter(|d| !d.is_empty()) {
        candidates.push((d, DescriptorSource::MllmDescription));
    }
    match candidates.len() {
        0 => None,
        1 => Some((candidates[0].0.to_string(), candidates[0].1)),
        n => {
            let (text, src) = candidates[rng.random_range(0..n)];
            Some((text.to_string(), src))
        }
    }
}

/// Renders a relation as a clause about the target.
///
/// `objects` holds the descriptors of the related elements (two for
/// `Between`, one otherwise). Directional relations are rephrased as
/// "next to" with probability `p_next_to`.
pub fn positional_phrase<R: Rng + ?Sized>(kind: RelationKind, objects: &[&str], p_next_to: f64, rng: &mut R) -> String {
    let first = objects.first().copied().unwrap_or_default();
    let directional = matches!(
        kind,
        RelationKind::LeftOf | RelationKind::RightOf | RelationKind::Above | RelationKind::Below
    );
    if directional && p_next_to > 0.0 && rng.random_bool(p_next_to) {
        return format!("next to {first}");
    }
    match kind {
        RelationKind::LeftOf => format!("to the left of {first}"),
        RelationKind::RightOf => format!("to the right of {first}"),
        RelationKind::Above => format!("above {first}"),
        RelationKind::Below => format!("below {first}"),
        RelationKind::NextTo => format!("next to {first}"),
        RelationKind::Between => {
            let second = objects.get(1).copied().unwrap_or_default();
            format!("between {first} and {second}")
        }
        RelationKind::UnderTitle => format!("under the section {first}"),
        RelationKind::LabeledBy => format!("labeled {first}"),
    }
}

/// `None` when `control` is not a labelable form control.
pub fn contextual_phrase(control: &ElementRecord, label: &str) -> Option<String> {
    control_kind(control).map(|kind| match kind {
        ControlKind::Radio => format!("radio button for {label}"),
        ControlKind::Checkbox => format!("checkbox for {label}"),
        ControlKind::TextInput => format!("the input field labeled {label}"),
        ControlKind::Select => format!("the dropdown labeled {label}"),
        ControlKind::TextArea => format!("the text area labeled {label}"),
    })
}

pub fn absolute_phrase(region: RegionLabel) -> &'static str {
    match region {
        RegionLabel::TopLeft => "at the top-left corner of the screen",
        RegionLabel::Top => "at the top of the screen",
        RegionLabel::TopRight => "at the top-right corner of the screen",
        RegionLabel::Left => "on the left side of the screen",
        RegionLabel::Center => "in the center of the screen",
        RegionLabel::Right => "on the right side of the screen",
        RegionLabel::BottomLeft => "at the bottom-left corner of the screen",
        RegionLabel::Bottom => "at the bottom of the screen",
        RegionLabel::BottomRight => "at the bottom-right corner of the screen",
    }
}

/// Joins the parts of an expression.
///
/// The contextual clause, when given, is always kept; relative clauses fill
/// the remaining slots up to [`REL_COUNT_MAX`]. The absolute phrase is kept
/// with probability `policy.p_absolute` (or always, when
/// `abs_included_at_random` is false).
pub fn assemble_re<R: Rng + ?Sized>(
    descriptor: (String, DescriptorSource),
    abs: Option<RegionLabel>,
    contextual: Option<String>,
    rels: Vec<String>,
    policy: &SynthesisPolicy,
    rng: &mut R,
) -> ReferringExpression {
    let (mut text, source) = descriptor;
    let mut re_types = BTreeSet::new();
    re_types.insert(source.re_type());

    if let Some(region) = abs {
        let include = !policy.abs_included_at_random || (policy.p_absolute > 0.0 && rng.random_bool(policy.p_absolute));
        if include {
            text.push_str(", ");
            text.push_str(absolute_phrase(region));
            re_types.insert(ReType::AbsolutePositional);
        }
    }

    let mut slots = REL_COUNT_MAX;
    if let Some(c) = contextual {
        text.push_str(", ");
        text.push_str(&c);
        re_types.insert(ReType::Contextual);
        slots -= 1;
    }
    for r in rels.into_iter().take(slots) {
        text.push_str(", ");
        text.push_str(&r);
        re_types.insert(ReType::RelativePositional);
    }

    ReferringExpression { text, re_types, descriptor_source: source }
}
