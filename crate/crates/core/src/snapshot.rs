//! The per-page unit of work: a rendered screenshot plus element metadata.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::geometry::{BBox, Size};

/// The salient HTML attributes carried for every element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SalientAttr {
    InnerText,
    Alt,
    Title,
    AriaLabel,
    AriaDescribedby,
    Placeholder,
    Value,
}

impl SalientAttr {
    pub const ALL: [SalientAttr; 7] = [
        SalientAttr::InnerText,
        SalientAttr::Alt,
        SalientAttr::Title,
        SalientAttr::AriaLabel,
        SalientAttr::AriaDescribedby,
        SalientAttr::Placeholder,
        SalientAttr::Value,
    ];

    /// Key used in the snapshot schema.
    pub fn key(self) -> &'static str {
        match self {
            SalientAttr::InnerText => "inner_text",
            SalientAttr::Alt => "alt",
            SalientAttr::Title => "title",
            SalientAttr::AriaLabel => "aria-label",
            SalientAttr::AriaDescribedby => "aria-describedby",
            SalientAttr::Placeholder => "placeholder",
            SalientAttr::Value => "value",
        }
    }

    /// Attributes that count as an accessibility label.
    pub fn is_accessibility_label(self) -> bool {
        matches!(
            self,
            SalientAttr::Alt | SalientAttr::Title | SalientAttr::AriaLabel | SalientAttr::AriaDescribedby
        )
    }
}

/// The seven salient attributes. Any other attribute key is dropped on ingestion.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attributes {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner_text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alt: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    #[serde(default, rename = "aria-label", skip_serializing_if = "Option::is_none")]
    pub aria_label: Option<String>,
    #[serde(default, rename = "aria-describedby", skip_serializing_if = "Option::is_none")]
    pub aria_describedby: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub placeholder: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
}

impl Attributes {
    pub fn get(&self, attr: SalientAttr) -> Option<&str> {
        let v = match attr {
            SalientAttr::InnerText => &self.inner_text,
            SalientAttr::Alt => &self.alt,
            SalientAttr::Title => &self.title,
            SalientAttr::AriaLabel => &self.aria_label,
            SalientAttr::AriaDescribedby => &self.aria_describedby,
            SalientAttr::Placeholder => &self.placeholder,
            SalientAttr::Value => &self.value,
        };
        v.as_deref()
    }

    pub fn set(&mut self, attr: SalientAttr, value: impl Into<String>) {
        let slot = match attr {
            SalientAttr::InnerText => &mut self.inner_text,
            SalientAttr::Alt => &mut self.alt,
            SalientAttr::Title => &mut self.title,
            SalientAttr::AriaLabel => &mut self.aria_label,
            SalientAttr::AriaDescribedby => &mut self.aria_describedby,
            SalientAttr::Placeholder => &mut self.placeholder,
            SalientAttr::Value => &mut self.value,
        };
        *slot = Some(value.into());
    }

    /// Attribute value trimmed, or `None` when absent or blank.
    pub fn non_empty(&self, attr: SalientAttr) -> Option<&str> {
        self.get(attr).map(str::trim).filter(|s| !s.is_empty())
    }

    /// Present, non-blank attributes in canonical order.
    pub fn present(&self) -> impl Iterator<Item = (SalientAttr, &str)> + '_ {
        SalientAttr::ALL
            .into_iter()
            .filter_map(move |a| self.non_empty(a).map(|v| (a, v)))
    }

    pub fn has_accessibility_label(&self) -> bool {
        self.present().any(|(a, _)| a.is_accessibility_label())
    }
}

/// One DOM element captured from a rendered page.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementRecord {
    pub id: String,
    pub tag: String,
    #[serde(default)]
    pub attributes: Attributes,
    pub bbox: BBox,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ocr_text: Option<String>,
    /// The `type` attribute of `input` elements (radio, checkbox, text, ...).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_type: Option<String>,
    pub visible: bool,
}

impl ElementRecord {
    /// Minimal visible element with no attributes.
    pub fn new(id: impl Into<String>, tag: impl Into<String>, bbox: BBox) -> Self {
        Self {
            id: id.into(),
            tag: tag.into(),
            attributes: Attributes::default(),
            bbox,
            ocr_text: None,
            input_type: None,
            visible: true,
        }
    }

    pub fn with_attr(mut self, attr: SalientAttr, value: impl Into<String>) -> Self {
        self.attributes.set(attr, value);
        self
    }

    pub fn with_text(self, text: impl Into<String>) -> Self {
        self.with_attr(SalientAttr::InnerText, text)
    }

    pub fn with_ocr(mut self, ocr: impl Into<String>) -> Self {
        self.ocr_text = Some(ocr.into());
        self
    }

    pub fn with_input_type(mut self, ty: impl Into<String>) -> Self {
        self.input_type = Some(ty.into());
        self
    }

    pub fn hidden(mut self) -> Self {
        self.visible = false;
        self
    }

    pub fn inner_text(&self) -> Option<&str> {
        self.attributes.non_empty(SalientAttr::InnerText)
    }
}

/// One rendered page state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageSnapshot {
    pub snapshot_id: String,
    pub url: String,
    pub viewport: Size,
    pub canvas: Size,
    pub screenshot_ref: String,
    pub elements: Vec<ElementRecord>,
}

impl PageSnapshot {
    pub fn visible_elements(&self) -> impl Iterator<Item = &ElementRecord> {
        self.elements.iter().filter(|e| e.visible)
    }

    pub fn element(&self, id: &str) -> Option<&ElementRecord> {
        self.elements.iter().find(|e| e.id == id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ViolationRule {
    EmptyId,
    EmptyTag,
    TagNotLowercase,
    NonPositiveWidth,
    NonPositiveHeight,
    BboxOutOfCanvas,
    DuplicateId,
    ViewportCanvasWidthMismatch,
    CanvasShorterThanViewport,
}

impl ViolationRule {
    pub fn message(self) -> &'static str {
        match self {
            ViolationRule::EmptyId => "empty id",
            ViolationRule::EmptyTag => "empty tag",
            ViolationRule::TagNotLowercase => "tag not lowercase",
            ViolationRule::NonPositiveWidth => "non-positive width",
            ViolationRule::NonPositiveHeight => "non-positive height",
            ViolationRule::BboxOutOfCanvas => "bbox out of canvas",
            ViolationRule::DuplicateId => "duplicate id",
            ViolationRule::ViewportCanvasWidthMismatch => "viewport width differs from canvas width",
            ViolationRule::CanvasShorterThanViewport => "canvas shorter than viewport",
        }
    }

    /// Schema path of the offending field, relative to the element or snapshot.
    pub fn field(self) -> &'static str {
        match self {
            ViolationRule::EmptyId | ViolationRule::DuplicateId => "id",
            ViolationRule::EmptyTag | ViolationRule::TagNotLowercase => "tag",
            ViolationRule::NonPositiveWidth => "bbox.w",
            ViolationRule::NonPositiveHeight => "bbox.h",
            ViolationRule::BboxOutOfCanvas => "bbox",
            ViolationRule::ViewportCanvasWidthMismatch => "viewport.width",
            ViolationRule::CanvasShorterThanViewport => "canvas.height",
        }
    }
}

/// A broken invariant. `element_id` is `None` for snapshot-level rules.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Violation {
    pub element_id: Option<String>,
    pub rule: ViolationRule,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.element_id {
            Some(id) => write!(f, "element {id:?}: {} ({})", self.rule.message(), self.rule.field()),
            None => write!(f, "snapshot: {} ({})", self.rule.message(), self.rule.field()),
        }
    }
}

/// Checks every snapshot invariant; an empty list means the snapshot is valid.
///
/// Violations are reported in element order. A duplicated id is reported once,
/// on its second occurrence.
pub fn validate_snapshot(s: &PageSnapshot) -> Vec<Violation> {
    let mut out = Vec::new();
    if s.viewport.width != s.canvas.width {
        out.push(Violation { element_id: None, rule: ViolationRule::ViewportCanvasWidthMismatch });
    }
    if s.canvas.height < s.viewport.height {
        out.push(Violation { element_id: None, rule: ViolationRule::CanvasShorterThanViewport });
    }

    let mut seen = BTreeSet::new();
    let mut reported = BTreeSet::new();
    for e in &s.elements {
        let mut push = |rule| out.push(Violation { element_id: Some(e.id.clone()), rule });
        if e.id.is_empty() {
            push(ViolationRule::EmptyId);
        }
        if e.tag.is_empty() {
            push(ViolationRule::EmptyTag);
        } else if e.tag.chars().any(char::is_uppercase) {
            push(ViolationRule::TagNotLowercase);
        }
        if e.bbox.w == 0 {
            push(ViolationRule::NonPositiveWidth);
        }
        if e.bbox.h == 0 {
            push(ViolationRule::NonPositiveHeight);
        }
        if !e.bbox.fits_within(s.canvas) {
            push(ViolationRule::BboxOutOfCanvas);
        }
        if !seen.insert(e.id.as_str()) && reported.insert(e.id.as_str()) {
            push(ViolationRule::DuplicateId);
        }
    }
    out
}
