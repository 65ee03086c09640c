//! Grounding-data synthesis from rendered page snapshots.
//!
//! Pure logic only: element classification, spatial relations, referring
//! expression assembly, sample selection and capping, resolution planning,
//! corpus statistics and grounding evaluation. IO lives in the companion
//! `groundsynth` crate.

#![no_std]

extern crate alloc;

pub mod classify;
pub mod eval;
pub mod expression;
pub mod geometry;
pub mod hash;
pub mod resolution;
pub mod sample;
pub mod select;
pub mod snapshot;
pub mod spatial;
pub mod stats;
pub mod synth;

pub use classify::{classify, is_textual, text_similarity, ElementClass, ElementKind};
pub use expression::{DescriptorSource, ReType, ReferringExpression, SynthesisPolicy};
pub use geometry::{center_point, BBox, Point, Size};
pub use hash::{derive_rng, stable_hash, SeededRng};
pub use sample::{GroundingSample, SampleEntry, ScreenshotRecord};
pub use snapshot::{validate_snapshot, ElementRecord, PageSnapshot, Violation};
pub use synth::{synthesize_page, Annotator, Caps, DropCounts, NoAnnotator, PageOutput};
