//! Model-backed description steps and the marker overlay they rely on.

pub mod client;
pub mod limit;
pub mod marker;
pub mod prompts;
pub mod transport;

pub use client::{AugmentClient, AugmentConfig, AugmentError, AugmentationRequest, DirectResult, RequestKind};
pub use prompts::DirectStyle;
