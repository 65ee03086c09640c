//! IO, model client, dataset adapters and command-line driver around
//! [`groundsynth_core`].

pub use groundsynth_core as core;

pub mod snapshot_io;
pub mod augment;
pub mod jsonl;
pub mod config;
pub mod downsample;
pub mod pipeline;
pub mod adapters;
pub mod evaluation;
pub mod cli;
pub mod extract;
