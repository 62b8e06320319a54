//! Truncated path signatures of piecewise-linear paths and a signature
//! feature pipeline for skeleton-based action recognition.
//!
//! - [`sigcore`]: signatures, Chen concatenation, Lévy area, dimension counts.
//! - [`transforms`]: time augmentation, lead-lag, dyadic windows, frame sampling, gap filling.
//! - [`skeleton`]: clips, preprocessing, the S-J / S-P-PSF / S-T-PSF / T-J-PSF / T-S-PSF stack.
//! - [`classifier`]: the dropconnect linear network and two-stage composition.
//! - [`cli`]: file formats, dataset ingestion, subcommands and the benchmark harness.

pub mod classifier;
pub mod cli;
mod error;
pub mod sigcore;
pub mod skeleton;
pub mod transforms;

pub use error::{Error, Result};
