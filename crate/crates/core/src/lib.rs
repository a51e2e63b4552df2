//! Topological signatures of painting style.
//!
//! The pipeline decodes an image into five intensity channels (red, green,
//! blue, luminance, inverted edge strength), filters each channel by
//! sublevel sets of a cubical complex, and summarizes the result as
//! persistence barcodes in dimensions 0 and 1. Barcodes are compared with
//! bottleneck and 1-Wasserstein distances, and groups of images are tested
//! for stylistic separation with permutation tests on the resulting
//! distance matrices.

pub mod cubical;
pub mod error;
pub mod imaging;
pub mod metrics;
pub mod persistence;
pub mod pipeline;
pub mod stats;

pub use error::{Error, Result};
