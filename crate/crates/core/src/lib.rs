//! Rule-based facial emotion recognition.
//!
//! The pipeline turns a face crop into five scalar features — mouth opening
//! (MO), lip-corner distance (LC), forehead-wrinkle intensity (W), eyebrow
//! curvature (EBC), and eyebrow mean position (EBM) — via chroma maps,
//! morphology, and edge detection, then classifies the feature vector with a
//! threshold rule table, majority voting, or weighted majority voting.
//!
//! Per-pixel kernels run data-parallel over rows when the `parallel` feature
//! (default) is enabled; disabling it yields a sequential fallback with
//! identical results.

pub mod classify;
pub mod config;
pub mod edges;
mod error;
mod exec;
pub mod features;
pub mod io;
pub mod locate;
pub mod morphology;
pub mod raster;
pub mod synthcorpus;

pub use config::Config;
pub use error::{Error, Result};
