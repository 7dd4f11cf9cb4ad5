//! Pronunciation distance toolkit.
//!
//! Acoustic distances are computed by dynamic time warping over per-word frame
//! features (MFCCs or hidden states dumped from a neural speech model), phonetic
//! distances by a Levenshtein alignment with segment costs induced from pointwise
//! mutual information. Both are aggregated into speaker-level scores and checked
//! against averaged human ratings with the routines in [`stats`].

pub mod aggregate;
pub mod dtw;
pub mod error;
pub mod featstore;
pub mod report;
pub mod signal;
pub mod stats;
pub mod translev;

pub use error::{Error, Result};
pub use signal::{AudioClip, FrameMatrix};
