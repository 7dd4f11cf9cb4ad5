//! Feature files, dataset manifests and word slicing.

pub mod acft;
mod manifest;
mod segments;
pub mod tsv;

pub use acft::{read_features, write_features};
pub use manifest::{DatasetManifest, Role, SpeakerEntry, TAG_PLACEHOLDER};
pub use segments::{read_segments, segment_frames, slice_words, WordSegment};
