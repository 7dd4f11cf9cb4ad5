//! Audio ingestion and MFCC extraction.

mod mfcc;
mod resample;
mod wav;

pub use mfcc::{append_deltas, compute_mfcc, MfccConfig, MFCC_TAG};
pub use resample::resample;
pub use wav::load_wav;

use std::ops::Range;

use crate::error::{Error, Result};

/// Mono audio at a fixed sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip {
    samples: Vec<f64>,
    sample_rate: u32,
}

impl AudioClip {
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::UnsupportedFormat("sample rate of 0 Hz".into()));
        }
        if samples.is_empty() {
            return Err(Error::CorruptFile("clip has no samples".into()));
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(Error::CorruptFile("clip contains non-finite samples".into()));
        }
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }
}

/// A `T x D` matrix of frame features with its time base.
///
/// Rows are frames. MFCC output and every neural layer dump share this type, so
/// downstream code never needs to know where a feature came from.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameMatrix {
    data: Vec<f32>,
    frames: usize,
    dim: usize,
    frame_stride_ms: f32,
    window_ms: f32,
    source_tag: String,
}

impl FrameMatrix {
    /// Builds a matrix from row-major `data`; `window_ms` may be 0 when unknown.
    pub fn new(
        data: Vec<f32>,
        dim: usize,
        frame_stride_ms: f32,
        window_ms: f32,
        source_tag: impl Into<String>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidFrames("dimension must be at least 1".into()));
        }
        if data.is_empty() || !data.len().is_multiple_of(dim) {
            return Err(Error::InvalidFrames(format!(
                "{} values do not form whole frames of dimension {dim}",
                data.len()
            )));
        }
        if !(frame_stride_ms.is_finite() && frame_stride_ms > 0.0) {
            return Err(Error::InvalidFrames(format!(
                "frame stride must be positive, got {frame_stride_ms}"
            )));
        }
        if !(window_ms.is_finite() && window_ms >= 0.0) {
            return Err(Error::InvalidFrames(format!(
                "window must be non-negative, got {window_ms}"
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidFrames(format!(
                "non-finite value at frame {}, column {}",
                pos / dim,
                pos % dim
            )));
        }
        Ok(Self {
            frames: data.len() / dim,
            data,
            dim,
            frame_stride_ms,
            window_ms,
            source_tag: source_tag.into(),
        })
    }

    pub fn from_rows<R: AsRef<[f32]>>(
        rows: &[R],
        frame_stride_ms: f32,
        window_ms: f32,
        source_tag: impl Into<String>,
    ) -> Result<Self> {
        let dim = rows.first().map_or(0, |r| r.as_ref().len());
        if let Some(bad) = rows.iter().find(|r| r.as_ref().len() != dim) {
            return Err(Error::DimMismatch(dim, bad.as_ref().len()));
        }
        let data = rows.iter().flat_map(|r| r.as_ref().iter().copied()).collect();
        Self::new(data, dim, frame_stride_ms, window_ms, source_tag)
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn frame_stride_ms(&self) -> f32 {
        self.frame_stride_ms
    }

    pub fn window_ms(&self) -> f32 {
        self.window_ms
    }

    pub fn source_tag(&self) -> &str {
        &self.source_tag
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f32]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    /// Row-major frame values.
    pub fn as_slice(&self) -> &[f32] {
        &self.data
    }

    /// Copy of the frames in `range`, keeping stride, window and tag.
    pub fn slice(&self, range: Range<usize>) -> Result<Self> {
        if range.start >= range.end || range.end > self.frames {
            return Err(Error::InvalidFrames(format!(
                "frame range {range:?} is empty or exceeds {} frames",
                self.frames
            )));
        }
        Ok(Self {
            data: self.data[range.start * self.dim..range.end * self.dim].to_vec(),
            frames: range.len(),
            dim: self.dim,
            frame_stride_ms: self.frame_stride_ms,
            window_ms: self.window_ms,
            source_tag: self.source_tag.clone(),
        })
    }

    pub fn with_source_tag(mut self, tag: impl Into<String>) -> Self {
        self.source_tag = tag.into();
        self
    }

    /// Duration covered by the frame grid in seconds (`T * stride`).
    pub fn duration_s(&self) -> f64 {
        self.frames as f64 * self.frame_stride_ms as f64 / 1000.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_and_ragged_input() {
        assert!(matches!(
            FrameMatrix::new(vec![0.0, f32::NAN], 1, 10.0, 25.0, "x"),
            Err(Error::InvalidFrames(_))
        ));
        assert!(matches!(
            FrameMatrix::new(vec![0.0; 5], 2, 10.0, 25.0, "x"),
            Err(Error::InvalidFrames(_))
        ));
        assert!(matches!(
            FrameMatrix::new(vec![0.0; 4], 2, 0.0, 25.0, "x"),
            Err(Error::InvalidFrames(_))
        ));
        assert!(matches!(
            FrameMatrix::from_rows(&[vec![0.0, 1.0], vec![2.0]], 10.0, 0.0, "x"),
            Err(Error::DimMismatch(2, 1))
        ));
    }

    #[test]
    fn slice_keeps_metadata() {
        let m = FrameMatrix::new((0..12).map(|v| v as f32).collect(), 3, 20.0, 25.0, "layer-3")
            .unwrap();
        let s = m.slice(1..3).unwrap();
        assert_eq!(s.frames(), 2);
        assert_eq!(s.row(0), &[3.0, 4.0, 5.0]);
        assert_eq!(s.frame_stride_ms(), 20.0);
        assert_eq!(s.source_tag(), "layer-3");
        assert!(m.slice(3..3).is_err());
        assert!(m.slice(2..5).is_err());
    }
}
