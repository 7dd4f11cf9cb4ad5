use std::path::Path;

use super::tsv::{self, OccurrenceLabeler};
use crate::error::{Error, Result};
use crate::signal::FrameMatrix;

/// Word boundaries in seconds, as produced by a forced aligner.
#[derive(Debug, Clone, PartialEq)]
pub struct WordSegment {
    pub word: String,
    pub start_s: f64,
    pub end_s: f64,
}

impl WordSegment {
    pub fn new(word: impl Into<String>, start_s: f64, end_s: f64) -> Self {
        Self {
            word: word.into(),
            start_s,
            end_s,
        }
    }
}

/// Reads `word<TAB>start_s<TAB>end_s` lines.
///
/// Segments must be time-ordered and non-overlapping. Repeated words are
/// disambiguated as `word#2`, `word#3`, ... in order of appearance.
pub fn read_segments(path: impl AsRef<Path>) -> Result<Vec<WordSegment>> {
    let path = path.as_ref();
    let mut labeler = OccurrenceLabeler::default();
    let mut out: Vec<WordSegment> = Vec::new();
    for rec in tsv::read_records(path)? {
        if rec.fields.len() != 3 {
            return Err(Error::parse(
                path,
                rec.line,
                format!("expected 3 columns, found {}", rec.fields.len()),
            ));
        }
        let word = rec.fields[0].trim();
        if word.is_empty() {
            return Err(Error::parse(path, rec.line, "empty word label"));
        }
        let start = tsv::parse_f64(path, &rec, 1, "start_s")?;
        let end = tsv::parse_f64(path, &rec, 2, "end_s")?;
        if start < 0.0 || end <= start {
            return Err(Error::parse(
                path,
                rec.line,
                format!("invalid interval {start}-{end}"),
            ));
        }
        if let Some(prev) = out.last() {
            if start < prev.end_s {
                return Err(Error::parse(
                    path,
                    rec.line,
                    format!("segment starts at {start} before previous end {}", prev.end_s),
                ));
            }
        }
        out.push(WordSegment::new(labeler.label(word), start, end));
    }
    Ok(out)
}

/// Converts seconds to a fractional frame position, snapping values within
/// 1e-6 frames of an integer so that `0.2 s / 10 ms` lands on exactly 20.
fn frame_position(seconds: f64, stride_ms: f64) -> f64 {
    let x = seconds * 1000.0 / stride_ms;
    let r = x.round();
    if (x - r).abs() < 1e-6 {
        r
    } else {
        x
    }
}

/// Frame range `[floor(start / stride), ceil(end / stride))` of one segment,
/// clipped to the utterance.
pub fn segment_frames(m: &FrameMatrix, seg: &WordSegment) -> Result<std::ops::Range<usize>> {
    let stride = m.frame_stride_ms() as f64;
    let total = m.frames();
    let limit_s = (total + 1) as f64 * stride / 1000.0;
    if seg.start_s < 0.0 || seg.end_s <= seg.start_s || seg.end_s > limit_s + 1e-9 {
        return Err(Error::SegmentOutOfRange {
            word: seg.word.clone(),
            start_s: seg.start_s,
            end_s: seg.end_s,
            duration_s: m.duration_s(),
        });
    }
    let start = frame_position(seg.start_s, stride).floor() as usize;
    let end = (frame_position(seg.end_s, stride).ceil() as usize).min(total);
    if start >= end {
        return Err(Error::EmptySlice(seg.word.clone()));
    }
    Ok(start..end)
}

/// Cuts a full-utterance matrix into per-word matrices.
pub fn slice_words(m: &FrameMatrix, segs: &[WordSegment]) -> Result<Vec<(String, FrameMatrix)>> {
    segs.iter()
        .map(|seg| {
            let range = segment_frames(m, seg)?;
            Ok((seg.word.clone(), m.slice(range)?))
        })
        .collect()
}
