//! Phonetic transcription distances: Levenshtein alignment with segment costs
//! induced from pointwise mutual information over aligned segment pairs.

mod align;
mod costs;
mod pmi;

pub use align::{levenshtein_align, speaker_pair_lev, AlignedPair, LevAlignment};
pub use costs::{format_cost_table, read_cost_table, write_cost_table, SegmentCostTable, GAP_TOKEN};
pub use pmi::{corpus_alignments, induce_pmi_costs, induce_pmi_costs_from, InductionConfig};

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::featstore::tsv::{self, OccurrenceLabeler};

/// An ordered sequence of IPA segment tokens for one pronunciation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Transcription {
    segments: Vec<String>,
}

impl Transcription {
    pub fn new<S: Into<String>>(segments: impl IntoIterator<Item = S>) -> Result<Self> {
        let segments: Vec<String> = segments.into_iter().map(Into::into).collect();
        if segments.is_empty() {
            return Err(Error::EmptyTranscription);
        }
        if segments.iter().any(|s| s.is_empty() || s.chars().any(char::is_whitespace)) {
            return Err(Error::EmptyTranscription);
        }
        Ok(Self { segments })
    }

    /// Splits on whitespace.
    pub fn parse(text: &str) -> Result<Self> {
        Self::new(text.split_whitespace())
    }

    pub fn segments(&self) -> &[String] {
        &self.segments
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }
}

impl fmt::Display for Transcription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.segments.join(" "))
    }
}

/// Reads `word<TAB>space-separated segments` lines.
///
/// Repeated words get `#n` suffixes, matching the segment file convention.
pub fn read_transcriptions(path: impl AsRef<Path>) -> Result<BTreeMap<String, Transcription>> {
    let path = path.as_ref();
    let mut labeler = OccurrenceLabeler::default();
    let mut out = BTreeMap::new();
    for rec in tsv::read_records(path)? {
        if rec.fields.len() != 2 {
            return Err(Error::parse(
                path,
                rec.line,
                format!("expected 2 columns, found {}", rec.fields.len()),
            ));
        }
        let t = Transcription::parse(&rec.fields[1])
            .map_err(|_| Error::parse(path, rec.line, "empty transcription"))?;
        if t.segments().iter().any(|s| s == GAP_TOKEN) {
            return Err(Error::parse(
                path,
                rec.line,
                format!("{GAP_TOKEN:?} is reserved for gaps"),
            ));
        }
        out.insert(labeler.label(rec.fields[0].trim()), t);
    }
    Ok(out)
}
