use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use accdist_core::aggregate::{passes, MetaFilter, WordMap};
use accdist_core::featstore::{DatasetManifest, SpeakerEntry};
use accdist_core::translev::Transcription;
use accdist_core::{Error, FrameMatrix, Result};

/// Comment lines written at the top of every output file.
pub struct Header {
    lines: Vec<String>,
}

impl Header {
    pub fn new(command: &str) -> Self {
        Self {
            lines: vec![
                format!("accdist {}", env!("CARGO_PKG_VERSION")),
                format!("command={command}"),
            ],
        }
    }

    pub fn kv(mut self, key: &str, value: impl std::fmt::Display) -> Self {
        let v = value.to_string().replace(['\n', '\r'], " ");
        self.lines.push(format!("{key}={v}"));
        self
    }

    pub fn path(self, key: &str, p: &Path) -> Self {
        let shown = p.display().to_string();
        self.kv(key, shown)
    }

    /// Finishes the header with the seed line.
    pub fn seed(mut self, seed: u64) -> Vec<String> {
        self.lines.push(format!("seed={seed}"));
        self.lines
    }
}

pub fn comment_block(header: &[String]) -> String {
    header.iter().map(|l| format!("# {l}\n")).collect()
}

/// Writes `text` to `path`, or to standard output when `path` is `None`.
pub fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::io(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Error::io("<stdout>", e))
        }
    }
}

pub fn parse_filters(raw: &[String]) -> Result<Vec<MetaFilter>> {
    raw.iter().map(|s| s.parse()).collect()
}

/// Targets passing the filters, and all references, in manifest order.
pub fn select<'a>(
    m: &'a DatasetManifest,
    filters: &[MetaFilter],
) -> (Vec<&'a SpeakerEntry>, Vec<&'a SpeakerEntry>) {
    (
        m.targets().filter(|s| passes(filters, s)).collect(),
        m.references().collect(),
    )
}

pub fn load_words(speakers: &[&SpeakerEntry], tag: &str) -> Result<Vec<(String, WordMap<FrameMatrix>)>> {
    speakers
        .par_iter()
        .map(|s| Ok((s.id.clone(), s.word_features(tag)?)))
        .collect()
}

pub fn load_transcriptions(speakers: &[&SpeakerEntry]) -> Result<Vec<(String, WordMap<Transcription>)>> {
    speakers
        .par_iter()
        .map(|s| Ok((s.id.clone(), s.transcriptions()?)))
        .collect()
}

pub fn borrowed<T>(loaded: &[(String, WordMap<T>)]) -> Vec<(String, &WordMap<T>)> {
    loaded.iter().map(|(id, m)| (id.clone(), m)).collect()
}

/// Scores keyed by id from the first value column of a TSV score table.
pub fn read_scores(path: &Path) -> Result<BTreeMap<String, f64>> {
    let t = accdist_core::aggregate::DistanceTable::read_tsv(path)?;
    if t.cols.is_empty() {
        return Err(Error::parse(path, 1, "score table has no value column"));
    }
    Ok(t.scalar_map())
}
