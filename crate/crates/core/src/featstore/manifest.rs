use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::acft::read_features;
use super::segments::{read_segments, slice_words};
use super::tsv;
use crate::error::{Error, Result};
use crate::signal::FrameMatrix;
use crate::translev::{read_transcriptions, Transcription};

/// Placeholder in a feature path that is replaced by the feature source tag.
pub const TAG_PLACEHOLDER: &str = "{tag}";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Target,
    Reference,
}

impl FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "target" => Ok(Role::Target),
            "reference" => Ok(Role::Reference),
            other => Err(format!("role must be target or reference, got {other:?}")),
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Target => "target",
            Role::Reference => "reference",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpeakerEntry {
    pub id: String,
    pub role: Role,
    /// Extra manifest columns such as `L1`, `gender` or `region`.
    pub metadata: BTreeMap<String, String>,
    /// Feature file path, possibly containing [`TAG_PLACEHOLDER`].
    pub features: Option<String>,
    pub segments: Option<PathBuf>,
    pub transcription: Option<PathBuf>,
}

/// A speaker table loaded from a TSV manifest.
///
/// The first record is a header naming the columns. `speaker_id`, `role`,
/// `features` and `segments` are required, `transcription` is optional, and
/// every other column becomes per-speaker metadata. A cell of `-` or an empty
/// cell means absent. Relative paths are resolved against the manifest's
/// directory.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetManifest {
    pub path: PathBuf,
    pub speakers: Vec<SpeakerEntry>,
}

const REQUIRED: [&str; 4] = ["speaker_id", "role", "features", "segments"];

fn cell(fields: &[String], idx: Option<usize>) -> Option<&str> {
    idx.and_then(|i| fields.get(i))
        .map(|s| s.trim())
        .filter(|s| !s.is_empty() && *s != "-")
}

impl DatasetManifest {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let base = path.parent().unwrap_or(Path::new("."));
        let records = tsv::read_records(path)?;
        let (header, rows) = records
            .split_first()
            .ok_or_else(|| Error::Manifest(format!("{}: no header line", path.display())))?;
        let col = |name: &str| header.fields.iter().position(|h| h.trim() == name);
        for name in REQUIRED {
            if col(name).is_none() {
                return Err(Error::parse(
                    path,
                    header.line,
                    format!("missing required column {name:?}"),
                ));
            }
        }
        let known: BTreeSet<&str> = REQUIRED.iter().copied().chain(["transcription"]).collect();
        let meta_cols: Vec<(usize, String)> = header
            .fields
            .iter()
            .enumerate()
            .filter(|(_, h)| !known.contains(h.trim()))
            .map(|(i, h)| (i, h.trim().to_owned()))
            .collect();

        let resolve = |p: &str| -> PathBuf {
            let p = Path::new(p);
            if p.is_absolute() {
                p.to_path_buf()
            } else {
                base.join(p)
            }
        };

        let mut seen = BTreeSet::new();
        let mut speakers = Vec::with_capacity(rows.len());
        for rec in rows {
            let f = &rec.fields;
            let id = cell(f, col("speaker_id"))
                .ok_or_else(|| Error::parse(path, rec.line, "empty speaker_id"))?
                .to_owned();
            if !seen.insert(id.clone()) {
                return Err(Error::parse(path, rec.line, format!("duplicate speaker {id:?}")));
            }
            let role: Role = cell(f, col("role"))
                .unwrap_or("")
                .parse()
                .map_err(|m: String| Error::parse(path, rec.line, m))?;
            let features = cell(f, col("features")).map(|p| {
                let resolved = resolve(p);
                resolved.to_string_lossy().into_owned()
            });
            let segments = cell(f, col("segments")).map(resolve);
            let transcription = cell(f, col("transcription")).map(resolve);
            if features.is_none() && transcription.is_none() {
                return Err(Error::parse(
                    path,
                    rec.line,
                    format!("speaker {id:?} has neither features nor a transcription"),
                ));
            }
            if features.is_some() != segments.is_some() {
                return Err(Error::parse(
                    path,
                    rec.line,
                    format!("speaker {id:?} needs both features and segments"),
                ));
            }
            for p in segments.iter().chain(transcription.iter()) {
                if !p.is_file() {
                    return Err(Error::Manifest(format!(
                        "{}:{}: {} does not exist",
                        path.display(),
                        rec.line,
                        p.display()
                    )));
                }
            }
            if let Some(fp) = &features {
                if !fp.contains(TAG_PLACEHOLDER) && !Path::new(fp).is_file() {
                    return Err(Error::Manifest(format!(
                        "{}:{}: {fp} does not exist",
                        path.display(),
                        rec.line
                    )));
                }
            }
            let metadata = meta_cols
                .iter()
                .filter_map(|(i, name)| cell(f, Some(*i)).map(|v| (name.clone(), v.to_owned())))
                .collect();
            speakers.push(SpeakerEntry {
                id,
                role,
                metadata,
                features,
                segments,
                transcription,
            });
        }
        Ok(Self {
            path: path.to_path_buf(),
            speakers,
        })
    }

    pub fn targets(&self) -> impl Iterator<Item = &SpeakerEntry> {
        self.speakers.iter().filter(|s| s.role == Role::Target)
    }

    pub fn references(&self) -> impl Iterator<Item = &SpeakerEntry> {
        self.speakers.iter().filter(|s| s.role == Role::Reference)
    }

    pub fn speaker(&self, id: &str) -> Option<&SpeakerEntry> {
        self.speakers.iter().find(|s| s.id == id)
    }
}

impl SpeakerEntry {
    /// Feature file for `tag`, substituting the placeholder when present.
    pub fn feature_path(&self, tag: &str) -> Result<PathBuf> {
        let template = self
            .features
            .as_ref()
            .ok_or_else(|| Error::Manifest(format!("speaker {:?} has no features", self.id)))?;
        Ok(PathBuf::from(template.replace(TAG_PLACEHOLDER, tag)))
    }

    /// Loads the utterance features for `tag` and slices them into words.
    pub fn word_features(&self, tag: &str) -> Result<BTreeMap<String, FrameMatrix>> {
        let features = read_features(self.feature_path(tag)?)?;
        let segs_path = self
            .segments
            .as_ref()
            .ok_or_else(|| Error::Manifest(format!("speaker {:?} has no segments", self.id)))?;
        let segs = read_segments(segs_path)?;
        Ok(slice_words(&features, &segs)?.into_iter().collect())
    }

    pub fn transcriptions(&self) -> Result<BTreeMap<String, Transcription>> {
        let path = self.transcription.as_ref().ok_or_else(|| {
            Error::Manifest(format!("speaker {:?} has no transcription", self.id))
        })?;
        read_transcriptions(path)
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata.get(key).map(String::as_str)
    }
}
