use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the toolkit can report.
///
/// Variant names double as the stable error identifiers printed by the command
/// line front end, see [`Error::name`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported audio format: {0}")]
    UnsupportedFormat(String),
    #[error("corrupt file: {0}")]
    CorruptFile(String),
    #[error("clip of {samples} samples is shorter than one {window}-sample analysis window")]
    TooShort { samples: usize, window: usize },
    #[error("expected a {expected} Hz clip, got {actual} Hz")]
    SampleRate { expected: u32, actual: u32 },
    #[error("invalid frame matrix: {0}")]
    InvalidFrames(String),

    #[error("not a feature file (bad magic {0:?})")]
    NotAFeatureFile([u8; 4]),
    #[error("unsupported feature file version {0}")]
    UnsupportedVersion(u16),
    #[error("segment {word:?} ({start_s}-{end_s} s) lies outside the {duration_s} s utterance")]
    SegmentOutOfRange {
        word: String,
        start_s: f64,
        end_s: f64,
        duration_s: f64,
    },
    #[error("segment {0:?} covers no frames")]
    EmptySlice(String),
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("invalid manifest: {0}")]
    Manifest(String),

    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("empty input sequence")]
    EmptyInput,
    #[error("bad moving-average window {window} for a series of {len} frames (must be odd and <= len)")]
    BadWindow { window: usize, len: usize },

    #[error("empty transcription")]
    EmptyTranscription,
    #[error("invalid cost table: {0}")]
    InvalidCostTable(String),
    #[error("empty corpus: no word has two or more variants")]
    EmptyCorpus,
    #[error("the two speakers share no words")]
    NoSharedWords,

    #[error("empty reference set")]
    EmptyReferenceSet,
    #[error("validation split of {0} speakers is too small (need at least 4)")]
    SplitTooSmall(usize),
    #[error("all values are equal; min-max range is degenerate")]
    DegenerateRange,
    #[error("no rating for speaker {0:?}")]
    MissingRating(String),
    #[error("need at least two layers, got {0}")]
    TooFewLayers(usize),

    #[error("zero variance input")]
    ZeroVariance,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("sample of {0} is too small")]
    SampleTooSmall(usize),
    #[error("correlation of magnitude 1 is degenerate")]
    DegenerateCorrelation,
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("design matrix is rank deficient")]
    SingularDesign,
    #[error("invalid distance matrix: {0}")]
    InvalidDistanceMatrix(String),
    #[error("no positive eigenvalues")]
    DegenerateGeometry,

    #[error("unsupported dimensionality {0} (expected 2 or 3)")]
    UnsupportedDim(usize),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }

    /// Stable identifier of the error kind.
    pub fn name(&self) -> &'static str {
        match self {
            Error::UnsupportedFormat(_) => "UnsupportedFormat",
            Error::CorruptFile(_) => "CorruptFile",
            Error::TooShort { .. } => "TooShort",
            Error::SampleRate { .. } => "SampleRate",
            Error::InvalidFrames(_) => "InvalidFrames",
            Error::NotAFeatureFile(_) => "NotAFeatureFile",
            Error::UnsupportedVersion(_) => "UnsupportedVersion",
            Error::SegmentOutOfRange { .. } => "SegmentOutOfRange",
            Error::EmptySlice(_) => "EmptySlice",
            Error::Parse { .. } => "ParseError",
            Error::Manifest(_) => "InvalidManifest",
            Error::DimMismatch(..) => "DimMismatch",
            Error::EmptyInput => "EmptyInput",
            Error::BadWindow { .. } => "BadWindow",
            Error::EmptyTranscription => "EmptyTranscription",
            Error::InvalidCostTable(_) => "InvalidCostTable",
            Error::EmptyCorpus => "EmptyCorpus",
            Error::NoSharedWords => "NoSharedWords",
            Error::EmptyReferenceSet => "EmptyReferenceSet",
            Error::SplitTooSmall(_) => "SplitTooSmall",
            Error::DegenerateRange => "DegenerateRange",
            Error::MissingRating(_) => "MissingRating",
            Error::TooFewLayers(_) => "TooFewLayers",
            Error::ZeroVariance => "ZeroVariance",
            Error::LengthMismatch(..) => "LengthMismatch",
            Error::SampleTooSmall(_) => "SampleTooSmall",
            Error::DegenerateCorrelation => "DegenerateCorrelation",
            Error::InsufficientData(_) => "InsufficientData",
            Error::SingularDesign => "SingularDesign",
            Error::InvalidDistanceMatrix(_) => "InvalidDistanceMatrix",
            Error::DegenerateGeometry => "DegenerateGeometry",
            Error::UnsupportedDim(_) => "UnsupportedDim",
            Error::Io { .. } => "IoError",
        }
    }
}
