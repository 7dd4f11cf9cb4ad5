use std::io::Read;
use std::path::PathBuf;

use clap::Args;

use accdist_core::featstore::{acft, read_features, write_features, DatasetManifest, TAG_PLACEHOLDER};
use accdist_core::signal::{compute_mfcc, load_wav, resample, MfccConfig};
use accdist_core::{Error, Result};

use crate::output::emit;

#[derive(Debug, Args)]
pub struct MfccArgs {
    /// Input WAV file (resampled to 16 kHz when needed).
    pub wav: PathBuf,
    /// Output ACFT feature file.
    #[arg(short, long, value_name = "PATH")]
    pub output: PathBuf,
    /// Normalize each cepstral column to zero mean and unit variance.
    #[arg(long)]
    pub cmvn: bool,
}

pub fn mfcc(a: &MfccArgs) -> Result<()> {
    let config = MfccConfig {
        cmvn: a.cmvn,
        ..MfccConfig::default()
    };
    let clip = load_wav(&a.wav)?;
    let clip = if clip.sample_rate() == config.sample_rate {
        clip
    } else {
        resample(&clip, config.sample_rate)?
    };
    let m = compute_mfcc(&clip, &config)?;
    write_features(&m, &a.output)?;
    eprintln!("{}: {} frames x {}", a.output.display(), m.frames(), m.dim());
    Ok(())
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// An ACFT feature file or a dataset manifest.
    pub path: PathBuf,
    /// Feature tags to check for every speaker of a manifest (repeatable).
    #[arg(long = "features", value_name = "TAG")]
    pub tags: Vec<String>,
}

fn has_magic(path: &PathBuf) -> Result<bool> {
    let mut f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut magic = [0u8; 4];
    let n = f.read(&mut magic).map_err(|e| Error::io(path, e))?;
    Ok(n == 4 && magic == acft::MAGIC)
}

pub fn validate(a: &ValidateArgs) -> Result<()> {
    if has_magic(&a.path)? {
        let m = read_features(&a.path)?;
        let text = format!(
            "ok\t{}\tframes={}\tdim={}\tstride_ms={}\twindow_ms={}\ttag={}\n",
            a.path.display(),
            m.frames(),
            m.dim(),
            m.frame_stride_ms(),
            m.window_ms(),
            m.source_tag()
        );
        return emit(None, &text);
    }
    let manifest = DatasetManifest::load(&a.path)?;
    let mut words = 0usize;
    for s in &manifest.speakers {
        if let Some(template) = &s.features {
            let tags: Vec<&str> = if template.contains(TAG_PLACEHOLDER) {
                a.tags.iter().map(String::as_str).collect()
            } else {
                vec![""]
            };
            for tag in tags {
                words += s.word_features(tag)?.len();
            }
        }
        if s.transcription.is_some() {
            s.transcriptions()?;
        }
    }
    let text = format!(
        "ok\t{}\tspeakers={}\ttargets={}\treferences={}\tword_slices={}\n",
        a.path.display(),
        manifest.speakers.len(),
        manifest.targets().count(),
        manifest.references().count(),
        words
    );
    emit(None, &text)
}
