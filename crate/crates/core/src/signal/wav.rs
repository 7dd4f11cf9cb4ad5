use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use hound::{SampleFormat, WavReader};

use super::AudioClip;
use crate::error::{Error, Result};

fn map_hound(path: &Path, err: hound::Error) -> Error {
    match err {
        hound::Error::Unsupported | hound::Error::TooWide | hound::Error::InvalidSampleFormat => {
            Error::UnsupportedFormat(format!("{}: {err}", path.display()))
        }
        hound::Error::FormatError(_) | hound::Error::UnfinishedSample => {
            Error::CorruptFile(format!("{}: {err}", path.display()))
        }
        // hound reports short reads as `Other` ("Failed to read enough bytes").
        hound::Error::IoError(e)
            if matches!(e.kind(), std::io::ErrorKind::UnexpectedEof | std::io::ErrorKind::Other) =>
        {
            Error::CorruptFile(format!("{}: truncated ({e})", path.display()))
        }
        hound::Error::IoError(e) => Error::io(path, e),
    }
}

/// Reads a RIFF/WAVE file as a mono clip with amplitudes in `[-1, 1)`.
///
/// Integer PCM is scaled by `2^(bits-1)`, IEEE float is taken as is (clamped).
/// Multi-channel audio is averaged down to one channel.
pub fn load_wav(path: impl AsRef<Path>) -> Result<AudioClip> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = WavReader::new(BufReader::new(file)).map_err(|e| map_hound(path, e))?;
    let spec = reader.spec();
    let channels = spec.channels as usize;
    if channels == 0 {
        return Err(Error::CorruptFile(format!("{}: zero channels", path.display())));
    }

    let interleaved: Vec<f64> = match spec.sample_format {
        SampleFormat::Int => {
            let scale = (1u64 << (spec.bits_per_sample - 1)) as f64;
            reader
                .samples::<i32>()
                .map(|s| s.map(|v| v as f64 / scale))
                .collect::<Result<_, _>>()
                .map_err(|e| map_hound(path, e))?
        }
        SampleFormat::Float => {
            if spec.bits_per_sample != 32 {
                return Err(Error::UnsupportedFormat(format!(
                    "{}: {}-bit float",
                    path.display(),
                    spec.bits_per_sample
                )));
            }
            reader
                .samples::<f32>()
                .map(|s| s.map(|v| (v as f64).clamp(-1.0, 1.0 - f64::EPSILON)))
                .collect::<Result<_, _>>()
                .map_err(|e| map_hound(path, e))?
        }
    };

    if !interleaved.len().is_multiple_of(channels) {
        return Err(Error::CorruptFile(format!(
            "{}: partial frame at end of data",
            path.display()
        )));
    }
    let mono = if channels == 1 {
        interleaved
    } else {
        interleaved
            .chunks_exact(channels)
            .map(|frame| frame.iter().sum::<f64>() / channels as f64)
            .collect()
    };
    if mono.is_empty() {
        return Err(Error::CorruptFile(format!("{}: no audio data", path.display())));
    }
    AudioClip::new(mono, spec.sample_rate)
}
