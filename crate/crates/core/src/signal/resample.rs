use std::f64::consts::PI;

use super::AudioClip;
use crate::error::{Error, Result};

/// Zero crossings of the sinc kernel on each side, measured at the lower rate.
const ZERO_CROSSINGS: f64 = 16.0;

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

/// Band-limited resampling with a Hann-windowed sinc kernel.
///
/// When downsampling the kernel cutoff moves to the output Nyquist frequency.
/// The output holds `round(N * target / source)` samples.
pub fn resample(clip: &AudioClip, target_rate: u32) -> Result<AudioClip> {
    if target_rate == 0 {
        return Err(Error::UnsupportedFormat("target sample rate of 0 Hz".into()));
    }
    let source_rate = clip.sample_rate();
    if source_rate == target_rate {
        return Ok(clip.clone());
    }
    let input = clip.samples();
    let n_in = input.len();
    let ratio = target_rate as f64 / source_rate as f64;
    let cutoff = ratio.min(1.0);
    let half_width = ZERO_CROSSINGS / cutoff;
    let n_out = ((n_in as u64 * target_rate as u64 + source_rate as u64 / 2) / source_rate as u64)
        .max(1) as usize;

    let output = (0..n_out)
        .map(|n| {
            let t = n as f64 / ratio;
            let lo = ((t - half_width).ceil().max(0.0)) as usize;
            let hi = ((t + half_width).floor() as usize).min(n_in - 1);
            (lo..=hi)
                .map(|k| {
                    let offset = t - k as f64;
                    let window = 0.5 * (1.0 + (PI * offset / half_width).cos());
                    input[k] * cutoff * sinc(cutoff * offset) * window
                })
                .sum::<f64>()
        })
        .collect();
    AudioClip::new(output, target_rate)
}
