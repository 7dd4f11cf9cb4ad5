//! 39-dimensional MFCC features: 13 static cepstra with `c0` replaced by the log
//! frame energy, followed by deltas and delta-deltas.
//!
//! Processing chain: pre-emphasis, 25 ms Hamming frames every 10 ms, 512-point
//! power spectrum, 26 triangular mel filters over 0-8000 Hz, log, orthonormal
//! DCT-II. Log arguments are floored at 1e-10 so silence stays finite.

use std::f64::consts::PI;

use rustfft::{num_complex::Complex, FftPlanner};

use super::{AudioClip, FrameMatrix};
use crate::error::{Error, Result};

pub const MFCC_TAG: &str = "mfcc39";

const LOG_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct MfccConfig {
    pub sample_rate: u32,
    pub pre_emphasis: f64,
    /// Analysis window in samples.
    pub window: usize,
    /// Hop between frames in samples.
    pub hop: usize,
    pub fft_size: usize,
    pub mel_filters: usize,
    pub low_hz: f64,
    pub high_hz: f64,
    pub coefficients: usize,
    /// Half-width of the delta regression window in frames.
    pub delta_width: usize,
    /// Per-utterance cepstral mean and variance normalization.
    pub cmvn: bool,
}

impl Default for MfccConfig {
    fn default() -> Self {
        Self {
            sample_rate: 16000,
            pre_emphasis: 0.97,
            window: 400,
            hop: 160,
            fft_size: 512,
            mel_filters: 26,
            low_hz: 0.0,
            high_hz: 8000.0,
            coefficients: 13,
            delta_width: 2,
            cmvn: false,
        }
    }
}

impl MfccConfig {
    pub fn frame_count(&self, samples: usize) -> usize {
        if samples < self.window {
            0
        } else {
            (samples - self.window) / self.hop + 1
        }
    }
}

fn hz_to_mel(hz: f64) -> f64 {
    2595.0 * (1.0 + hz / 700.0).log10()
}

fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (10f64.powf(mel / 2595.0) - 1.0)
}

/// Triangular filters evaluated at the FFT bin centre frequencies.
fn mel_filterbank(cfg: &MfccConfig) -> Vec<Vec<f64>> {
    let bins = cfg.fft_size / 2 + 1;
    let lo = hz_to_mel(cfg.low_hz);
    let hi = hz_to_mel(cfg.high_hz);
    let edges: Vec<f64> = (0..cfg.mel_filters + 2)
        .map(|i| mel_to_hz(lo + (hi - lo) * i as f64 / (cfg.mel_filters + 1) as f64))
        .collect();
    edges
        .windows(3)
        .map(|e| {
            let (left, centre, right) = (e[0], e[1], e[2]);
            (0..bins)
                .map(|k| {
                    let f = k as f64 * cfg.sample_rate as f64 / cfg.fft_size as f64;
                    if f <= left || f >= right {
                        0.0
                    } else if f <= centre {
                        (f - left) / (centre - left)
                    } else {
                        (right - f) / (right - centre)
                    }
                })
                .collect()
        })
        .collect()
}

/// Orthonormal DCT-II basis, `coefficients x inputs`.
fn dct_basis(coefficients: usize, inputs: usize) -> Vec<Vec<f64>> {
    let m = inputs as f64;
    (0..coefficients)
        .map(|i| {
            let scale = if i == 0 { (1.0 / m).sqrt() } else { (2.0 / m).sqrt() };
            (0..inputs)
                .map(|j| scale * (PI * i as f64 * (j as f64 + 0.5) / m).cos())
                .collect()
        })
        .collect()
}

/// Appends delta and delta-delta columns to static features.
///
/// Deltas are the least-squares slope over `±width` frames with the first and
/// last frames replicated past the edges.
pub fn append_deltas(statics: &[Vec<f64>], width: usize) -> Vec<Vec<f64>> {
    let deltas = regression_deltas(statics, width);
    let accel = regression_deltas(&deltas, width);
    statics
        .iter()
        .zip(&deltas)
        .zip(&accel)
        .map(|((s, d), a)| s.iter().chain(d).chain(a).copied().collect())
        .collect()
}

fn regression_deltas(rows: &[Vec<f64>], width: usize) -> Vec<Vec<f64>> {
    let t = rows.len();
    if t == 0 {
        return Vec::new();
    }
    let dim = rows[0].len();
    let denom = 2.0 * (1..=width).map(|n| (n * n) as f64).sum::<f64>();
    (0..t)
        .map(|i| {
            (0..dim)
                .map(|c| {
                    let num: f64 = (1..=width)
                        .map(|n| {
                            let ahead = rows[(i + n).min(t - 1)][c];
                            let behind = rows[i.saturating_sub(n)][c];
                            n as f64 * (ahead - behind)
                        })
                        .sum();
                    num / denom
                })
                .collect()
        })
        .collect()
}

fn normalize_columns(rows: &mut [Vec<f64>]) {
    let t = rows.len() as f64;
    let dim = rows[0].len();
    for c in 0..dim {
        let mean = rows.iter().map(|r| r[c]).sum::<f64>() / t;
        let var = rows.iter().map(|r| (r[c] - mean).powi(2)).sum::<f64>() / t;
        let sd = var.sqrt();
        for r in rows.iter_mut() {
            r[c] -= mean;
            if sd > 0.0 {
                r[c] /= sd;
            }
        }
    }
}

/// Computes the `T x 39` MFCC matrix of a clip at `config.sample_rate`.
pub fn compute_mfcc(clip: &AudioClip, config: &MfccConfig) -> Result<FrameMatrix> {
    if clip.sample_rate() != config.sample_rate {
        return Err(Error::SampleRate {
            expected: config.sample_rate,
            actual: clip.sample_rate(),
        });
    }
    let frames = config.frame_count(clip.len());
    if frames == 0 {
        return Err(Error::TooShort {
            samples: clip.len(),
            window: config.window,
        });
    }

    let x = clip.samples();
    let emphasized: Vec<f64> = std::iter::once(x[0])
        .chain(x.windows(2).map(|w| w[1] - config.pre_emphasis * w[0]))
        .collect();
    let hamming: Vec<f64> = (0..config.window)
        .map(|n| 0.54 - 0.46 * (2.0 * PI * n as f64 / (config.window - 1) as f64).cos())
        .collect();
    let filters = mel_filterbank(config);
    let dct = dct_basis(config.coefficients, config.mel_filters);
    let fft = FftPlanner::new().plan_fft_forward(config.fft_size);
    let bins = config.fft_size / 2 + 1;

    let mut buf = vec![Complex::new(0.0, 0.0); config.fft_size];
    let mut power = vec![0.0; bins];
    let statics: Vec<Vec<f64>> = (0..frames)
        .map(|f| {
            let start = f * config.hop;
            buf.iter_mut().for_each(|c| *c = Complex::new(0.0, 0.0));
            for (n, w) in hamming.iter().enumerate() {
                buf[n].re = emphasized[start + n] * w;
            }
            fft.process(&mut buf);
            for (p, c) in power.iter_mut().zip(&buf) {
                *p = c.norm_sqr() / config.fft_size as f64;
            }
            let log_mel: Vec<f64> = filters
                .iter()
                .map(|h| {
                    let e: f64 = h.iter().zip(&power).map(|(w, p)| w * p).sum();
                    e.max(LOG_FLOOR).ln()
                })
                .collect();
            let mut cep: Vec<f64> = dct
                .iter()
                .map(|basis| basis.iter().zip(&log_mel).map(|(b, l)| b * l).sum())
                .collect();
            cep[0] = power.iter().sum::<f64>().max(LOG_FLOOR).ln();
            cep
        })
        .collect();

    let mut rows = append_deltas(&statics, config.delta_width);
    if config.cmvn {
        normalize_columns(&mut rows);
    }
    let dim = rows[0].len();
    let data = rows.into_iter().flatten().map(|v| v as f32).collect();
    FrameMatrix::new(
        data,
        dim,
        1000.0 * config.hop as f32 / config.sample_rate as f32,
        1000.0 * config.window as f32 / config.sample_rate as f32,
        MFCC_TAG,
    )
}
