//! Synthetic datasets with a known accent strength per speaker.
//!
//! Every word has a random frame template per layer. A speaker's rendition is
//! the template plus `strength x` a fixed per-frame accent direction, plus
//! Gaussian noise, with a few frames repeated as a crude time warp. Native
//! references have strength 0, so their DTW distance to a target grows with
//! the target's strength.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use accdist_core::featstore::write_features;
use accdist_core::FrameMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

pub const DIM: usize = 4;
pub const STRIDE_MS: f32 = 10.0;
pub const LAYERS: [u32; 4] = [1, 2, 3, 4];
pub const INFORMATIVE_LAYER: u32 = 3;

/// Word sequence read by every speaker; "the" occurs twice.
pub const SCRIPT: [(&str, &str); 6] = [
    ("the", "ð ə"),
    ("cat", "k æ t"),
    ("sat", "s æ t"),
    ("on", "ɒ n"),
    ("the", "ð ə"),
    ("mat", "m æ t"),
];

/// Accented substitutes for canonical segments.
const SHIFTS: [(&str, &str); 8] = [
    ("ð", "d"),
    ("ə", "a"),
    ("k", "g"),
    ("æ", "ɛ"),
    ("t", "d"),
    ("s", "z"),
    ("ɒ", "o"),
    ("n", "ŋ"),
];

pub struct Dataset {
    pub dir: PathBuf,
    pub manifest: PathBuf,
    pub ratings: PathBuf,
    /// True accent strength of each target.
    pub truth: BTreeMap<String, f64>,
}

pub fn layer_tag(l: u32) -> String {
    format!("layer-{l}")
}

struct Word {
    template: Vec<[f64; DIM]>,
    accent: Vec<[f64; DIM]>,
}

fn random_word(rng: &mut ChaCha8Rng, len: usize) -> Word {
    let unit = Normal::new(0.0, 1.0).unwrap();
    let template = (0..len).map(|_| std::array::from_fn(|_| unit.sample(rng))).collect();
    let accent = (0..len)
        .map(|_| {
            let v: [f64; DIM] = std::array::from_fn(|_| unit.sample(rng));
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.map(|x| x / n)
        })
        .collect();
    Word { template, accent }
}

/// Writes features, segments, transcriptions, manifest and ratings under
/// `dir`. Ratings are `7 - 5 x strength + N(0, rating_noise)`.
pub fn write_dataset(
    dir: &Path,
    seed: u64,
    targets: usize,
    references: usize,
    frame_noise: f64,
    rating_noise: f64,
) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for sub in ["feat", "seg", "tr"] {
        fs::create_dir_all(dir.join(sub)).unwrap();
    }
    let lens: Vec<usize> = SCRIPT.iter().map(|_| rng.random_range(6..10)).collect();
    let words: BTreeMap<u32, Vec<Word>> = LAYERS
        .iter()
        .map(|&l| (l, lens.iter().map(|&n| random_word(&mut rng, n)).collect()))
        .collect();

    let ids: Vec<(String, bool)> = (0..targets)
        .map(|i| (format!("t{i:02}"), true))
        .chain((0..references).map(|i| (format!("r{i:02}"), false)))
        .collect();
    let noise = Normal::new(0.0, frame_noise).unwrap();
    let rating_noise = Normal::new(0.0, rating_noise).unwrap();
    let mut truth = BTreeMap::new();
    let mut manifest = String::from("speaker_id\trole\tfeatures\tsegments\ttranscription\tgroup\n");
    let mut ratings = String::from("speaker\trating\n");

    for (idx, (id, is_target)) in ids.iter().enumerate() {
        let strength = if *is_target { rng.random_range(0.1..1.0) } else { 0.0 };
        // Distractor layers see a strength unrelated to the ratings.
        let per_layer: BTreeMap<u32, f64> = LAYERS
            .iter()
            .map(|&l| {
                let s = if l == INFORMATIVE_LAYER || !is_target {
                    strength
                } else {
                    rng.random_range(0.1..1.0)
                };
                (l, s)
            })
            .collect();
        // Frames repeated per word, shared by all layers.
        let repeats: Vec<Vec<usize>> = lens
            .iter()
            .map(|&n| {
                let mut r = vec![1; n];
                for _ in 0..rng.random_range(0..3) {
                    r[rng.random_range(0..n)] += 1;
                }
                r
            })
            .collect();

        let mut segs = String::new();
        let mut frame = 0usize;
        for ((word, _), r) in SCRIPT.iter().zip(&repeats) {
            let len: usize = r.iter().sum();
            let _ = writeln!(
                segs,
                "{word}\t{}\t{}",
                frame as f64 * STRIDE_MS as f64 / 1000.0,
                (frame + len) as f64 * STRIDE_MS as f64 / 1000.0
            );
            frame += len;
        }
        fs::write(dir.join(format!("seg/{id}.tsv")), segs).unwrap();

        for &l in &LAYERS {
            let s = per_layer[&l];
            let mut data = Vec::new();
            for (w, r) in words[&l].iter().zip(&repeats) {
                for (t, &times) in r.iter().enumerate() {
                    for _ in 0..times {
                        for d in 0..DIM {
                            let v = w.template[t][d] + s * w.accent[t][d] + noise.sample(&mut rng);
                            data.push(v as f32);
                        }
                    }
                }
            }
            let m = FrameMatrix::new(data, DIM, STRIDE_MS, 25.0, layer_tag(l)).unwrap();
            write_features(&m, dir.join(format!("feat/{id}.{}.acft", layer_tag(l)))).unwrap();
        }

        let mut tr = String::new();
        for (word, segs) in SCRIPT {
            let shifted: Vec<&str> = segs
                .split(' ')
                .map(|seg| {
                    let alt = SHIFTS.iter().find(|(a, _)| *a == seg).map(|(_, b)| *b);
                    match alt {
                        Some(b) if rng.random_bool(strength * 0.6) => b,
                        _ => seg,
                    }
                })
                .collect();
            let _ = writeln!(tr, "{word}\t{}", shifted.join(" "));
        }
        fs::write(dir.join(format!("tr/{id}.tsv")), tr).unwrap();

        let role = if *is_target { "target" } else { "reference" };
        let group = if idx % 2 == 0 { "a" } else { "b" };
        let _ = writeln!(
            manifest,
            "{id}\t{role}\tfeat/{id}.{{tag}}.acft\tseg/{id}.tsv\ttr/{id}.tsv\t{group}"
        );
        if *is_target {
            truth.insert(id.clone(), strength);
            let _ = writeln!(ratings, "{id}\t{}", 7.0 - 5.0 * strength + rating_noise.sample(&mut rng));
        }
    }
    let manifest_path = dir.join("manifest.tsv");
    let ratings_path = dir.join("ratings.tsv");
    fs::write(&manifest_path, manifest).unwrap();
    fs::write(&ratings_path, ratings).unwrap();
    Dataset {
        dir: dir.to_path_buf(),
        manifest: manifest_path,
        ratings: ratings_path,
        truth,
    }
}

pub const CONDITIONS: [&str; 4] = ["normal", "device", "intonation", "duration"];

/// An anchor utterance plus `per_condition` recordings of each condition in
/// [`CONDITIONS`]: repeated readings (noise only), a channel offset, a slow
/// contour on the first two dimensions, and a 1.5x interpolated time stretch.
/// Returns the recording list path and the anchor id.
pub fn write_living(dir: &Path, seed: u64, per_condition: usize) -> (PathBuf, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    fs::create_dir_all(dir.join("rec")).unwrap();
    let unit = Normal::new(0.0, 1.0).unwrap();
    let noise = Normal::new(0.0, 0.05).unwrap();
    let len = 40;
    let anchor: Vec<[f64; DIM]> = (0..len).map(|_| std::array::from_fn(|_| unit.sample(&mut rng))).collect();

    let write = |id: &str, rows: &[[f64; DIM]]| {
        let data: Vec<f32> = rows.iter().flatten().map(|&v| v as f32).collect();
        let m = FrameMatrix::new(data, DIM, STRIDE_MS, 25.0, "syn").unwrap();
        write_features(&m, dir.join(format!("rec/{id}.acft"))).unwrap();
    };
    write("anchor", &anchor);
    let mut list = String::from("recording_id\tcondition\tfeatures\n");
    let _ = writeln!(list, "anchor\t-\trec/anchor.acft");

    for cond in CONDITIONS {
        for k in 0..per_condition {
            let id = format!("{cond}{k:02}");
            let base: Vec<[f64; DIM]> = match cond {
                "normal" => anchor.clone(),
                "device" => {
                    let offset: [f64; DIM] = std::array::from_fn(|_| 0.4 * unit.sample(&mut rng));
                    anchor.iter().map(|r| std::array::from_fn(|d| r[d] + offset[d])).collect()
                }
                "intonation" => {
                    let phase = rng.random_range(0.0..std::f64::consts::TAU);
                    anchor
                        .iter()
                        .enumerate()
                        .map(|(t, r)| {
                            let c = 0.8 * (t as f64 / 6.0 + phase).sin();
                            std::array::from_fn(|d| if d < 2 { r[d] + c } else { r[d] })
                        })
                        .collect()
                }
                _ => {
                    let out_len = len * 3 / 2;
                    (0..out_len)
                        .map(|t| {
                            let x = t as f64 * (len - 1) as f64 / (out_len - 1) as f64;
                            let (i, frac) = (x.floor() as usize, x.fract());
                            let j = (i + 1).min(len - 1);
                            std::array::from_fn(|d| anchor[i][d] * (1.0 - frac) + anchor[j][d] * frac)
                        })
                        .collect()
                }
            };
            let rows: Vec<[f64; DIM]> = base
                .iter()
                .map(|r| std::array::from_fn(|d| r[d] + noise.sample(&mut rng)))
                .collect();
            write(&id, &rows);
            let _ = writeln!(list, "{id}\t{cond}\trec/{id}.acft");
        }
    }
    let path = dir.join("recordings.tsv");
    fs::write(&path, list).unwrap();
    (path, "anchor".to_owned())
}
