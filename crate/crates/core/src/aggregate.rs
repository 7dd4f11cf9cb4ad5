//! From word-level distances to speaker-level scores and their evaluation
//! against human ratings.
//!
//! Pairwise word distances between every target and reference speaker are
//! computed once into a [`WordDistanceCube`] (in parallel, collected in fixed
//! order). Native-likeness, the single-reference sweep and per-word
//! correlations are all reductions of that cube in index order, so results do
//! not depend on the thread count.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dtw::dtw_distance;
use crate::error::{Error, Result};
use crate::featstore::{tsv, SpeakerEntry};
use crate::report::fmt_num;
use crate::signal::FrameMatrix;
use crate::stats::{pearson, steiger_z, RatingsTable, SteigerTest};
use crate::translev::{levenshtein_align, SegmentCostTable, Transcription};

/// Per-word items of one speaker, keyed by word label.
pub type WordMap<T> = BTreeMap<String, T>;

/// Labeled table of non-negative distances.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceTable {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    values: Vec<f64>,
    pub method_tag: String,
}

impl DistanceTable {
    pub fn new(rows: Vec<String>, cols: Vec<String>, values: Vec<f64>, method_tag: &str) -> Result<Self> {
        if values.len() != rows.len() * cols.len() {
            return Err(Error::LengthMismatch(values.len(), rows.len() * cols.len()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidDistanceMatrix(format!("entry {v}")));
        }
        let t = Self {
            rows,
            cols,
            values,
            method_tag: method_tag.to_owned(),
        };
        if t.rows == t.cols {
            let n = t.rows.len();
            for i in 0..n {
                if t.get(i, i) != 0.0 {
                    return Err(Error::InvalidDistanceMatrix(format!("nonzero diagonal at {}", t.rows[i])));
                }
                for j in 0..i {
                    if t.get(i, j) != t.get(j, i) {
                        return Err(Error::InvalidDistanceMatrix(format!(
                            "asymmetric at ({}, {})",
                            t.rows[i], t.rows[j]
                        )));
                    }
                }
            }
        }
        Ok(t)
    }

    /// A single-column table of per-speaker scalars.
    pub fn scalar(ids: Vec<String>, values: Vec<f64>, label: &str, method_tag: &str) -> Result<Self> {
        Self::new(ids, vec![label.to_owned()], values, method_tag)
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.values[r * self.cols.len() + c]
    }

    pub fn row(&self, r: usize) -> &[f64] {
        let k = self.cols.len();
        &self.values[r * k..(r + 1) * k]
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.rows.len()).map(|r| self.get(r, c)).collect()
    }

    /// Rows as nested vectors, e.g. for classical scaling.
    pub fn to_nested(&self) -> Vec<Vec<f64>> {
        (0..self.rows.len()).map(|r| self.row(r).to_vec()).collect()
    }

    /// First column keyed by row id.
    pub fn scalar_map(&self) -> BTreeMap<String, f64> {
        self.rows.iter().cloned().zip(self.column(0)).collect()
    }

    pub fn to_tsv(&self, header: &[String]) -> String {
        let mut out = String::new();
        for line in header {
            let _ = writeln!(out, "# {line}");
        }
        let _ = writeln!(out, "# method={}", self.method_tag);
        out.push_str("id");
        for c in &self.cols {
            let _ = write!(out, "\t{c}");
        }
        out.push('\n');
        for (r, id) in self.rows.iter().enumerate() {
            out.push_str(id);
            for v in self.row(r) {
                let _ = write!(out, "\t{}", fmt_num(*v));
            }
            out.push('\n');
        }
        out
    }

    /// Reads the format written by [`DistanceTable::to_tsv`].
    pub fn read_tsv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let method = text
            .lines()
            .filter_map(|l| l.trim_start().strip_prefix('#'))
            .find_map(|c| c.trim().strip_prefix("method=").map(str::to_owned))
            .unwrap_or_default();
        let records = tsv::parse_records(&text);
        let (header, body) = records
            .split_first()
            .ok_or_else(|| Error::parse(path, 1, "empty distance table"))?;
        let cols: Vec<String> = header.fields[1..].iter().map(|s| s.trim().to_owned()).collect();
        let mut rows = Vec::with_capacity(body.len());
        let mut values = Vec::with_capacity(body.len() * cols.len());
        for rec in body {
            if rec.fields.len() != cols.len() + 1 {
                return Err(Error::parse(path, rec.line, "wrong number of columns"));
            }
            rows.push(rec.fields[0].trim().to_owned());
            for j in 1..rec.fields.len() {
                values.push(tsv::parse_f64(path, rec, j, "distance")?);
            }
        }
        Self::new(rows, cols, values, &method).map_err(|e| Error::parse(path, 0, e.to_string()))
    }
}

/// Mean of `f` over the words both speakers have, in word order.
pub fn speaker_pair_distance<T>(
    a: &WordMap<T>,
    b: &WordMap<T>,
    f: impl Fn(&T, &T) -> Result<f64>,
) -> Result<f64> {
    let mut sum = 0.0;
    let mut n = 0usize;
    for (w, x) in a {
        if let Some(y) = b.get(w) {
            sum += f(x, y)?;
            n += 1;
        }
    }
    if n == 0 {
        return Err(Error::NoSharedWords);
    }
    Ok(sum / n as f64)
}

pub fn dtw_word_distance(a: &FrameMatrix, b: &FrameMatrix) -> Result<f64> {
    Ok(dtw_distance(a, b)?.normalized_cost)
}

/// Mean DTW distance over shared words.
pub fn speaker_pair_acoustic(a: &WordMap<FrameMatrix>, b: &WordMap<FrameMatrix>) -> Result<f64> {
    speaker_pair_distance(a, b, dtw_word_distance)
}

/// Mean speaker-pair distance from `target` to every reference.
pub fn native_likeness(target: &WordMap<FrameMatrix>, references: &[&WordMap<FrameMatrix>]) -> Result<f64> {
    if references.is_empty() {
        return Err(Error::EmptyReferenceSet);
    }
    let mut sum = 0.0;
    for r in references {
        sum += speaker_pair_acoustic(target, r)?;
    }
    Ok(sum / references.len() as f64)
}

/// Word distances for every (target, reference) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct WordDistanceCube {
    pub targets: Vec<String>,
    pub references: Vec<String>,
    cells: Vec<BTreeMap<String, f64>>,
}

impl WordDistanceCube {
    /// Computes `f` on every shared word of every target/reference pair.
    /// Pairs run in parallel; results are stored in (target, reference) order.
    pub fn compute<T, F>(
        targets: &[(String, &WordMap<T>)],
        references: &[(String, &WordMap<T>)],
        f: F,
    ) -> Result<Self>
    where
        T: Sync,
        F: Fn(&T, &T) -> Result<f64> + Sync,
    {
        if references.is_empty() {
            return Err(Error::EmptyReferenceSet);
        }
        let nr = references.len();
        let cells = (0..targets.len() * nr)
            .into_par_iter()
            .map(|k| {
                let (tid, a) = &targets[k / nr];
                let (rid, b) = &references[k % nr];
                let mut words = BTreeMap::new();
                for (w, x) in a.iter() {
                    if let Some(y) = b.get(w) {
                        words.insert(w.clone(), f(x, y)?);
                    }
                }
                if words.is_empty() {
                    log::warn!("speakers {tid:?} and {rid:?} share no words");
                    return Err(Error::NoSharedWords);
                }
                Ok(words)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            targets: targets.iter().map(|(id, _)| id.clone()).collect(),
            references: references.iter().map(|(id, _)| id.clone()).collect(),
            cells,
        })
    }

    pub fn acoustic(
        targets: &[(String, &WordMap<FrameMatrix>)],
        references: &[(String, &WordMap<FrameMatrix>)],
    ) -> Result<Self> {
        Self::compute(targets, references, dtw_word_distance)
    }

    pub fn phonetic(
        targets: &[(String, &WordMap<Transcription>)],
        references: &[(String, &WordMap<Transcription>)],
        costs: &SegmentCostTable,
    ) -> Result<Self> {
        Self::compute(targets, references, |a, b| Ok(levenshtein_align(a, b, costs)?.normalized))
    }

    pub fn cell(&self, t: usize, r: usize) -> &BTreeMap<String, f64> {
        &self.cells[t * self.references.len() + r]
    }

    /// Every word occurring in any pair.
    pub fn words(&self) -> BTreeSet<String> {
        self.cells.iter().flat_map(|c| c.keys().cloned()).collect()
    }

    /// Speaker-pair distances, targets x references.
    pub fn pair_table(&self, method_tag: &str) -> DistanceTable {
        let values = self
            .cells
            .iter()
            .map(|c| c.values().sum::<f64>() / c.len() as f64)
            .collect();
        DistanceTable::new(self.targets.clone(), self.references.clone(), values, method_tag)
            .expect("cube distances are finite and non-negative")
    }

    /// Native-likeness of every target: row means of the pair table.
    pub fn native_likeness(&self) -> Vec<f64> {
        let pairs = self.pair_table("");
        (0..self.targets.len())
            .map(|t| pairs.row(t).iter().sum::<f64>() / self.references.len() as f64)
            .collect()
    }

    /// Native-likeness restricted to one word: per target, the mean over the
    /// references sharing it, or `None` when no reference does.
    pub fn word_likeness(&self, word: &str) -> Vec<Option<f64>> {
        (0..self.targets.len())
            .map(|t| {
                let vals: Vec<f64> = (0..self.references.len())
                    .filter_map(|r| self.cell(t, r).get(word).copied())
                    .collect();
                (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
            })
            .collect()
    }

    /// Keeps the targets accepted by `keep`, preserving order.
    pub fn filter_targets(&self, keep: impl Fn(&str) -> bool) -> Self {
        let nr = self.references.len();
        let mut targets = Vec::new();
        let mut cells = Vec::new();
        for (t, id) in self.targets.iter().enumerate() {
            if keep(id) {
                targets.push(id.clone());
                cells.extend_from_slice(&self.cells[t * nr..(t + 1) * nr]);
            }
        }
        Self {
            targets,
            references: self.references.clone(),
            cells,
        }
    }
}

/// Correlation of per-speaker scores with averaged ratings.
pub fn correlate_with_ratings<S: AsRef<str>>(ids: &[S], scores: &[f64], ratings: &RatingsTable) -> Result<f64> {
    pearson(scores, &ratings.values_for(ids)?)
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let sd = if xs.len() < 2 {
        0.0
    } else {
        (xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    (mean, sd)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingleReferenceSweep {
    pub per_reference: Vec<(String, f64)>,
    pub mean: f64,
    /// Sample standard deviation; 0 for a single reference.
    pub sd: f64,
    pub min: f64,
    pub max: f64,
}

/// Treats each reference speaker in turn as the whole reference set.
pub fn single_reference_sweep(cube: &WordDistanceCube, ratings: &RatingsTable) -> Result<SingleReferenceSweep> {
    if cube.references.is_empty() {
        return Err(Error::EmptyReferenceSet);
    }
    let pairs = cube.pair_table("");
    let per_reference = cube
        .references
        .iter()
        .enumerate()
        .map(|(r, id)| Ok((id.clone(), correlate_with_ratings(&cube.targets, &pairs.column(r), ratings)?)))
        .collect::<Result<Vec<_>>>()?;
    let rs: Vec<f64> = per_reference.iter().map(|(_, r)| *r).collect();
    let (mean, sd) = mean_sd(&rs);
    Ok(SingleReferenceSweep {
        mean,
        sd,
        min: rs.iter().copied().fold(f64::INFINITY, f64::min),
        max: rs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        per_reference,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerWordCorrelations {
    /// Correlation and number of targets per word.
    pub per_word: BTreeMap<String, (f64, usize)>,
    pub mean: f64,
    pub sd: f64,
}

/// Correlates single-word native-likeness with ratings for every word.
///
/// Targets lacking a word are left out of that word's correlation. Words with
/// fewer than three scored targets or constant scores are skipped with a
/// warning.
pub fn per_word_correlations(cube: &WordDistanceCube, ratings: &RatingsTable) -> Result<PerWordCorrelations> {
    let mut per_word = BTreeMap::new();
    for word in cube.words() {
        let (ids, scores): (Vec<&str>, Vec<f64>) = cube
            .targets
            .iter()
            .zip(cube.word_likeness(&word))
            .filter_map(|(id, s)| s.map(|s| (id.as_str(), s)))
            .unzip();
        match correlate_with_ratings(&ids, &scores, ratings) {
            Ok(r) => {
                per_word.insert(word, (r, ids.len()));
            }
            Err(e @ (Error::SampleTooSmall(_) | Error::ZeroVariance)) => {
                log::warn!("skipping word {word:?}: {e}");
            }
            Err(e) => return Err(e),
        }
    }
    if per_word.is_empty() {
        return Err(Error::InsufficientData("no word could be correlated".into()));
    }
    let rs: Vec<f64> = per_word.values().map(|(r, _)| *r).collect();
    let (mean, sd) = mean_sd(&rs);
    Ok(PerWordCorrelations { per_word, mean, sd })
}

/// `(v - min) / (max - min)`.
pub fn minmax_scale(values: &[f64]) -> Result<Vec<f64>> {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
    if !(hi > lo) || !(hi - lo).is_finite() {
        return Err(Error::DegenerateRange);
    }
    Ok(values.iter().map(|v| (v - lo) / (hi - lo)).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionSummary {
    pub condition: String,
    pub mean: f64,
    pub sd: f64,
    pub n: usize,
}

/// Scales all distances of all conditions jointly into [0, 1], then reports
/// the mean and sample standard deviation per condition.
pub fn scaled_condition_summary(conditions: &[(String, Vec<f64>)]) -> Result<Vec<ConditionSummary>> {
    let all: Vec<f64> = conditions.iter().flat_map(|(_, d)| d.iter().copied()).collect();
    let scaled = minmax_scale(&all)?;
    let mut offset = 0;
    conditions
        .iter()
        .map(|(name, d)| {
            if d.is_empty() {
                return Err(Error::InsufficientData(format!("condition {name:?} is empty")));
            }
            let part = &scaled[offset..offset + d.len()];
            offset += d.len();
            let (mean, sd) = mean_sd(part);
            Ok(ConditionSummary {
                condition: name.clone(),
                mean,
                sd,
                n: d.len(),
            })
        })
        .collect()
}

/// Draws the validation targets: `round(fraction * n)` of the sorted ids,
/// shuffled by a ChaCha8 stream seeded with `seed`, returned sorted.
pub fn validation_split(targets: &[String], fraction: f64, seed: u64) -> Result<Vec<String>> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InsufficientData(format!("validation fraction {fraction} outside (0, 1)")));
    }
    let mut ids: Vec<String> = targets.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let m = (fraction * ids.len() as f64).round() as usize;
    if m < 4 {
        return Err(Error::SplitTooSmall(m));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ids.shuffle(&mut rng);
    ids.truncate(m);
    ids.sort();
    Ok(ids)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerSelection {
    pub per_layer_r: BTreeMap<u32, f64>,
    pub best_layer: u32,
    /// Layers not significantly different from the best, the best included.
    pub tie_set: BTreeSet<u32>,
    /// Steiger test of the best layer against each other layer.
    pub tests: BTreeMap<u32, SteigerTest>,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerSweepResult {
    pub selection: LayerSelection,
    pub validation: Vec<String>,
    pub split_seed: u64,
    pub validation_fraction: f64,
    pub threshold: f64,
}

fn compare_layers(r_best: f64, r_other: f64, r_between: f64, n: usize) -> Result<SteigerTest> {
    match steiger_z(r_best, r_other, r_between, n) {
        // Perfectly collinear scores or a perfect layer: equal correlations are
        // a tie, anything else is a certain difference.
        Err(Error::DegenerateCorrelation) => Ok(if r_best.abs() == r_other.abs() {
            SteigerTest { z: 0.0, p: 1.0 }
        } else {
            SteigerTest {
                z: f64::INFINITY.copysign(r_best.abs() - r_other.abs()),
                p: 0.0,
            }
        }),
        other => other,
    }
}

/// Picks the layer whose scores correlate most strongly (in magnitude) with
/// the ratings of `ids`, and the set of layers whose correlation does not
/// differ from it at `threshold` by Steiger's test.
pub fn select_layer(
    ids: &[String],
    per_layer_scores: &BTreeMap<u32, Vec<f64>>,
    ratings: &RatingsTable,
    threshold: f64,
) -> Result<LayerSelection> {
    if per_layer_scores.is_empty() {
        return Err(Error::TooFewLayers(0));
    }
    let n = ids.len();
    if n < 4 {
        return Err(Error::SplitTooSmall(n));
    }
    let y = ratings.values_for(ids)?;
    let per_layer_r = per_layer_scores
        .iter()
        .map(|(l, s)| Ok((*l, pearson(s, &y)?)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    let mut best = *per_layer_r.keys().next().expect("non-empty");
    for (l, r) in &per_layer_r {
        if r.abs() > per_layer_r[&best].abs() {
            best = *l;
        }
    }
    let r_best = per_layer_r[&best];
    let mut tie_set = BTreeSet::from([best]);
    let mut tests = BTreeMap::new();
    for (l, r) in &per_layer_r {
        if *l == best {
            continue;
        }
        let between = pearson(&per_layer_scores[&best], &per_layer_scores[l])?;
        let t = compare_layers(r_best, *r, between, n)?;
        if t.p > threshold {
            tie_set.insert(*l);
        }
        tests.insert(*l, t);
    }
    Ok(LayerSelection {
        per_layer_r,
        best_layer: best,
        tie_set,
        tests,
        n,
    })
}

/// Splits the targets, then runs [`select_layer`] on the validation part.
pub fn layer_sweep(
    per_layer: &BTreeMap<u32, BTreeMap<String, f64>>,
    ratings: &RatingsTable,
    validation_fraction: f64,
    seed: u64,
    threshold: f64,
) -> Result<LayerSweepResult> {
    let first = per_layer.values().next().ok_or(Error::TooFewLayers(0))?;
    let targets: Vec<String> = first.keys().cloned().collect();
    let validation = validation_split(&targets, validation_fraction, seed)?;
    let scores = per_layer
        .iter()
        .map(|(l, m)| {
            let v = validation
                .iter()
                .map(|id| {
                    m.get(id)
                        .copied()
                        .ok_or_else(|| Error::InsufficientData(format!("layer {l} lacks a score for {id:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((*l, v))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    let selection = select_layer(&validation, &scores, ratings, threshold)?;
    Ok(LayerSweepResult {
        selection,
        validation,
        split_seed: seed,
        validation_fraction,
        threshold,
    })
}

/// A `key=value` predicate over manifest metadata.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetaFilter {
    pub key: String,
    pub value: String,
}

impl std::str::FromStr for MetaFilter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (k, v) = s
            .split_once('=')
            .ok_or_else(|| Error::Manifest(format!("filter {s:?} is not key=value")))?;
        Ok(Self {
            key: k.trim().to_owned(),
            value: v.trim().to_owned(),
        })
    }
}

impl MetaFilter {
    pub fn matches(&self, s: &SpeakerEntry) -> bool {
        s.meta(&self.key) == Some(self.value.as_str())
    }
}

/// True when `s` passes every filter.
pub fn passes(filters: &[MetaFilter], s: &SpeakerEntry) -> bool {
    filters.iter().all(|f| f.matches(s))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fm(v: &[f32]) -> FrameMatrix {
        FrameMatrix::new(v.to_vec(), 1, 10.0, 25.0, "t").unwrap()
    }

    fn words(items: &[(&str, &[f32])]) -> WordMap<FrameMatrix> {
        items.iter().map(|(w, v)| (w.to_string(), fm(v))).collect()
    }

    fn ratings(pairs: &[(&str, f64)]) -> RatingsTable {
        RatingsTable::new(pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect(), None).unwrap()
    }

    #[test]
    fn pair_distance_is_mean_over_shared_words() {
        let a = words(&[("x", &[0.0]), ("y", &[0.0]), ("only_a", &[5.0])]);
        let b = words(&[("x", &[0.1]), ("y", &[0.3]), ("only_b", &[9.0])]);
        assert!((speaker_pair_acoustic(&a, &b).unwrap() - 0.2).abs() < 1e-7);
        assert_eq!(speaker_pair_acoustic(&a, &a).unwrap(), 0.0);
        let c = words(&[("z", &[0.0])]);
        assert!(matches!(speaker_pair_acoustic(&a, &c), Err(Error::NoSharedWords)));
        let d: WordMap<FrameMatrix> =
            [("x".to_string(), FrameMatrix::new(vec![0.0; 2], 2, 10.0, 25.0, "t").unwrap())].into();
        assert!(matches!(speaker_pair_acoustic(&a, &d), Err(Error::DimMismatch(1, 2))));
    }

    #[test]
    fn likeness_means_over_references() {
        let t = words(&[("w", &[0.0])]);
        let refs = [words(&[("w", &[0.25])]), words(&[("w", &[0.5])]), words(&[("w", &[0.75])])];
        let rr: Vec<&WordMap<FrameMatrix>> = refs.iter().collect();
        assert!((native_likeness(&t, &rr).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(native_likeness(&t, &[&t]).unwrap(), 0.0);
        assert!(matches!(native_likeness(&t, &[]), Err(Error::EmptyReferenceSet)));
    }

    #[test]
    fn cube_reductions_agree() {
        let ts: Vec<WordMap<FrameMatrix>> = (0..5)
            .map(|i| words(&[("a", &[i as f32]), ("b", &[2.0 * i as f32, 1.0])]))
            .collect();
        let rs: Vec<WordMap<FrameMatrix>> = (0..3).map(|j| words(&[("a", &[j as f32 * 0.5]), ("b", &[1.0])])).collect();
        let tt: Vec<(String, &WordMap<FrameMatrix>)> = ts.iter().enumerate().map(|(i, m)| (format!("t{i}"), m)).collect();
        let rr: Vec<(String, &WordMap<FrameMatrix>)> = rs.iter().enumerate().map(|(i, m)| (format!("r{i}"), m)).collect();
        let cube = WordDistanceCube::acoustic(&tt, &rr).unwrap();
        let likeness = cube.native_likeness();
        let refs: Vec<&WordMap<FrameMatrix>> = rs.iter().collect();
        for (i, t) in ts.iter().enumerate() {
            assert!((likeness[i] - native_likeness(t, &refs).unwrap()).abs() < 1e-12);
        }
        let pairs = cube.pair_table("mfcc");
        for (t, l) in likeness.iter().enumerate() {
            let mean = (0..3).map(|r| pairs.column(r)[t]).sum::<f64>() / 3.0;
            assert_eq!(*l, mean);
        }
    }

    #[test]
    fn minmax() {
        assert_eq!(minmax_scale(&[2.0, 4.0, 6.0]).unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(minmax_scale(&[0.0, 1.0, 1.0]).unwrap(), vec![0.0, 1.0, 1.0]);
        assert!(matches!(minmax_scale(&[3.0, 3.0]), Err(Error::DegenerateRange)));
        assert!(matches!(minmax_scale(&[]), Err(Error::DegenerateRange)));
    }

    #[test]
    fn condition_summary_scales_jointly() {
        let s = scaled_condition_summary(&[
            ("a".into(), vec![1.0, 3.0]),
            ("b".into(), vec![5.0, 5.0, 5.0]),
        ])
        .unwrap();
        assert_eq!(s[0].mean, 0.25);
        assert!((s[0].sd - (0.125f64).sqrt()).abs() < 1e-12);
        assert_eq!((s[1].mean, s[1].sd, s[1].n), (1.0, 0.0, 3));
    }

    #[test]
    fn split_is_seeded_and_sized() {
        let ids: Vec<String> = (0..20).map(|i| format!("s{i:02}")).collect();
        let a = validation_split(&ids, 0.25, 7).unwrap();
        assert_eq!(a.len(), 5);
        assert_eq!(a, validation_split(&ids, 0.25, 7).unwrap());
        let mut rev = ids.clone();
        rev.reverse();
        assert_eq!(a, validation_split(&rev, 0.25, 7).unwrap());
        assert!(a.windows(2).all(|w| w[0] < w[1]));
        assert!(matches!(validation_split(&ids, 0.1, 7), Err(Error::SplitTooSmall(2))));
    }

    #[test]
    fn layer_selection() {
        let ids: Vec<String> = (0..8).map(|i| format!("s{i}")).collect();
        let truth = [0.1, 0.5, 0.2, 0.9, 0.4, 0.7, 0.3, 0.8];
        let r = ratings(&ids.iter().zip(truth).map(|(s, d)| (s.as_str(), 7.0 - 6.0 * d)).collect::<Vec<_>>());
        let noise = vec![0.3, 0.1, 0.9, 0.2, 0.8, 0.4, 0.6, 0.5];
        let scores = BTreeMap::from([(1, noise.clone()), (2, truth.to_vec()), (3, noise)]);
        let sel = select_layer(&ids, &scores, &r, 0.05).unwrap();
        assert_eq!(sel.best_layer, 2);
        assert!((sel.per_layer_r[&2] + 1.0).abs() < 1e-12);
        assert!(sel.tie_set.contains(&2));
        // Identical tables tie.
        assert!(sel.tie_set.contains(&1) == sel.tie_set.contains(&3));
        let one = select_layer(&ids, &BTreeMap::from([(5, truth.to_vec())]), &r, 0.05).unwrap();
        assert_eq!((one.best_layer, one.tie_set), (5, BTreeSet::from([5])));
        let twins = BTreeMap::from([(1, truth.to_vec()), (2, truth.to_vec())]);
        assert_eq!(select_layer(&ids, &twins, &r, 0.05).unwrap().tie_set, BTreeSet::from([1, 2]));
    }

    #[test]
    fn single_reference_summary() {
        let ts: Vec<WordMap<FrameMatrix>> = (0..4).map(|i| words(&[("w", &[i as f32])])).collect();
        let rs: Vec<WordMap<FrameMatrix>> = (0..3).map(|_| words(&[("w", &[-1.0])])).collect();
        let tt: Vec<(String, &WordMap<FrameMatrix>)> = ts.iter().enumerate().map(|(i, m)| (format!("t{i}"), m)).collect();
        let rr: Vec<(String, &WordMap<FrameMatrix>)> = rs.iter().enumerate().map(|(i, m)| (format!("r{i}"), m)).collect();
        let cube = WordDistanceCube::acoustic(&tt, &rr).unwrap();
        let rt = ratings(&[("t0", 6.0), ("t1", 5.5), ("t2", 3.0), ("t3", 2.0)]);
        let s = single_reference_sweep(&cube, &rt).unwrap();
        assert_eq!(s.sd, 0.0);
        assert_eq!(s.per_reference.len(), 3);
        assert_eq!(s.min, s.max);
    }

    #[test]
    fn per_word_skips_missing_words() {
        let ts: Vec<WordMap<FrameMatrix>> = (0..5)
            .map(|i| {
                let mut m = words(&[("good", &[i as f32]), ("noise", &[((i * 3) % 5) as f32])]);
                if i == 0 {
                    m.insert("rare".into(), fm(&[1.0]));
                }
                m
            })
            .collect();
        let rs = [words(&[("good", &[0.0]), ("noise", &[0.0]), ("rare", &[0.0])])];
        let tt: Vec<(String, &WordMap<FrameMatrix>)> = ts.iter().enumerate().map(|(i, m)| (format!("t{i}"), m)).collect();
        let rr: Vec<(String, &WordMap<FrameMatrix>)> = vec![("r".into(), &rs[0])];
        let cube = WordDistanceCube::acoustic(&tt, &rr).unwrap();
        let rt = ratings(&[("t0", 7.0), ("t1", 5.5), ("t2", 4.0), ("t3", 2.5), ("t4", 1.0)]);
        let pw = per_word_correlations(&cube, &rt).unwrap();
        assert!(!pw.per_word.contains_key("rare"));
        assert!(pw.per_word["good"].0.abs() > pw.per_word["noise"].0.abs());
        assert_eq!(pw.per_word["good"].1, 5);
    }

    #[test]
    fn distance_table_round_trip() {
        let t = DistanceTable::new(
            vec!["a".into(), "b".into()],
            vec!["a".into(), "b".into()],
            vec![0.0, 0.25, 0.25, 0.0],
            "mfcc39",
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("d.tsv");
        std::fs::write(&p, t.to_tsv(&["accdist".into()])).unwrap();
        assert_eq!(DistanceTable::read_tsv(&p).unwrap(), t);
        let bad = DistanceTable::new(vec!["a".into(), "b".into()], vec!["a".into(), "b".into()], vec![0.0, 1.0, 2.0, 0.0], "");
        assert!(matches!(bad, Err(Error::InvalidDistanceMatrix(_))));
    }
}
