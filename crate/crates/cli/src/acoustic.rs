use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::Args;
use rayon::prelude::*;

use accdist_core::aggregate::{
    per_word_correlations, scaled_condition_summary, select_layer, single_reference_sweep,
    validation_split, DistanceTable, WordDistanceCube,
};
use accdist_core::dtw::dtw_distance;
use accdist_core::featstore::{read_features, tsv, DatasetManifest, TAG_PLACEHOLDER};
use accdist_core::report::fmt_num;
use accdist_core::signal::MFCC_TAG;
use accdist_core::stats::read_ratings;
use accdist_core::{Error, FrameMatrix, Result};

use crate::output::{borrowed, comment_block, emit, load_words, parse_filters, select, Header};
use crate::OutputArg;

#[derive(Debug, Args)]
pub struct DistArgs {
    /// First feature file (ACFT).
    pub a: PathBuf,
    /// Second feature file (ACFT).
    pub b: PathBuf,
    /// Also list every step of the alignment path.
    #[arg(long)]
    pub trace: bool,
    #[command(flatten)]
    pub out: OutputArg,
}

pub fn dist(a: &DistArgs, seed: u64) -> Result<()> {
    let fa = read_features(&a.a)?;
    let fb = read_features(&a.b)?;
    let t = dtw_distance(&fa, &fb)?;
    let header = Header::new("dist")
        .path("a", &a.a)
        .path("b", &a.b)
        .kv("trace", a.trace)
        .seed(seed);
    let mut text = comment_block(&header);
    if a.trace {
        let _ = writeln!(text, "# normalized_cost={}", fmt_num(t.normalized_cost));
        let _ = writeln!(text, "# total_cost={}", fmt_num(t.total_cost));
        text.push_str("i\tj\tlocal_cost\n");
        for s in &t.steps {
            let _ = writeln!(text, "{}\t{}\t{}", s.i, s.j, fmt_num(s.local_cost));
        }
    } else {
        text.push_str("normalized_cost\ttotal_cost\tsteps\n");
        let _ = writeln!(
            text,
            "{}\t{}\t{}",
            fmt_num(t.normalized_cost),
            fmt_num(t.total_cost),
            t.steps.len()
        );
    }
    emit(a.out.output.as_deref(), &text)
}

/// Manifest, feature tag and target filters.
#[derive(Debug, Args)]
pub struct DatasetArgs {
    /// Dataset manifest (TSV).
    pub manifest: PathBuf,
    /// Feature source tag substituted for {tag} in feature paths.
    #[arg(long = "features", value_name = "TAG", default_value = MFCC_TAG)]
    pub tag: String,
    /// Keep only targets whose metadata column KEY equals VALUE (repeatable).
    #[arg(long = "filter", value_name = "KEY=VALUE")]
    pub filters: Vec<String>,
}

impl DatasetArgs {
    fn header(&self, command: &str) -> Header {
        let mut h = Header::new(command)
            .path("manifest", &self.manifest)
            .kv("features", &self.tag);
        for f in &self.filters {
            h = h.kv("filter", f);
        }
        h
    }

    /// Loads the target and reference word features and their distance cube.
    fn cube(&self) -> Result<WordDistanceCube> {
        let manifest = DatasetManifest::load(&self.manifest)?;
        let filters = parse_filters(&self.filters)?;
        let (targets, refs) = select(&manifest, &filters);
        let tw = load_words(&targets, &self.tag)?;
        let rw = load_words(&refs, &self.tag)?;
        WordDistanceCube::acoustic(&borrowed(&tw), &borrowed(&rw))
    }
}

#[derive(Debug, Args)]
pub struct LikenessArgs {
    #[command(flatten)]
    pub data: DatasetArgs,
    /// Write the target x reference distance matrix instead of per-target means.
    #[arg(long, conflicts_with = "square")]
    pub matrix: bool,
    /// Write the symmetric distance matrix over all selected speakers.
    #[arg(long)]
    pub square: bool,
    #[command(flatten)]
    pub out: OutputArg,
}

/// Symmetric all-pairs table from a cube computed over one speaker list twice.
pub fn square_table(cube: &WordDistanceCube, tag: &str) -> Result<DistanceTable> {
    let pairs = cube.pair_table(tag);
    let n = cube.targets.len();
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                values[i * n + j] = 0.5 * (pairs.get(i, j) + pairs.get(j, i));
            }
        }
    }
    DistanceTable::new(cube.targets.clone(), cube.targets.clone(), values, tag)
}

pub fn likeness(a: &LikenessArgs, seed: u64) -> Result<()> {
    let d = &a.data;
    let header = d
        .header("likeness")
        .kv("matrix", a.matrix)
        .kv("square", a.square)
        .seed(seed);
    let table = if a.square {
        let manifest = DatasetManifest::load(&d.manifest)?;
        let filters = parse_filters(&d.filters)?;
        let (targets, refs) = select(&manifest, &filters);
        let all: Vec<_> = targets.into_iter().chain(refs).collect();
        let words = load_words(&all, &d.tag)?;
        let cube = WordDistanceCube::acoustic(&borrowed(&words), &borrowed(&words))?;
        square_table(&cube, &d.tag)?
    } else {
        let cube = d.cube()?;
        if a.matrix {
            cube.pair_table(&d.tag)
        } else {
            DistanceTable::scalar(cube.targets.clone(), cube.native_likeness(), "native_likeness", &d.tag)?
        }
    };
    emit(a.out.output.as_deref(), &table.to_tsv(&header))
}

fn parse_layers(s: &str) -> std::result::Result<Vec<u32>, String> {
    let mut out = BTreeSet::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let range = part.split_once("..").or_else(|| part.split_once('-'));
        match range {
            Some((lo, hi)) => {
                let lo: u32 = lo.trim().parse().map_err(|_| format!("bad layer {lo:?}"))?;
                let hi: u32 = hi.trim().trim_start_matches('=').parse().map_err(|_| format!("bad layer {hi:?}"))?;
                if lo > hi {
                    return Err(format!("empty layer range {part:?}"));
                }
                out.extend(lo..=hi);
            }
            None => {
                out.insert(part.parse().map_err(|_| format!("bad layer {part:?}"))?);
            }
        }
    }
    if out.is_empty() {
        return Err("no layers given".into());
    }
    Ok(out.into_iter().collect())
}

#[derive(Debug, Args)]
pub struct LayersArgs {
    /// Dataset manifest (TSV) whose feature paths contain {tag}.
    pub manifest: PathBuf,
    /// Layers to compare: a list and/or inclusive ranges, e.g. 1..24 or 0,6,12-18.
    #[arg(long, value_parser = parse_layers)]
    pub layers: std::vec::Vec<u32>,
    /// Feature tag for a layer; the layer number fills the brace placeholder.
    #[arg(long, value_name = "PATTERN", default_value = "layer-{n}")]
    pub tag_pattern: String,
    /// Averaged human ratings (TSV: speaker, rating).
    #[arg(long, value_name = "PATH")]
    pub ratings: PathBuf,
    /// Fraction of target speakers held out for layer selection.
    #[arg(long = "val", value_name = "FRACTION", default_value_t = 0.25)]
    pub validation_fraction: f64,
    /// Layers whose Steiger p-value against the best exceeds this are ties.
    #[arg(long, default_value_t = 0.05)]
    pub threshold: f64,
    /// Keep only targets whose metadata column KEY equals VALUE (repeatable).
    #[arg(long = "filter", value_name = "KEY=VALUE")]
    pub filters: Vec<String>,
    #[command(flatten)]
    pub out: OutputArg,
}

pub fn layers(a: &LayersArgs, seed: u64) -> Result<()> {
    if !(a.threshold > 0.0 && a.threshold < 1.0) {
        return Err(Error::InsufficientData(format!("threshold {} outside (0, 1)", a.threshold)));
    }
    let manifest = DatasetManifest::load(&a.manifest)?;
    let ratings = read_ratings(&a.ratings)?;
    let filters = parse_filters(&a.filters)?;
    let (targets, refs) = select(&manifest, &filters);
    let ids: Vec<String> = targets.iter().map(|s| s.id.clone()).collect();
    let validation = validation_split(&ids, a.validation_fraction, seed)?;
    let keep: BTreeSet<&str> = validation.iter().map(String::as_str).collect();
    let val_targets: Vec<_> = targets.into_iter().filter(|s| keep.contains(s.id.as_str())).collect();

    let mut scores = BTreeMap::new();
    for layer in &a.layers {
        let tag = a.tag_pattern.replace("{n}", &layer.to_string());
        let tw = load_words(&val_targets, &tag)?;
        let rw = load_words(&refs, &tag)?;
        let cube = WordDistanceCube::acoustic(&borrowed(&tw), &borrowed(&rw))?;
        scores.insert(*layer, cube.native_likeness());
    }
    let sel = select_layer(&validation, &scores, &ratings, a.threshold)?;

    let layers: Vec<String> = a.layers.iter().map(u32::to_string).collect();
    let mut h = Header::new("layers")
        .path("manifest", &a.manifest)
        .kv("layers", layers.join(","))
        .kv("tag_pattern", &a.tag_pattern)
        .path("ratings", &a.ratings)
        .kv("val", a.validation_fraction)
        .kv("threshold", a.threshold);
    for f in &a.filters {
        h = h.kv("filter", f);
    }
    let mut text = comment_block(&h.seed(seed));
    let _ = writeln!(text, "# validation={}", validation.join(","));
    let _ = writeln!(text, "# best_layer={}", sel.best_layer);
    let ties: Vec<String> = sel.tie_set.iter().map(u32::to_string).collect();
    let _ = writeln!(text, "# tie_set={}", ties.join(","));
    text.push_str("layer\tr\tz\tp\ttie\n");
    for (l, r) in &sel.per_layer_r {
        let (z, p) = match sel.tests.get(l) {
            Some(t) => (fmt_num(t.z), fmt_num(t.p)),
            None => ("-".into(), "-".into()),
        };
        let _ = writeln!(text, "{l}\t{}\t{z}\t{p}\t{}", fmt_num(*r), sel.tie_set.contains(l));
    }
    emit(a.out.output.as_deref(), &text)
}

#[derive(Debug, Args)]
pub struct PerWordArgs {
    #[command(flatten)]
    pub data: DatasetArgs,
    /// Averaged human ratings (TSV: speaker, rating).
    #[arg(long, value_name = "PATH")]
    pub ratings: PathBuf,
    #[command(flatten)]
    pub out: OutputArg,
}

pub fn per_word(a: &PerWordArgs, seed: u64) -> Result<()> {
    let ratings = read_ratings(&a.ratings)?;
    let cube = a.data.cube()?;
    let pw = per_word_correlations(&cube, &ratings)?;
    let header = a.data.header("per-word").path("ratings", &a.ratings).seed(seed);
    let mut text = comment_block(&header);
    let _ = writeln!(text, "# mean_r={}", fmt_num(pw.mean));
    let _ = writeln!(text, "# sd_r={}", fmt_num(pw.sd));
    text.push_str("word\tr\tn\n");
    for (w, (r, n)) in &pw.per_word {
        let _ = writeln!(text, "{w}\t{}\t{n}", fmt_num(*r));
    }
    emit(a.out.output.as_deref(), &text)
}

#[derive(Debug, Args)]
pub struct SweepRefArgs {
    #[command(flatten)]
    pub data: DatasetArgs,
    /// Averaged human ratings (TSV: speaker, rating).
    #[arg(long, value_name = "PATH")]
    pub ratings: PathBuf,
    /// Also write the correlation obtained with each reference speaker.
    #[arg(long, value_name = "PATH")]
    pub per_reference: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutputArg,
}

pub fn sweep_ref(a: &SweepRefArgs, seed: u64) -> Result<()> {
    let ratings = read_ratings(&a.ratings)?;
    let cube = a.data.cube()?;
    let s = single_reference_sweep(&cube, &ratings)?;
    let header = a.data.header("sweep-ref").path("ratings", &a.ratings).seed(seed);
    let mut text = comment_block(&header);
    text.push_str("features\tmean_r\tsd\tmin_r\tmax_r\treferences\n");
    let _ = writeln!(
        text,
        "{}\t{}\t{}\t{}\t{}\t{}",
        a.data.tag,
        fmt_num(s.mean),
        fmt_num(s.sd),
        fmt_num(s.min),
        fmt_num(s.max),
        s.per_reference.len()
    );
    if let Some(p) = &a.per_reference {
        let mut per = comment_block(&header);
        per.push_str("reference\tr\n");
        for (id, r) in &s.per_reference {
            let _ = writeln!(per, "{id}\t{}", fmt_num(*r));
        }
        emit(Some(p), &per)?;
    }
    emit(a.out.output.as_deref(), &text)
}

#[derive(Debug, Args)]
pub struct LivingArgs {
    /// Recording list (TSV with header: recording_id, condition, features).
    /// Feature paths are relative to this file and may contain {tag}.
    pub recordings: PathBuf,
    /// Recording every other recording is compared with.
    #[arg(long, value_name = "ID")]
    pub anchor: String,
    /// Conditions to report, in order (default: order of first appearance).
    #[arg(long, value_delimiter = ',', value_name = "NAME,...")]
    pub conditions: Vec<String>,
    /// Feature tags to compare, one output column pair each.
    #[arg(long = "features", value_delimiter = ',', value_name = "TAG,...", default_value = MFCC_TAG)]
    pub tags: Vec<String>,
    #[command(flatten)]
    pub out: OutputArg,
}

struct Recording {
    id: String,
    condition: Option<String>,
    features: String,
}

fn read_recordings(path: &Path) -> Result<Vec<Recording>> {
    let base = path.parent().unwrap_or(Path::new("."));
    let records = tsv::read_records(path)?;
    let (header, rows) = records
        .split_first()
        .ok_or_else(|| Error::parse(path, 1, "empty recording list"))?;
    let col = |name: &str| {
        header
            .fields
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::parse(path, header.line, format!("missing column {name:?}")))
    };
    let (ci, cc, cf) = (col("recording_id")?, col("condition")?, col("features")?);
    let mut seen = BTreeSet::new();
    rows.iter()
        .map(|rec| {
            let get = |i: usize| rec.fields.get(i).map(|s| s.trim()).unwrap_or("");
            let id = get(ci).to_owned();
            if id.is_empty() || !seen.insert(id.clone()) {
                return Err(Error::parse(path, rec.line, format!("missing or duplicate id {id:?}")));
            }
            let condition = Some(get(cc)).filter(|c| !c.is_empty() && *c != "-").map(str::to_owned);
            let f = Path::new(get(cf));
            let features = if f.is_absolute() { f.to_path_buf() } else { base.join(f) };
            Ok(Recording {
                id,
                condition,
                features: features.to_string_lossy().into_owned(),
            })
        })
        .collect()
}

fn load_recording(r: &Recording, tag: &str) -> Result<FrameMatrix> {
    read_features(r.features.replace(TAG_PLACEHOLDER, tag))
}

pub fn living(a: &LivingArgs, seed: u64) -> Result<()> {
    let recs = read_recordings(&a.recordings)?;
    let anchor = recs
        .iter()
        .find(|r| r.id == a.anchor)
        .ok_or_else(|| Error::InsufficientData(format!("anchor {:?} not in the recording list", a.anchor)))?;
    let mut order: Vec<String> = a.conditions.clone();
    if order.is_empty() {
        for r in &recs {
            if let Some(c) = &r.condition {
                if !order.contains(c) {
                    order.push(c.clone());
                }
            }
        }
    }
    let mut groups: Vec<(String, Vec<&Recording>)> = order.iter().map(|c| (c.clone(), Vec::new())).collect();
    for r in recs.iter().filter(|r| r.id != anchor.id) {
        if let Some(g) = groups.iter_mut().find(|(c, _)| Some(c) == r.condition.as_ref()) {
            g.1.push(r);
        }
    }

    let mut columns = Vec::with_capacity(a.tags.len());
    for tag in &a.tags {
        let anchor_fm = load_recording(anchor, tag)?;
        let per_condition = groups
            .iter()
            .map(|(c, rs)| {
                let d = rs
                    .par_iter()
                    .map(|r| Ok(dtw_distance(&anchor_fm, &load_recording(r, tag)?)?.normalized_cost))
                    .collect::<Result<Vec<f64>>>()?;
                Ok((c.clone(), d))
            })
            .collect::<Result<Vec<_>>>()?;
        columns.push(scaled_condition_summary(&per_condition)?);
    }

    let header = Header::new("living")
        .path("recordings", &a.recordings)
        .kv("anchor", &a.anchor)
        .kv("conditions", order.join(","))
        .kv("features", a.tags.join(","))
        .seed(seed);
    let mut text = comment_block(&header);
    text.push_str("condition\tn");
    for tag in &a.tags {
        let _ = write!(text, "\t{tag}_mean\t{tag}_sd");
    }
    text.push('\n');
    for (i, (c, rs)) in groups.iter().enumerate() {
        let _ = write!(text, "{c}\t{}", rs.len());
        for col in &columns {
            let _ = write!(text, "\t{}\t{}", fmt_num(col[i].mean), fmt_num(col[i].sd));
        }
        text.push('\n');
    }
    emit(a.out.output.as_deref(), &text)
}
