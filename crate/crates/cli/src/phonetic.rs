use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::Args;

use accdist_core::aggregate::{DistanceTable, WordDistanceCube};
use accdist_core::featstore::DatasetManifest;
use accdist_core::translev::{
    format_cost_table, induce_pmi_costs, read_cost_table, InductionConfig, SegmentCostTable, Transcription,
};
use accdist_core::Result;

use crate::output::{borrowed, emit, load_transcriptions, parse_filters, select, Header};
use crate::OutputArg;

#[derive(Debug, Args)]
pub struct LevDistArgs {
    /// Dataset manifest (TSV) with a transcription column.
    pub manifest: PathBuf,
    /// Segment cost table (default: unit costs).
    #[arg(long, value_name = "PATH")]
    pub costs: Option<PathBuf>,
    /// Write the target x reference distance matrix instead of per-target means.
    #[arg(long, conflicts_with = "square")]
    pub matrix: bool,
    /// Write the symmetric distance matrix over all selected speakers.
    #[arg(long)]
    pub square: bool,
    /// Keep only targets whose metadata column KEY equals VALUE (repeatable).
    #[arg(long = "filter", value_name = "KEY=VALUE")]
    pub filters: Vec<String>,
    #[command(flatten)]
    pub out: OutputArg,
}

pub fn lev_dist(a: &LevDistArgs, seed: u64) -> Result<()> {
    let costs = match &a.costs {
        Some(p) => read_cost_table(p)?,
        None => SegmentCostTable::uniform(),
    };
    let manifest = DatasetManifest::load(&a.manifest)?;
    let filters = parse_filters(&a.filters)?;
    let (targets, refs) = select(&manifest, &filters);
    let tag = if a.costs.is_some() { "pmi-lev" } else { "lev" };

    let table = if a.square {
        let all: Vec<_> = targets.into_iter().chain(refs).collect();
        let tr = load_transcriptions(&all)?;
        let cube = WordDistanceCube::phonetic(&borrowed(&tr), &borrowed(&tr), &costs)?;
        crate::acoustic::square_table(&cube, tag)?
    } else {
        let tt = load_transcriptions(&targets)?;
        let rt = load_transcriptions(&refs)?;
        let cube = WordDistanceCube::phonetic(&borrowed(&tt), &borrowed(&rt), &costs)?;
        if a.matrix {
            cube.pair_table(tag)
        } else {
            DistanceTable::scalar(cube.targets.clone(), cube.native_likeness(), "native_likeness", tag)?
        }
    };

    let mut h = Header::new("lev-dist").path("manifest", &a.manifest);
    h = match &a.costs {
        Some(p) => h.path("costs", p),
        None => h.kv("costs", "uniform"),
    };
    h = h.kv("matrix", a.matrix).kv("square", a.square);
    for f in &a.filters {
        h = h.kv("filter", f);
    }
    emit(a.out.output.as_deref(), &table.to_tsv(&h.seed(seed)))
}

#[derive(Debug, Args)]
pub struct PmiTrainArgs {
    /// Dataset manifest (TSV) with a transcription column.
    pub manifest: PathBuf,
    /// Maximum number of align-and-recount rounds.
    #[arg(long, default_value_t = 10)]
    pub max_iter: usize,
    /// Pseudo-count added to every segment pair before computing PMI.
    #[arg(long, default_value_t = 0.5)]
    pub smoothing: f64,
    #[command(flatten)]
    pub out: OutputArg,
}

pub fn pmi_train(a: &PmiTrainArgs, seed: u64) -> Result<()> {
    let manifest = DatasetManifest::load(&a.manifest)?;
    let speakers: Vec<_> = manifest.speakers.iter().filter(|s| s.transcription.is_some()).collect();
    let loaded = load_transcriptions(&speakers)?;
    let mut groups: BTreeMap<&str, Vec<Transcription>> = BTreeMap::new();
    for (_, words) in &loaded {
        for (w, t) in words {
            groups.entry(w.as_str()).or_default().push(t.clone());
        }
    }
    let corpus: Vec<Vec<Transcription>> = groups.into_values().collect();
    let config = InductionConfig {
        max_iter: a.max_iter,
        smoothing: a.smoothing,
    };
    let table = induce_pmi_costs(&corpus, &config)?;
    let header = Header::new("pmi-train")
        .path("manifest", &a.manifest)
        .kv("max_iter", a.max_iter)
        .kv("smoothing", a.smoothing)
        .seed(seed);
    emit(a.out.output.as_deref(), &format_cost_table(&table, &header))
}
