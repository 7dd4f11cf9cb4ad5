use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Subcommand};

use accdist_core::dtw::{dtw_distance, frame_profile};
use accdist_core::featstore::{read_features, tsv};
use accdist_core::report::{emit_mds_map, emit_profile_svg, ProfilePlotSpec};
use accdist_core::{Error, Result};

use crate::output::Header;

#[derive(Debug, Subcommand)]
pub enum VizCommand {
    /// Per-frame distance profile of the first file aligned to the second.
    Pair(PairArgs),
    /// Map of MDS coordinates, optionally placed at geographic positions.
    Mds(MapArgs),
}

#[derive(Debug, Args)]
pub struct PairArgs {
    /// Feature file whose frames form the horizontal axis (ACFT).
    pub a: PathBuf,
    /// Feature file it is compared with (ACFT).
    pub b: PathBuf,
    /// Moving-average window in frames (odd).
    #[arg(long, default_value_t = 9)]
    pub window: usize,
    /// Output SVG; the CSV twin is written next to it.
    #[arg(short, long, value_name = "PATH")]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct MapArgs {
    /// Coordinates (TSV: id, dim1..dimk) as written by `accdist mds`.
    pub coords: PathBuf,
    /// Positions to draw each id at (TSV: id, x, y).
    #[arg(long, value_name = "PATH")]
    pub geo: Option<PathBuf>,
    /// Output SVG; the CSV twin is written next to it.
    #[arg(short, long, value_name = "PATH")]
    pub output: PathBuf,
}

pub fn run(cmd: &VizCommand, seed: u64) -> Result<()> {
    match cmd {
        VizCommand::Pair(a) => pair(a, seed),
        VizCommand::Mds(a) => map(a, seed),
    }
}

fn pair(a: &PairArgs, seed: u64) -> Result<()> {
    let fa = read_features(&a.a)?;
    let fb = read_features(&a.b)?;
    let trace = dtw_distance(&fa, &fb)?;
    let profile = frame_profile(&trace, a.window)?;
    let spec = ProfilePlotSpec::from_profile(&profile, &format!("frame ({})", fa.source_tag()), "distance");
    let header = Header::new("viz pair")
        .path("a", &a.a)
        .path("b", &a.b)
        .kv("window", a.window)
        .seed(seed);
    emit_profile_svg(&spec, &a.output, &header)?;
    Ok(())
}

/// Reads `id<TAB>v1<TAB>v2...` rows after a header row.
fn read_numeric_table(path: &Path) -> Result<Vec<(String, Vec<f64>)>> {
    let records = tsv::read_records(path)?;
    let Some((_, rows)) = records.split_first() else {
        return Err(Error::parse(path, 1, "empty table"));
    };
    rows.iter()
        .map(|rec| {
            let vals = (1..rec.fields.len())
                .map(|j| tsv::parse_f64(path, rec, j, "value"))
                .collect::<Result<Vec<_>>>()?;
            Ok((rec.fields[0].trim().to_owned(), vals))
        })
        .collect()
}

fn map(a: &MapArgs, seed: u64) -> Result<()> {
    let table = read_numeric_table(&a.coords)?;
    let labels: Vec<String> = table.iter().map(|(id, _)| id.clone()).collect();
    let coords: Vec<Vec<f64>> = table.into_iter().map(|(_, v)| v).collect();
    let geo = match &a.geo {
        Some(p) => {
            let places: BTreeMap<String, Vec<f64>> = read_numeric_table(p)?.into_iter().collect();
            let g = labels
                .iter()
                .map(|id| match places.get(id).map(Vec::as_slice) {
                    Some([x, y, ..]) => Ok((*x, *y)),
                    _ => Err(Error::parse(p, 0, format!("no position for {id:?}"))),
                })
                .collect::<Result<Vec<_>>>()?;
            Some(g)
        }
        None => None,
    };
    let mut h = Header::new("viz mds").path("coords", &a.coords);
    if let Some(p) = &a.geo {
        h = h.path("geo", p);
    }
    emit_mds_map(&coords, &labels, geo.as_deref(), &a.output, &h.seed(seed))?;
    Ok(())
}
