use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, CommandFactory};

use accdist_core::aggregate::DistanceTable;
use accdist_core::report::fmt_num;
use accdist_core::stats::{classical_mds, ols_regress, pearson, read_ratings, steiger_z};
use accdist_core::{Error, Result};

use crate::output::{comment_block, emit, read_scores, Header};
use crate::{Cli, OutputArg};

#[derive(Debug, Args)]
pub struct CorrArgs {
    /// Speaker scores (TSV: id, value; first value column is used).
    pub scores: PathBuf,
    /// Averaged human ratings (TSV: speaker, rating).
    pub ratings: PathBuf,
    #[command(flatten)]
    pub out: OutputArg,
}

pub fn corr(a: &CorrArgs, seed: u64) -> Result<()> {
    let scores = read_scores(&a.scores)?;
    let ratings = read_ratings(&a.ratings)?;
    let ids: Vec<&String> = scores.keys().collect();
    let x: Vec<f64> = scores.values().copied().collect();
    let y = ratings.values_for(&ids)?;
    let r = pearson(&x, &y)?;
    let header = Header::new("corr")
        .path("scores", &a.scores)
        .path("ratings", &a.ratings)
        .seed(seed);
    let mut text = comment_block(&header);
    let _ = writeln!(text, "r\tn\n{}\t{}", fmt_num(r), x.len());
    emit(a.out.output.as_deref(), &text)
}

#[derive(Debug, Args)]
pub struct SteigerArgs {
    /// Either four numbers R_JK R_JH R_KH N, or nothing when the file options are used.
    #[arg(allow_negative_numbers = true, num_args = 0..=4, value_name = "VALUE")]
    pub values: Vec<String>,
    /// Scores of the first method (TSV: id, value).
    #[arg(long, value_name = "PATH", requires_all = ["b", "ratings"])]
    pub a: Option<PathBuf>,
    /// Scores of the second method (TSV: id, value).
    #[arg(long, value_name = "PATH", requires_all = ["a", "ratings"])]
    pub b: Option<PathBuf>,
    /// Averaged human ratings shared by both correlations.
    #[arg(long, value_name = "PATH", requires_all = ["a", "b"])]
    pub ratings: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutputArg,
}

fn usage_error(msg: &str) -> ! {
    Cli::command()
        .error(clap::error::ErrorKind::ArgumentConflict, msg)
        .exit()
}

pub fn steiger(a: &SteigerArgs, seed: u64) -> Result<()> {
    let mut h = Header::new("steiger");
    let (r_jk, r_jh, r_kh, n) = match (&a.a, &a.b, &a.ratings) {
        (Some(pa), Some(pb), Some(pr)) => {
            if !a.values.is_empty() {
                usage_error("give either four values or --a/--b/--ratings, not both");
            }
            let sa = read_scores(pa)?;
            let sb = read_scores(pb)?;
            let ratings = read_ratings(pr)?;
            let ids: Vec<&String> = sa.keys().filter(|k| sb.contains_key(*k)).collect();
            let xa: Vec<f64> = ids.iter().map(|k| sa[*k]).collect();
            let xb: Vec<f64> = ids.iter().map(|k| sb[*k]).collect();
            let y = ratings.values_for(&ids)?;
            h = h.path("a", pa).path("b", pb).path("ratings", pr);
            (pearson(&xa, &y)?, pearson(&xb, &y)?, pearson(&xa, &xb)?, ids.len())
        }
        _ => {
            if a.values.len() != 4 {
                usage_error("expected R_JK R_JH R_KH N or --a/--b/--ratings");
            }
            let num = |i: usize| -> f64 {
                a.values[i]
                    .parse()
                    .unwrap_or_else(|_| usage_error(&format!("not a number: {:?}", a.values[i])))
            };
            let n: usize = a.values[3]
                .parse()
                .unwrap_or_else(|_| usage_error(&format!("not a count: {:?}", a.values[3])));
            h = h.kv("values", a.values.join(","));
            (num(0), num(1), num(2), n)
        }
    };
    let t = steiger_z(r_jk, r_jh, r_kh, n)?;
    let mut text = comment_block(&h.seed(seed));
    text.push_str("r_jk\tr_jh\tr_kh\tn\tz\tp\n");
    let _ = writeln!(
        text,
        "{}\t{}\t{}\t{n}\t{}\t{}",
        fmt_num(r_jk),
        fmt_num(r_jh),
        fmt_num(r_kh),
        fmt_num(t.z),
        fmt_num(t.p)
    );
    emit(a.out.output.as_deref(), &text)
}

fn parse_predictor(s: &str) -> std::result::Result<(String, PathBuf), String> {
    let (name, path) = s.split_once('=').ok_or_else(|| format!("expected NAME=PATH, got {s:?}"))?;
    if name.is_empty() || path.is_empty() {
        return Err(format!("expected NAME=PATH, got {s:?}"));
    }
    Ok((name.to_owned(), PathBuf::from(path)))
}

#[derive(Debug, Args)]
pub struct RegressArgs {
    /// Averaged human ratings: the response variable.
    #[arg(long, value_name = "PATH")]
    pub ratings: PathBuf,
    /// Predictor score table (repeatable), e.g. --predictor LD=lev.tsv.
    #[arg(long = "predictor", value_name = "NAME=PATH", value_parser = parse_predictor, required = true)]
    pub predictors: Vec<(String, PathBuf)>,
    #[command(flatten)]
    pub out: OutputArg,
}

pub fn regress(a: &RegressArgs, seed: u64) -> Result<()> {
    let ratings = read_ratings(&a.ratings)?;
    let tables: Vec<BTreeMap<String, f64>> = a
        .predictors
        .iter()
        .map(|(_, p)| read_scores(p))
        .collect::<Result<_>>()?;
    let ids: BTreeSet<&String> = tables[0]
        .keys()
        .filter(|k| tables.iter().all(|t| t.contains_key(*k)))
        .collect();
    let ids: Vec<&String> = ids.into_iter().collect();
    let x: Vec<Vec<f64>> = ids.iter().map(|id| tables.iter().map(|t| t[*id]).collect()).collect();
    let y = ratings.values_for(&ids)?;
    let names: Vec<String> = a.predictors.iter().map(|(n, _)| n.clone()).collect();
    let fit = ols_regress(&x, &y, &names)?;
    let mut h = Header::new("regress").path("ratings", &a.ratings);
    for (n, p) in &a.predictors {
        h = h.kv("predictor", format!("{n}={}", p.display()));
    }
    let text = comment_block(&h.seed(seed)) + &fit.to_tsv();
    emit(a.out.output.as_deref(), &text)
}

#[derive(Debug, Args)]
pub struct MdsArgs {
    /// Square symmetric distance table (TSV), e.g. from `likeness --square`.
    pub distances: PathBuf,
    /// Number of dimensions.
    #[arg(short = 'k', long, default_value_t = 2)]
    pub dims: usize,
    #[command(flatten)]
    pub out: OutputArg,
}

pub fn mds(a: &MdsArgs, seed: u64) -> Result<()> {
    let table = DistanceTable::read_tsv(&a.distances)?;
    if table.rows != table.cols {
        return Err(Error::InvalidDistanceMatrix("row and column labels differ".into()));
    }
    let m = classical_mds(&table.to_nested(), a.dims)?;
    let header = Header::new("mds")
        .path("distances", &a.distances)
        .kv("k", a.dims)
        .seed(seed);
    let mut text = comment_block(&header);
    let _ = writeln!(text, "# explained_variance={}", fmt_num(m.explained_variance));
    let eig: Vec<String> = m.eigenvalues.iter().map(|v| fmt_num(*v)).collect();
    let _ = writeln!(text, "# eigenvalues={}", eig.join(","));
    text.push_str("id");
    for d in 1..=a.dims {
        let _ = write!(text, "\tdim{d}");
    }
    text.push('\n');
    for (id, row) in table.rows.iter().zip(&m.coordinates) {
        text.push_str(id);
        for v in row {
            let _ = write!(text, "\t{}", fmt_num(*v));
        }
        text.push('\n');
    }
    emit(a.out.output.as_deref(), &text)
}
