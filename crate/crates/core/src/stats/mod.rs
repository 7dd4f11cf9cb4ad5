//! Correlation, dependent-correlation tests, rater consistency, regression and
//! classical scaling, plus the rating tables they are evaluated against.

mod alpha;
mod correlation;
mod mds;
mod ols;

pub use alpha::cronbach_alpha;
pub use correlation::{normal_two_sided_p, pearson, steiger_z, SteigerTest};
pub use mds::{classical_mds, distance_matrix, MdsResult};
pub use ols::{ols_regress, Coefficient, RegressionFit, INTERCEPT};

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use crate::error::{Error, Result};
use crate::featstore::tsv;

/// Raters x items scores with missing cells.
#[derive(Debug, Clone, PartialEq)]
pub struct RawRatings {
    pub raters: Vec<String>,
    pub items: Vec<String>,
    pub scores: Vec<Vec<Option<f64>>>,
}

impl RawRatings {
    pub fn cronbach_alpha(&self) -> Result<f64> {
        cronbach_alpha(&self.scores)
    }

    /// Mean over the available scores of every item.
    pub fn item_means(&self) -> Result<BTreeMap<String, f64>> {
        self.items
            .iter()
            .enumerate()
            .map(|(j, item)| {
                let vals: Vec<f64> = self.scores.iter().filter_map(|r| r[j]).collect();
                if vals.is_empty() {
                    return Err(Error::MissingRating(item.clone()));
                }
                Ok((item.clone(), vals.iter().sum::<f64>() / vals.len() as f64))
            })
            .collect()
    }
}

/// Averaged human scores per speaker.
#[derive(Debug, Clone, PartialEq)]
pub struct RatingsTable {
    pub per_speaker_mean: BTreeMap<String, f64>,
    pub raw: Option<RawRatings>,
    pub scale: Option<(f64, f64)>,
}

impl RatingsTable {
    pub fn new(per_speaker_mean: BTreeMap<String, f64>, scale: Option<(f64, f64)>) -> Result<Self> {
        if let Some((lo, hi)) = scale {
            if !(lo < hi) {
                return Err(Error::InsufficientData(format!("bad rating scale {lo},{hi}")));
            }
            if let Some((s, v)) = per_speaker_mean.iter().find(|(_, v)| **v < lo || **v > hi) {
                return Err(Error::InsufficientData(format!(
                    "rating {v} for {s:?} outside scale {lo},{hi}"
                )));
            }
        }
        if let Some((s, _)) = per_speaker_mean.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InsufficientData(format!("non-finite rating for {s:?}")));
        }
        Ok(Self {
            per_speaker_mean,
            raw: None,
            scale,
        })
    }

    /// Averages a raw matrix whose items are speaker ids.
    pub fn from_raw(raw: RawRatings, scale: Option<(f64, f64)>) -> Result<Self> {
        let mut table = Self::new(raw.item_means()?, scale)?;
        table.raw = Some(raw);
        Ok(table)
    }

    pub fn get(&self, speaker: &str) -> Result<f64> {
        self.per_speaker_mean
            .get(speaker)
            .copied()
            .ok_or_else(|| Error::MissingRating(speaker.to_owned()))
    }

    /// Ratings for `speakers` in order.
    pub fn values_for<S: AsRef<str>>(&self, speakers: &[S]) -> Result<Vec<f64>> {
        speakers.iter().map(|s| self.get(s.as_ref())).collect()
    }
}

fn parse_scale(path: &Path, text: &str) -> Result<Option<(f64, f64)>> {
    for (n, line) in text.lines().enumerate() {
        let Some(c) = line.trim_start().strip_prefix('#') else {
            continue;
        };
        if let Some(v) = c.trim().strip_prefix("scale=") {
            let bad = || Error::parse(path, n + 1, format!("bad scale {v:?}"));
            let (lo, hi) = v.split_once(',').ok_or_else(bad)?;
            let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
            let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
            return Ok(Some((lo, hi)));
        }
    }
    Ok(None)
}

/// Reads `speaker<TAB>rating` lines. A first row whose rating column is not a
/// number is taken as a header; `# scale=min,max` declares the rating scale.
pub fn read_ratings(path: impl AsRef<Path>) -> Result<RatingsTable> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let scale = parse_scale(path, &text)?;
    let mut means = BTreeMap::new();
    for (i, rec) in tsv::parse_records(&text).iter().enumerate() {
        if rec.fields.len() < 2 {
            return Err(Error::parse(path, rec.line, "expected speaker and rating"));
        }
        if i == 0 && rec.fields[1].trim().parse::<f64>().is_err() {
            continue;
        }
        let v = tsv::parse_f64(path, rec, 1, "rating")?;
        let id = rec.fields[0].trim().to_owned();
        if means.insert(id.clone(), v).is_some() {
            return Err(Error::parse(path, rec.line, format!("duplicate speaker {id:?}")));
        }
    }
    RatingsTable::new(means, scale).map_err(|e| match e {
        Error::InsufficientData(msg) => Error::parse(path, 0, msg),
        other => other,
    })
}

fn is_missing(cell: &str) -> bool {
    matches!(cell.trim(), "" | "NA" | "-")
}

/// Reads a raters x items matrix: header `rater<TAB>item...`, one row per rater.
/// Empty, `NA` and `-` cells are missing.
pub fn read_raw_ratings(path: impl AsRef<Path>) -> Result<RatingsTable> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let scale = parse_scale(path, &text)?;
    let records = tsv::parse_records(&text);
    let (header, rows) = records
        .split_first()
        .ok_or_else(|| Error::parse(path, 1, "empty rating matrix"))?;
    let items: Vec<String> = header.fields[1..].iter().map(|s| s.trim().to_owned()).collect();
    if items.iter().collect::<BTreeSet<_>>().len() != items.len() {
        return Err(Error::parse(path, header.line, "duplicate item label"));
    }
    let mut raters = Vec::with_capacity(rows.len());
    let mut scores = Vec::with_capacity(rows.len());
    for rec in rows {
        if rec.fields.len() != items.len() + 1 {
            return Err(Error::parse(
                path,
                rec.line,
                format!("expected {} columns, found {}", items.len() + 1, rec.fields.len()),
            ));
        }
        raters.push(rec.fields[0].trim().to_owned());
        let row = (1..rec.fields.len())
            .map(|j| {
                if is_missing(&rec.fields[j]) {
                    Ok(None)
                } else {
                    tsv::parse_f64(path, rec, j, "score").map(Some)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        scores.push(row);
    }
    if raters.iter().collect::<BTreeSet<_>>().len() != raters.len() {
        return Err(Error::parse(path, 0, "duplicate rater label"));
    }
    RatingsTable::from_raw(RawRatings { raters, items, scores }, scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratings_file_with_header_and_scale() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.tsv");
        std::fs::write(&p, "# scale=1,7\nspeaker\trating\ns1\t3.5\ns2\t6\n").unwrap();
        let r = read_ratings(&p).unwrap();
        assert_eq!(r.scale, Some((1.0, 7.0)));
        assert_eq!(r.get("s2").unwrap(), 6.0);
        assert!(matches!(r.get("s9"), Err(Error::MissingRating(_))));
        std::fs::write(&p, "# scale=1,7\ns1\t8\n").unwrap();
        assert!(read_ratings(&p).is_err());
    }

    #[test]
    fn raw_matrix_means_and_alpha() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("raw.tsv");
        std::fs::write(
            &p,
            "rater\ts1\ts2\ts3\nr1\t1\t2\t3\nr2\t2\t3\t3\nr3\t3\t3\t4\nr4\tNA\t\t-\n",
        )
        .unwrap();
        let t = read_raw_ratings(&p).unwrap();
        assert_eq!(t.get("s1").unwrap(), 2.0);
        assert!((t.get("s2").unwrap() - 8.0 / 3.0).abs() < 1e-12);
        let alpha = t.raw.as_ref().unwrap().cronbach_alpha().unwrap();
        assert!((alpha - 0.875).abs() < 1e-12);
    }
}
