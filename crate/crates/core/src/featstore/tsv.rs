use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};

/// A non-comment, non-blank TSV line with its 1-based line number.
#[derive(Debug, Clone)]
pub struct Record {
    pub line: usize,
    pub fields: Vec<String>,
}

/// Reads a UTF-8 TSV file, skipping blank lines and `#` comments.
pub fn read_records(path: &Path) -> Result<Vec<Record>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_records(&text))
}

pub fn parse_records(text: &str) -> Vec<Record> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| Record {
            line: i + 1,
            fields: l.trim_end_matches('\r').split('\t').map(str::to_owned).collect(),
        })
        .collect()
}

pub fn parse_f64(path: &Path, rec: &Record, idx: usize, what: &str) -> Result<f64> {
    let raw = rec
        .fields
        .get(idx)
        .ok_or_else(|| Error::parse(path, rec.line, format!("missing {what} column")))?;
    let v: f64 = raw
        .trim()
        .parse()
        .map_err(|_| Error::parse(path, rec.line, format!("{what} {raw:?} is not a number")))?;
    if !v.is_finite() {
        return Err(Error::parse(path, rec.line, format!("{what} is not finite")));
    }
    Ok(v)
}

/// Gives repeated labels a `#n` suffix (second occurrence of `her` becomes
/// `her#2`) so every occurrence of a word keeps its own key.
#[derive(Debug, Default)]
pub struct OccurrenceLabeler {
    seen: HashMap<String, usize>,
}

impl OccurrenceLabeler {
    pub fn label(&mut self, word: &str) -> String {
        let n = self.seen.entry(word.to_owned()).or_insert(0);
        *n += 1;
        if *n == 1 {
            word.to_owned()
        } else {
            format!("{word}#{n}")
        }
    }
}
