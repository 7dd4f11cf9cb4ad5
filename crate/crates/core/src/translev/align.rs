use std::collections::{BTreeMap, HashMap};
use std::fmt;

use super::costs::{SegmentCostTable, GAP_TOKEN};
use super::Transcription;
use crate::error::{Error, Result};

/// One column of an alignment; `None` is a gap.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedPair {
    pub left: Option<String>,
    pub right: Option<String>,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevAlignment {
    pub pairs: Vec<AlignedPair>,
    pub total: f64,
    /// `total` divided by the number of alignment columns.
    pub normalized: f64,
}

impl fmt::Display for LevAlignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let col = |s: &Option<String>| s.clone().unwrap_or_else(|| GAP_TOKEN.to_owned());
        let left: Vec<String> = self.pairs.iter().map(|p| col(&p.left)).collect();
        let right: Vec<String> = self.pairs.iter().map(|p| col(&p.right)).collect();
        let cost: Vec<String> = self.pairs.iter().map(|p| format!("{}", p.cost)).collect();
        writeln!(f, "{}", left.join("\t"))?;
        writeln!(f, "{}", right.join("\t"))?;
        write!(f, "{}", cost.join("\t"))
    }
}

#[derive(Clone, Copy)]
enum Op {
    Start,
    Substitute,
    Delete,
    Insert,
}

/// Encoded alignment column: left and right symbol ids, `None` for gaps.
pub(crate) type IdPair = (Option<usize>, Option<usize>);

/// Core dynamic program over encoded symbols.
///
/// Ties prefer substitution, then deletion, then insertion. Path costs are
/// accumulated from the start of the alignment so the summation order matches
/// a left-to-right walk.
pub(crate) fn align_ids(a: &[usize], b: &[usize], table: &SegmentCostTable) -> (f64, Vec<IdPair>) {
    let gap = table.gap_id();
    let (n, m) = (a.len(), b.len());
    let w = m + 1;
    let mut acc = vec![0.0; (n + 1) * w];
    let mut ops = vec![Op::Start; (n + 1) * w];
    for i in 1..=n {
        acc[i * w] = acc[(i - 1) * w] + table.cost_ids(a[i - 1], gap);
        ops[i * w] = Op::Delete;
    }
    for j in 1..=m {
        acc[j] = acc[j - 1] + table.cost_ids(gap, b[j - 1]);
        ops[j] = Op::Insert;
    }
    for i in 1..=n {
        for j in 1..=m {
            let sub = acc[(i - 1) * w + j - 1] + table.cost_ids(a[i - 1], b[j - 1]);
            let del = acc[(i - 1) * w + j] + table.cost_ids(a[i - 1], gap);
            let ins = acc[i * w + j - 1] + table.cost_ids(gap, b[j - 1]);
            let (best, op) = if sub <= del && sub <= ins {
                (sub, Op::Substitute)
            } else if del <= ins {
                (del, Op::Delete)
            } else {
                (ins, Op::Insert)
            };
            acc[i * w + j] = best;
            ops[i * w + j] = op;
        }
    }

    let mut pairs = Vec::with_capacity(n + m);
    let (mut i, mut j) = (n, m);
    loop {
        match ops[i * w + j] {
            Op::Start => break,
            Op::Substitute => {
                pairs.push((Some(a[i - 1]), Some(b[j - 1])));
                i -= 1;
                j -= 1;
            }
            Op::Delete => {
                pairs.push((Some(a[i - 1]), None));
                i -= 1;
            }
            Op::Insert => {
                pairs.push((None, Some(b[j - 1])));
                j -= 1;
            }
        }
    }
    pairs.reverse();
    (acc[n * w + m], pairs)
}

/// Maps segments to table ids; out-of-inventory segments get fresh ids past
/// the gap so that identical unknown segments still match for free.
struct Encoder<'t> {
    table: &'t SegmentCostTable,
    extra: HashMap<String, usize>,
}

impl<'t> Encoder<'t> {
    fn new(table: &'t SegmentCostTable) -> Self {
        Self {
            table,
            extra: HashMap::new(),
        }
    }

    fn encode(&mut self, t: &Transcription) -> Vec<usize> {
        t.segments()
            .iter()
            .map(|s| match self.table.id(s) {
                Some(id) => id,
                None => {
                    let next = self.table.gap_id() + 1 + self.extra.len();
                    *self.extra.entry(s.clone()).or_insert(next)
                }
            })
            .collect()
    }
}

/// Minimum-cost alignment of two transcriptions under `costs`.
pub fn levenshtein_align(
    a: &Transcription,
    b: &Transcription,
    costs: &SegmentCostTable,
) -> Result<LevAlignment> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyTranscription);
    }
    let mut enc = Encoder::new(costs);
    let ia = enc.encode(a);
    let ib = enc.encode(b);
    let (total, id_pairs) = align_ids(&ia, &ib, costs);

    let gap = costs.gap_id();
    let (mut x, mut y) = (0, 0);
    let pairs: Vec<AlignedPair> = id_pairs
        .iter()
        .map(|&(l, r)| {
            let left = l.map(|_| {
                x += 1;
                a.segments()[x - 1].clone()
            });
            let right = r.map(|_| {
                y += 1;
                b.segments()[y - 1].clone()
            });
            AlignedPair {
                left,
                right,
                cost: costs.cost_ids(l.unwrap_or(gap), r.unwrap_or(gap)),
            }
        })
        .collect();
    Ok(LevAlignment {
        normalized: total / pairs.len() as f64,
        total,
        pairs,
    })
}

/// Mean normalized word distance over the words both speakers pronounced.
pub fn speaker_pair_lev(
    a: &BTreeMap<String, Transcription>,
    b: &BTreeMap<String, Transcription>,
    costs: &SegmentCostTable,
) -> Result<f64> {
    let mut sum = 0.0;
    let mut n = 0usize;
    for (word, ta) in a {
        if let Some(tb) = b.get(word) {
            sum += levenshtein_align(ta, tb, costs)?.normalized;
            n += 1;
        }
    }
    if n == 0 {
        return Err(Error::NoSharedWords);
    }
    Ok(sum / n as f64)
}
