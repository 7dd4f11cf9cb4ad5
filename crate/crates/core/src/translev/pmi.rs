//! Segment-cost induction from pointwise mutual information.
//!
//! Starting from an initial table (unit costs by default), every pair of
//! variants of the same word is aligned and the aligned symbol pairs are
//! counted, the gap included as a pseudo-segment. Counts are symmetrized and
//! smoothed additively, converted to PMI
//!
//! ```text
//! PMI(x, y) = log2( p(x, y) / (p(x) p(y)) )
//! ```
//!
//! and mapped to costs by inverting the min-max range over distinct pairs:
//! `cost = (PMI_max - PMI) / (PMI_max - PMI_min)`, with `cost(x, x) = 0` and
//! indel costs floored at [`INDEL_FLOOR`]. The corpus is then realigned with the
//! new table; this repeats until no alignment changes or `max_iter` tables
//! have been built.

use std::collections::BTreeSet;

use rayon::prelude::*;

use super::align::{align_ids, levenshtein_align, IdPair, LevAlignment};
use super::costs::SegmentCostTable;
use super::Transcription;
use crate::error::{Error, Result};

pub const INDEL_FLOOR: f64 = 0.001;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InductionConfig {
    pub max_iter: usize,
    /// Pseudo-count added to every symbol pair.
    pub smoothing: f64,
}

impl Default for InductionConfig {
    fn default() -> Self {
        Self {
            max_iter: 10,
            smoothing: 0.5,
        }
    }
}

/// Index pairs `(word group, left variant, right variant)` for all same-word
/// variant pairs, in a fixed order.
fn variant_pairs(corpus: &[Vec<Transcription>]) -> Vec<(usize, usize, usize)> {
    corpus
        .iter()
        .enumerate()
        .flat_map(|(g, group)| {
            (0..group.len()).flat_map(move |i| (i + 1..group.len()).map(move |j| (g, i, j)))
        })
        .collect()
}

fn inventory(corpus: &[Vec<Transcription>]) -> Vec<String> {
    corpus
        .iter()
        .flatten()
        .flat_map(|t| t.segments().iter().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

fn align_all(
    encoded: &[Vec<Vec<usize>>],
    pairs: &[(usize, usize, usize)],
    table: &SegmentCostTable,
) -> Vec<Vec<IdPair>> {
    pairs
        .par_iter()
        .map(|&(g, i, j)| align_ids(&encoded[g][i], &encoded[g][j], table).1)
        .collect()
}

/// Builds a cost table from aligned pairs over `n` segments plus the gap.
fn table_from_alignments(
    symbols: &[String],
    alignments: &[Vec<IdPair>],
    smoothing: f64,
    iterations_run: usize,
) -> Result<SegmentCostTable> {
    let n = symbols.len();
    let size = n + 1;
    let gap = n;
    let mut counts = vec![0.0; size * size];
    for al in alignments {
        for &(l, r) in al {
            let (x, y) = (l.unwrap_or(gap), r.unwrap_or(gap));
            counts[x * size + y] += 1.0;
            counts[y * size + x] += 1.0;
        }
    }
    for x in 0..size {
        for y in 0..size {
            if !(x == gap && y == gap) {
                counts[x * size + y] += smoothing;
            }
        }
    }
    let total: f64 = counts.iter().sum();
    let marginal: Vec<f64> = (0..size)
        .map(|x| counts[x * size..(x + 1) * size].iter().sum::<f64>() / total)
        .collect();

    let mut pmi = vec![0.0; size * size];
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for x in 0..size {
        for y in 0..size {
            if x == y {
                continue;
            }
            let joint = counts[x * size + y] / total;
            let v = (joint / (marginal[x] * marginal[y])).log2();
            pmi[x * size + y] = v;
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }

    let range = hi - lo;
    let mut costs = vec![0.0; size * size];
    for x in 0..size {
        for y in 0..size {
            if x == y {
                continue;
            }
            let mut c = if range > 0.0 {
                ((hi - pmi[x * size + y]) / range).clamp(0.0, 1.0)
            } else {
                1.0
            };
            if x == gap || y == gap {
                c = c.max(INDEL_FLOOR);
            }
            costs[x * size + y] = c;
        }
    }
    // Exact symmetry: counts are symmetric but the division above may round
    // differently for (x, y) and (y, x).
    for x in 0..size {
        for y in x + 1..size {
            costs[y * size + x] = costs[x * size + y];
        }
    }
    SegmentCostTable::from_dense(symbols.to_vec(), costs, 1.0, smoothing, iterations_run)
}

/// Induces segment costs starting from unit costs.
///
/// `corpus` holds one group per word, each group the variants of that word
/// across speakers.
pub fn induce_pmi_costs(
    corpus: &[Vec<Transcription>],
    config: &InductionConfig,
) -> Result<SegmentCostTable> {
    induce_pmi_costs_from(corpus, &SegmentCostTable::uniform(), config)
}

/// Induces segment costs starting from the alignments produced by `initial`.
pub fn induce_pmi_costs_from(
    corpus: &[Vec<Transcription>],
    initial: &SegmentCostTable,
    config: &InductionConfig,
) -> Result<SegmentCostTable> {
    let pairs = variant_pairs(corpus);
    if pairs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if !(config.smoothing > 0.0 && config.smoothing.is_finite()) {
        return Err(Error::InvalidCostTable(format!(
            "smoothing must be positive, got {}",
            config.smoothing
        )));
    }
    let max_iter = config.max_iter.max(1);
    let symbols = inventory(corpus);
    let encode = |t: &Transcription| -> Vec<usize> {
        t.segments()
            .iter()
            .map(|s| symbols.binary_search(s).expect("segment in inventory"))
            .collect()
    };
    let encoded: Vec<Vec<Vec<usize>>> = corpus
        .iter()
        .map(|group| group.iter().map(encode).collect())
        .collect();

    // Seed alignments use the initial table through its own symbol ids, so
    // encode against it separately.
    let seed: Vec<Vec<IdPair>> = {
        let seeded = corpus_alignments(corpus, initial)?;
        seeded
            .iter()
            .map(|al| {
                al.pairs
                    .iter()
                    .map(|p| {
                        let id = |s: &Option<String>| {
                            s.as_ref()
                                .map(|s| symbols.binary_search(s).expect("segment in inventory"))
                        };
                        (id(&p.left), id(&p.right))
                    })
                    .collect()
            })
            .collect()
    };

    let mut alignments = seed;
    let mut iteration = 1;
    loop {
        let table = table_from_alignments(&symbols, &alignments, config.smoothing, iteration)?;
        if iteration >= max_iter {
            return Ok(table);
        }
        let next = align_all(&encoded, &pairs, &table);
        if next == alignments {
            return Ok(table);
        }
        alignments = next;
        iteration += 1;
    }
}

/// Aligns every same-word variant pair of the corpus under `table`, in the
/// same fixed order used during induction.
pub fn corpus_alignments(
    corpus: &[Vec<Transcription>],
    table: &SegmentCostTable,
) -> Result<Vec<LevAlignment>> {
    variant_pairs(corpus)
        .par_iter()
        .map(|&(g, i, j)| levenshtein_align(&corpus[g][i], &corpus[g][j], table))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(variants: &[&str]) -> Vec<Transcription> {
        variants.iter().map(|v| Transcription::parse(v).unwrap()).collect()
    }

    #[test]
    fn identical_variants_converge_immediately() {
        let corpus = vec![group(&["a b", "a b", "a b"]), group(&["c d e", "c d e"])];
        let table = induce_pmi_costs(&corpus, &InductionConfig::default()).unwrap();
        assert_eq!(table.iterations_run, 1);
        for s in table.symbols() {
            assert_eq!(table.cost(Some(s), Some(s)), 0.0);
        }
        for al in corpus_alignments(&corpus, &table).unwrap() {
            assert!(al.pairs.iter().all(|p| p.left == p.right));
        }
    }

    /// Two-word toy corpus, counts and PMI worked out by hand.
    ///
    /// First-pass alignments: a:a, b:b (word 1) and a:a, b:c (word 2). Mirrored
    /// counts: (a,a)=4, (b,b)=2, (b,c)=(c,b)=1. Adding 0.5 to all 15 cells
    /// except (gap,gap) gives N = 15.5 and row sums a=6, b=5, c=3, gap=1.5.
    #[test]
    fn toy_corpus_matches_hand_counts() {
        let corpus = vec![group(&["a b", "a b"]), group(&["a b", "a c"])];
        let cfg = InductionConfig { max_iter: 1, smoothing: 0.5 };
        let table = induce_pmi_costs(&corpus, &cfg).unwrap();
        assert_eq!(table.iterations_run, 1);

        let n = 15.5f64;
        let pmi = |joint: f64, rx: f64, ry: f64| ((joint / n) / ((rx / n) * (ry / n))).log2();
        let (ra, rb, rc, rg) = (6.0, 5.0, 3.0, 1.5);
        let ab = pmi(0.5, ra, rb);
        let ac = pmi(0.5, ra, rc);
        let bc = pmi(1.5, rb, rc);
        let ag = pmi(0.5, ra, rg);
        let bg = pmi(0.5, rb, rg);
        let cg = pmi(0.5, rc, rg);
        let all = [ab, ac, bc, ag, bg, cg];
        let hi = all.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = all.iter().cloned().fold(f64::INFINITY, f64::min);
        let cost = |v: f64| (hi - v) / (hi - lo);

        let close = |x: f64, y: f64| (x - y).abs() < 1e-12;
        assert!(close(table.cost(Some("a"), Some("b")), cost(ab)));
        assert!(close(table.cost(Some("a"), Some("c")), cost(ac)));
        assert!(close(table.cost(Some("b"), Some("c")), cost(bc)));
        assert!(close(table.indel("a"), cost(ag).max(INDEL_FLOOR)));
        assert!(close(table.indel("b"), cost(bg).max(INDEL_FLOOR)));
        assert!(close(table.indel("c"), cost(cg).max(INDEL_FLOOR)));
        assert!(table.cost(Some("b"), Some("c")) < table.cost(Some("b"), Some("a")));
    }

    #[test]
    fn iteration_cap_is_respected() {
        let corpus = vec![
            group(&["a b c", "a c", "b c"]),
            group(&["x a", "x b", "a"]),
            group(&["c c b", "c b", "a c b"]),
        ];
        let one = induce_pmi_costs(&corpus, &InductionConfig { max_iter: 1, smoothing: 0.5 }).unwrap();
        assert_eq!(one.iterations_run, 1);
        let many = induce_pmi_costs(&corpus, &InductionConfig { max_iter: 50, smoothing: 0.5 }).unwrap();
        assert!(many.iterations_run >= 1 && many.iterations_run <= 50);
    }

    #[test]
    fn table_invariants_and_fixed_point() {
        let corpus = vec![
            group(&["æ ə f t ə n ʉ n", "æ f t ə r n u n", "æ f t ə n u n", "a f t ə n u n"]),
            group(&["p l i z", "p l i s", "b l i z"]),
            group(&["k ɔ l", "k ɑ l", "k ɔ ɫ"]),
            group(&["s t ɛ l ə", "s t ɛ l a", "ɛ s t ɛ l a"]),
        ];
        let table = induce_pmi_costs(&corpus, &InductionConfig::default()).unwrap();
        let syms: Vec<Option<&str>> =
            table.symbols().iter().map(|s| Some(s.as_str())).chain([None]).collect();
        for &x in &syms {
            for &y in &syms {
                let c = table.cost(x, y);
                assert!((0.0..=1.0).contains(&c));
                assert_eq!(c, table.cost(y, x));
                if x == y {
                    assert_eq!(c, 0.0);
                }
            }
            if let Some(s) = x {
                assert!(table.indel(s) >= INDEL_FLOOR);
            }
        }
        if table.iterations_run < InductionConfig::default().max_iter {
            let again = induce_pmi_costs_from(&corpus, &table, &InductionConfig::default()).unwrap();
            assert_eq!(
                corpus_alignments(&corpus, &table).unwrap(),
                corpus_alignments(&corpus, &again).unwrap()
            );
            assert_eq!(again.iterations_run, 1);
        }
    }

    #[test]
    fn corpus_without_pairs_is_empty() {
        let corpus = vec![group(&["a"]), group(&["b c"])];
        assert!(matches!(
            induce_pmi_costs(&corpus, &InductionConfig::default()),
            Err(Error::EmptyCorpus)
        ));
        assert!(matches!(induce_pmi_costs(&[], &InductionConfig::default()), Err(Error::EmptyCorpus)));
    }
}
