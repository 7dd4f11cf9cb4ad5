use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::featstore::tsv;

/// Token standing for the gap in cost files and alignment printouts.
pub const GAP_TOKEN: &str = "-";

/// Symmetric segment substitution and indel costs.
///
/// Costs live in a dense matrix over the segment inventory plus one trailing
/// gap row. Segments outside the inventory cost `default_cost` against
/// anything but themselves.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentCostTable {
    symbols: Vec<String>,
    index: HashMap<String, usize>,
    costs: Vec<f64>,
    default_cost: f64,
    pub smoothing: f64,
    pub iterations_run: usize,
}

impl SegmentCostTable {
    /// Unit substitution and indel costs for every segment.
    pub fn uniform() -> Self {
        Self::from_dense(Vec::new(), vec![0.0], 1.0, 0.0, 0)
            .expect("empty inventory is valid")
    }

    /// Builds a table from an inventory and a row-major `(n+1) x (n+1)` matrix
    /// whose last row and column are the gap.
    pub(crate) fn from_dense(
        symbols: Vec<String>,
        costs: Vec<f64>,
        default_cost: f64,
        smoothing: f64,
        iterations_run: usize,
    ) -> Result<Self> {
        let size = symbols.len() + 1;
        assert_eq!(costs.len(), size * size);
        let index = symbols
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect::<HashMap<_, _>>();
        if index.len() != symbols.len() {
            return Err(Error::InvalidCostTable("duplicate segment in inventory".into()));
        }
        let table = Self {
            symbols,
            index,
            costs,
            default_cost,
            smoothing,
            iterations_run,
        };
        table.check()?;
        Ok(table)
    }

    fn check(&self) -> Result<()> {
        let size = self.size();
        let bad = |msg: String| Err(Error::InvalidCostTable(msg));
        if !(self.default_cost > 0.0 && self.default_cost <= 1.0) {
            return bad(format!("default cost {} outside (0, 1]", self.default_cost));
        }
        for i in 0..size {
            for j in 0..size {
                let c = self.costs[i * size + j];
                if !(0.0..=1.0).contains(&c) {
                    return bad(format!("cost {c} outside [0, 1]"));
                }
                if c != self.costs[j * size + i] {
                    return bad("asymmetric costs".into());
                }
            }
            if i < size - 1 {
                if self.costs[i * size + i] != 0.0 {
                    return bad(format!("nonzero self cost for {:?}", self.symbols[i]));
                }
                if self.costs[i * size + size - 1] == 0.0 {
                    return bad(format!("zero indel cost for {:?}", self.symbols[i]));
                }
            }
        }
        Ok(())
    }

    /// Builds a table from explicit `(left, right, cost)` entries, where `None`
    /// is the gap. Entries are mirrored; pairs not listed get `default_cost`.
    pub fn from_entries<'a>(
        entries: impl IntoIterator<Item = (Option<&'a str>, Option<&'a str>, f64)>,
        default_cost: f64,
    ) -> Result<Self> {
        let entries: Vec<_> = entries.into_iter().collect();
        let symbols: Vec<String> = entries
            .iter()
            .flat_map(|(a, b, _)| [*a, *b])
            .flatten()
            .map(str::to_owned)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let size = symbols.len() + 1;
        let pos = |s: Option<&str>| -> usize {
            s.map_or(size - 1, |s| symbols.binary_search_by(|x| x.as_str().cmp(s)).unwrap())
        };
        let mut costs = vec![default_cost; size * size];
        for i in 0..size - 1 {
            costs[i * size + i] = 0.0;
        }
        costs[size * size - 1] = 0.0;
        for (a, b, c) in &entries {
            let (i, j) = (pos(*a), pos(*b));
            if i == j && *c != 0.0 {
                return Err(Error::InvalidCostTable(format!("nonzero self cost for {a:?}")));
            }
            costs[i * size + j] = *c;
            costs[j * size + i] = *c;
        }
        Self::from_dense(symbols, costs, default_cost, 0.0, 0)
    }

    fn size(&self) -> usize {
        self.symbols.len() + 1
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn default_cost(&self) -> f64 {
        self.default_cost
    }

    /// Index used by the alignment kernels; the gap is `symbols().len()`.
    pub(crate) fn gap_id(&self) -> usize {
        self.symbols.len()
    }

    pub(crate) fn id(&self, seg: &str) -> Option<usize> {
        self.index.get(seg).copied()
    }

    /// Cost between two encoded symbols. Ids past the gap are out-of-inventory
    /// segments: free against themselves, `default_cost` otherwise.
    pub(crate) fn cost_ids(&self, a: usize, b: usize) -> f64 {
        let size = self.size();
        if a == b {
            0.0
        } else if a < size && b < size {
            self.costs[a * size + b]
        } else {
            self.default_cost
        }
    }

    /// Cost of aligning `a` with `b`; `None` is the gap.
    pub fn cost(&self, a: Option<&str>, b: Option<&str>) -> f64 {
        match (a, b) {
            (None, None) => 0.0,
            (Some(x), Some(y)) if x == y => 0.0,
            _ => {
                let enc = |s: Option<&str>| match s {
                    None => Some(self.gap_id()),
                    Some(s) => self.id(s),
                };
                match (enc(a), enc(b)) {
                    (Some(i), Some(j)) => self.cost_ids(i, j),
                    _ => self.default_cost,
                }
            }
        }
    }

    pub fn indel(&self, seg: &str) -> f64 {
        self.cost(Some(seg), None)
    }
}

fn token(s: Option<&str>) -> &str {
    s.unwrap_or(GAP_TOKEN)
}

/// Serializes a table as `seg1<TAB>seg2<TAB>cost` over all unordered pairs,
/// preceded by `#` header lines carrying smoothing, iterations and the default.
pub fn format_cost_table(table: &SegmentCostTable, header: &[String]) -> String {
    let mut out = String::new();
    for line in header {
        let _ = writeln!(out, "# {line}");
    }
    let _ = writeln!(out, "# smoothing={}", table.smoothing);
    let _ = writeln!(out, "# iterations={}", table.iterations_run);
    let _ = writeln!(out, "# default={}", table.default_cost);
    let syms: Vec<Option<&str>> = table
        .symbols
        .iter()
        .map(|s| Some(s.as_str()))
        .chain([None])
        .collect();
    for (i, a) in syms.iter().enumerate() {
        for b in &syms[i + 1..] {
            let _ = writeln!(out, "{}\t{}\t{}", token(*a), token(*b), table.cost(*a, *b));
        }
    }
    out
}

pub fn write_cost_table(
    table: &SegmentCostTable,
    header: &[String],
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, format_cost_table(table, header)).map_err(|e| Error::io(path, e))
}

pub fn read_cost_table(path: impl AsRef<Path>) -> Result<SegmentCostTable> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut smoothing = 0.0;
    let mut iterations = 0;
    let mut default_cost = 1.0;
    for (n, line) in text.lines().enumerate() {
        let Some(comment) = line.trim_start().strip_prefix('#') else {
            continue;
        };
        if let Some((key, value)) = comment.trim().split_once('=') {
            let bad = || Error::parse(path, n + 1, format!("bad header value {value:?}"));
            match key.trim() {
                "smoothing" => smoothing = value.trim().parse().map_err(|_| bad())?,
                "iterations" => iterations = value.trim().parse().map_err(|_| bad())?,
                "default" => default_cost = value.trim().parse().map_err(|_| bad())?,
                _ => {}
            }
        }
    }
    let records = tsv::parse_records(&text);
    let mut entries = Vec::with_capacity(records.len());
    for rec in &records {
        if rec.fields.len() != 3 {
            return Err(Error::parse(path, rec.line, "expected seg1, seg2, cost"));
        }
        let c = tsv::parse_f64(path, rec, 2, "cost")?;
        let seg = |s: &str| -> Option<String> {
            let s = s.trim();
            (s != GAP_TOKEN).then(|| s.to_owned())
        };
        entries.push((seg(&rec.fields[0]), seg(&rec.fields[1]), c));
    }
    let mut table = SegmentCostTable::from_entries(
        entries.iter().map(|(a, b, c)| (a.as_deref(), b.as_deref(), *c)),
        default_cost,
    )
    .map_err(|e| Error::parse(path, 0, e.to_string()))?;
    table.smoothing = smoothing;
    table.iterations_run = iterations;
    Ok(table)
}
