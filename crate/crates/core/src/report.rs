//! Deterministic SVG and CSV emitters for per-frame distance profiles and MDS
//! maps. Output bytes depend only on the inputs and the [`STYLE`] block.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::dtw::FrameProfile;
use crate::error::{Error, Result};

/// Layout constants shared by all plots.
pub struct Style {
    pub width: f64,
    pub height: f64,
    pub margin: f64,
    pub base_radius: f64,
    pub point_fill: &'static str,
    pub average_stroke: &'static str,
    pub global_stroke: &'static str,
    pub font_size: f64,
}

pub const STYLE: Style = Style {
    width: 800.0,
    height: 400.0,
    margin: 50.0,
    base_radius: 2.5,
    point_fill: "#4c72b0",
    average_stroke: "#dd8452",
    global_stroke: "#c44e52",
    font_size: 12.0,
};

/// Formats a value with 9 significant digits, in the shortest decimal form
/// that parses back to the rounded value.
pub fn fmt_num(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    let rounded: f64 = format!("{v:.8e}").parse().expect("valid float literal");
    format!("{rounded}")
}

/// Everything needed to draw one per-frame distance profile.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfilePlotSpec {
    pub frame_costs: Vec<f64>,
    pub multiplicity: Vec<usize>,
    pub moving_average: Vec<f64>,
    pub window: usize,
    pub global: f64,
    pub x_label: String,
    pub y_label: String,
}

impl ProfilePlotSpec {
    pub fn from_profile(p: &FrameProfile, x_label: &str, y_label: &str) -> Self {
        Self {
            frame_costs: p.frame_costs.clone(),
            multiplicity: p.multiplicity.clone(),
            moving_average: p.moving_average.clone(),
            window: p.window,
            global: p.global,
            x_label: x_label.to_owned(),
            y_label: y_label.to_owned(),
        }
    }

    fn validate(&self) -> Result<()> {
        let n = self.frame_costs.len();
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        if self.multiplicity.len() != n {
            return Err(Error::LengthMismatch(self.multiplicity.len(), n));
        }
        if self.window == 0 || self.window > n || self.moving_average.len() != n - self.window + 1 {
            return Err(Error::BadWindow {
                window: self.window,
                len: n,
            });
        }
        Ok(())
    }
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '-' if out.ends_with('-') => out.push_str("&#45;"),
            _ => out.push(c),
        }
    }
    out
}

fn svg_open(out: &mut String, header: &[String]) {
    for line in header {
        // `--` is not allowed inside XML comments.
        let _ = writeln!(out, "<!-- {} -->", line.replace("--", "- -"));
    }
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = STYLE.width,
        h = STYLE.height
    );
    let _ = writeln!(out, r#"<rect width="{}" height="{}" fill="white"/>"#, STYLE.width, STYLE.height);
}

fn csv_header(out: &mut String, header: &[String]) {
    for line in header {
        let _ = writeln!(out, "# {line}");
    }
}

/// Linear map from a data interval onto a pixel interval.
#[derive(Clone, Copy)]
struct Axis {
    lo: f64,
    hi: f64,
    px_lo: f64,
    px_hi: f64,
}

impl Axis {
    fn new(lo: f64, hi: f64, px_lo: f64, px_hi: f64) -> Self {
        let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 0.5, lo + 0.5) };
        Self { lo, hi, px_lo, px_hi }
    }

    fn map(&self, v: f64) -> f64 {
        self.px_lo + (v - self.lo) / (self.hi - self.lo) * (self.px_hi - self.px_lo)
    }
}

fn draw_axes(out: &mut String, x_label: &str, y_label: &str) {
    let (m, w, h) = (STYLE.margin, STYLE.width, STYLE.height);
    let _ = writeln!(
        out,
        r#"<path d="M {m} {top} L {m} {bottom} L {right} {bottom}" fill="none" stroke="black"/>"#,
        top = m,
        bottom = h - m,
        right = w - m
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-size="{}" text-anchor="middle">{}</text>"#,
        w / 2.0,
        h - m / 4.0,
        STYLE.font_size,
        xml_escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-size="{}" text-anchor="middle" transform="rotate(-90 {:.2} {:.2})">{}</text>"#,
        m / 3.0,
        h / 2.0,
        STYLE.font_size,
        m / 3.0,
        h / 2.0,
        xml_escape(y_label)
    );
}

/// SVG rendering of a profile: one bullet per frame with radius
/// `base * sqrt(multiplicity)`, the moving average as a polyline and the global
/// distance as a horizontal line.
pub fn profile_svg(spec: &ProfilePlotSpec, header: &[String]) -> Result<String> {
    spec.validate()?;
    let n = spec.frame_costs.len();
    let y_max = spec
        .frame_costs
        .iter()
        .chain(&spec.moving_average)
        .chain([&spec.global])
        .fold(0.0f64, |m, v| m.max(*v));
    let (m, w, h) = (STYLE.margin, STYLE.width, STYLE.height);
    let xa = Axis::new(0.0, (n - 1) as f64, m, w - m);
    let ya = Axis::new(0.0, y_max * 1.05, h - m, m);

    let mut out = String::new();
    svg_open(&mut out, header);
    draw_axes(&mut out, &spec.x_label, &spec.y_label);
    out.push_str("<g class=\"frames\">\n");
    for (i, (c, k)) in spec.frame_costs.iter().zip(&spec.multiplicity).enumerate() {
        let _ = writeln!(
            out,
            r#"<circle cx="{:.2}" cy="{:.2}" r="{:.3}" fill="{}" fill-opacity="0.6"/>"#,
            xa.map(i as f64),
            ya.map(*c),
            STYLE.base_radius * (*k as f64).sqrt(),
            STYLE.point_fill
        );
    }
    out.push_str("</g>\n");
    let points: Vec<String> = spec
        .moving_average
        .iter()
        .enumerate()
        .map(|(k, v)| format!("{:.2},{:.2}", xa.map((k + spec.window / 2) as f64), ya.map(*v)))
        .collect();
    let _ = writeln!(
        out,
        r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="2"/>"#,
        points.join(" "),
        STYLE.average_stroke
    );
    let gy = ya.map(spec.global);
    let _ = writeln!(
        out,
        r#"<line x1="{m:.2}" y1="{gy:.2}" x2="{:.2}" y2="{gy:.2}" stroke="{}" stroke-dasharray="6 3"/>"#,
        w - m,
        STYLE.global_stroke
    );
    out.push_str("</svg>\n");
    Ok(out)
}

/// CSV twin of a profile: `frame,cost,multiplicity,moving_average`, with the
/// moving average on its centre frame and empty elsewhere.
pub fn profile_csv(spec: &ProfilePlotSpec, header: &[String]) -> Result<String> {
    spec.validate()?;
    let mut out = String::new();
    csv_header(&mut out, header);
    let _ = writeln!(out, "# window={}", spec.window);
    let _ = writeln!(out, "# global={}", fmt_num(spec.global));
    out.push_str("frame,cost,multiplicity,moving_average\n");
    let half = spec.window / 2;
    for (i, (c, k)) in spec.frame_costs.iter().zip(&spec.multiplicity).enumerate() {
        let avg = i
            .checked_sub(half)
            .and_then(|j| spec.moving_average.get(j))
            .map(|v| fmt_num(*v))
            .unwrap_or_default();
        let _ = writeln!(out, "{i},{},{k},{avg}", fmt_num(*c));
    }
    Ok(out)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn csv_twin(path: &Path) -> PathBuf {
    path.with_extension("csv")
}

/// Writes the SVG to `path` and its CSV twin next to it; returns the CSV path.
pub fn emit_profile_svg(spec: &ProfilePlotSpec, path: impl AsRef<Path>, header: &[String]) -> Result<PathBuf> {
    let path = path.as_ref();
    let svg = profile_svg(spec, header)?;
    let csv = profile_csv(spec, header)?;
    write_file(path, &svg)?;
    let twin = csv_twin(path);
    write_file(&twin, &csv)?;
    Ok(twin)
}

/// Parses a profile CSV twin back into a spec (labels are not stored).
pub fn read_profile_csv(text: &str) -> Result<ProfilePlotSpec> {
    let bad = |line: usize, msg: &str| Error::parse("<profile csv>", line, msg);
    let mut window = None;
    let mut global = None;
    let mut frame_costs = Vec::new();
    let mut multiplicity = Vec::new();
    let mut moving_average = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let n = n + 1;
        if let Some(c) = line.strip_prefix('#') {
            if let Some(v) = c.trim().strip_prefix("window=") {
                window = Some(v.parse().map_err(|_| bad(n, "bad window"))?);
            } else if let Some(v) = c.trim().strip_prefix("global=") {
                global = Some(v.parse().map_err(|_| bad(n, "bad global"))?);
            }
            continue;
        }
        if line.starts_with("frame,") || line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 4 {
            return Err(bad(n, "expected 4 columns"));
        }
        frame_costs.push(f[1].parse().map_err(|_| bad(n, "bad cost"))?);
        multiplicity.push(f[2].parse().map_err(|_| bad(n, "bad multiplicity"))?);
        if !f[3].is_empty() {
            moving_average.push(f[3].parse().map_err(|_| bad(n, "bad average"))?);
        }
    }
    let spec = ProfilePlotSpec {
        frame_costs,
        multiplicity,
        moving_average,
        window: window.ok_or_else(|| bad(0, "missing window"))?,
        global: global.ok_or_else(|| bad(0, "missing global"))?,
        x_label: String::new(),
        y_label: String::new(),
    };
    spec.validate()?;
    Ok(spec)
}

/// Per-point colours: each MDS dimension is min-max mapped onto one channel
/// (red, green, blue in order); an unused channel stays at 128, as does a
/// channel whose dimension has zero range.
pub fn mds_colors(coords: &[Vec<f64>]) -> Result<Vec<[u8; 3]>> {
    let k = coords.first().map_or(0, Vec::len);
    if !(2..=3).contains(&k) {
        return Err(Error::UnsupportedDim(k));
    }
    if let Some(r) = coords.iter().find(|r| r.len() != k) {
        return Err(Error::DimMismatch(r.len(), k));
    }
    let ranges: Vec<(f64, f64)> = (0..k)
        .map(|d| {
            coords.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
                (lo.min(r[d]), hi.max(r[d]))
            })
        })
        .collect();
    Ok(coords
        .iter()
        .map(|r| {
            let mut rgb = [128u8; 3];
            for (d, &(lo, hi)) in ranges.iter().enumerate() {
                if hi > lo {
                    rgb[d] = ((r[d] - lo) / (hi - lo) * 255.0).round() as u8;
                }
            }
            rgb
        })
        .collect())
}

fn hex(rgb: [u8; 3]) -> String {
    format!("#{:02x}{:02x}{:02x}", rgb[0], rgb[1], rgb[2])
}

/// CSV twin of an MDS map: `id,dim1..dimk,color`.
pub fn mds_csv(coords: &[Vec<f64>], labels: &[String], header: &[String]) -> Result<String> {
    if labels.len() != coords.len() {
        return Err(Error::LengthMismatch(labels.len(), coords.len()));
    }
    let colors = mds_colors(coords)?;
    let k = coords[0].len();
    let mut out = String::new();
    csv_header(&mut out, header);
    out.push_str("id");
    for d in 1..=k {
        let _ = write!(out, ",dim{d}");
    }
    out.push_str(",color\n");
    for ((label, row), rgb) in labels.iter().zip(coords).zip(colors) {
        out.push_str(&label.replace(',', ";"));
        for v in row {
            let _ = write!(out, ",{}", fmt_num(*v));
        }
        let _ = writeln!(out, ",{}", hex(rgb));
    }
    Ok(out)
}

/// SVG map of MDS coordinates. With `geo` (x, y) positions the points sit at
/// those positions and carry the MDS colour; otherwise they are scattered in
/// the first two MDS dimensions.
pub fn mds_svg(
    coords: &[Vec<f64>],
    labels: &[String],
    geo: Option<&[(f64, f64)]>,
    header: &[String],
) -> Result<String> {
    if labels.len() != coords.len() {
        return Err(Error::LengthMismatch(labels.len(), coords.len()));
    }
    let colors = mds_colors(coords)?;
    let positions: Vec<(f64, f64)> = match geo {
        Some(g) if g.len() != coords.len() => return Err(Error::LengthMismatch(g.len(), coords.len())),
        Some(g) => g.to_vec(),
        None => coords.iter().map(|r| (r[0], r[1])).collect(),
    };
    let span = |f: fn(&(f64, f64)) -> f64| {
        positions
            .iter()
            .map(f)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    };
    let (x0, x1) = span(|p| p.0);
    let (y0, y1) = span(|p| p.1);
    let (m, w, h) = (STYLE.margin, STYLE.width, STYLE.height);
    let xa = Axis::new(x0, x1, m, w - m);
    let ya = Axis::new(y0, y1, h - m, m);

    let mut out = String::new();
    svg_open(&mut out, header);
    let (xl, yl) = if geo.is_some() { ("x", "y") } else { ("dim1", "dim2") };
    draw_axes(&mut out, xl, yl);
    for ((label, (x, y)), rgb) in labels.iter().zip(&positions).zip(colors) {
        let (px, py) = (xa.map(*x), ya.map(*y));
        let _ = writeln!(
            out,
            r#"<circle cx="{px:.2}" cy="{py:.2}" r="{:.3}" fill="{}"><title>{}</title></circle>"#,
            STYLE.base_radius * 2.0,
            hex(rgb),
            xml_escape(label)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Writes the map SVG to `path` and the CSV twin next to it; returns the CSV path.
pub fn emit_mds_map(
    coords: &[Vec<f64>],
    labels: &[String],
    geo: Option<&[(f64, f64)]>,
    path: impl AsRef<Path>,
    header: &[String],
) -> Result<PathBuf> {
    let path = path.as_ref();
    let svg = mds_svg(coords, labels, geo, header)?;
    let csv = mds_csv(coords, labels, header)?;
    write_file(path, &svg)?;
    let twin = csv_twin(path);
    write_file(&twin, &csv)?;
    Ok(twin)
}
