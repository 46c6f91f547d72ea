//! Text file formats.
//!
//! All formats are line oriented. Blank lines and lines starting with `#`
//! are skipped. Floating point values are written with 17 significant
//! digits so that a write/read cycle reproduces every bit.
//!
//! | format      | layout                                                  |
//! |-------------|---------------------------------------------------------|
//! | edge list   | header `N M`, then `M` lines `x y w`; edge id = line order |
//! | linkage     | one line per internal node: `child1 child2 altitude size` |
//! | triplets    | one line per triplet: `ref pos neg`                     |
//! | labels      | `vertex class` (space or comma separated, optional header) |
//! | points      | CSV, one point per row, numeric columns, optional header |
//! | trace       | CSV `iteration,cost`                                    |

use std::fmt::Write as _;
use std::io::{self, Read, Write};
use std::str::FromStr;

use ultrafit_core::{build_graph, Dendrogram, EdgeWeightVector, EdgeWeightedGraph, PointSet, TripletSet};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Invalid(#[from] ultrafit_core::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn parse_err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Parse { line, message: message.into() }
}

/// Non-empty, non-comment lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn fields(line: &str) -> Vec<&str> {
    line.split(|c: char| c == ',' || c.is_whitespace()).filter(|f| !f.is_empty()).collect()
}

fn parse_field<T: FromStr>(line: usize, field: &str, what: &str) -> Result<T, FormatError> {
    field.parse().map_err(|_| parse_err(line, format!("invalid {what} `{field}`")))
}

fn expect_fields<'a>(line: usize, text: &'a str, count: usize, layout: &str) -> Result<Vec<&'a str>, FormatError> {
    let f = fields(text);
    if f.len() != count {
        return Err(parse_err(line, format!("expected `{layout}`, found {} fields", f.len())));
    }
    Ok(f)
}

fn read_all(mut r: impl Read) -> Result<String, FormatError> {
    let mut s = String::new();
    r.read_to_string(&mut s)?;
    Ok(s)
}

/// Formats a float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn read_edge_list(r: impl Read) -> Result<(EdgeWeightedGraph, EdgeWeightVector), FormatError> {
    let text = read_all(r)?;
    let mut lines = content_lines(&text);
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "missing `N M` header"))?;
    let h = expect_fields(hl, header, 2, "N M")?;
    let n: usize = parse_field(hl, h[0], "vertex count")?;
    let m: usize = parse_field(hl, h[1], "edge count")?;
    let mut edges = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    for (line, text) in lines {
        if edges.len() == m {
            return Err(parse_err(line, format!("more than the {m} edges announced in the header")));
        }
        let f = expect_fields(line, text, 3, "x y w")?;
        let x: usize = parse_field(line, f[0], "vertex")?;
        let y: usize = parse_field(line, f[1], "vertex")?;
        let w: f64 = parse_field(line, f[2], "weight")?;
        if !w.is_finite() {
            return Err(parse_err(line, format!("weight `{}` is not finite", f[2])));
        }
        edges.push((x, y));
        weights.push(w);
    }
    if edges.len() != m {
        return Err(parse_err(hl, format!("header announces {m} edges, file has {}", edges.len())));
    }
    let g = build_graph(n, &edges)?;
    let w = EdgeWeightVector::for_graph(&g, weights)?;
    Ok((g, w))
}

pub fn write_edge_list(mut out: impl Write, g: &EdgeWeightedGraph, w: &[f64]) -> io::Result<()> {
    let mut s = String::with_capacity(32 * (g.edge_count() + 1));
    writeln!(s, "{} {}", g.vertex_count(), g.edge_count()).unwrap();
    for (&(x, y), &v) in g.edges().iter().zip(w) {
        writeln!(s, "{x} {y} {}", fmt_f64(v)).unwrap();
    }
    out.write_all(s.as_bytes())
}

pub fn read_linkage(r: impl Read) -> Result<Dendrogram, FormatError> {
    let text = read_all(r)?;
    let mut merges = Vec::new();
    let mut sizes = Vec::new();
    for (line, text) in content_lines(&text) {
        let f = expect_fields(line, text, 4, "child1 child2 altitude size")?;
        let a: usize = parse_field(line, f[0], "node")?;
        let b: usize = parse_field(line, f[1], "node")?;
        let alt: f64 = parse_field(line, f[2], "altitude")?;
        let size: usize = parse_field(line, f[3], "size")?;
        merges.push((a, b, alt));
        sizes.push((line, size));
    }
    let t = Dendrogram::from_merges(merges.len() + 1, &merges, None)?;
    for (k, &(line, size)) in sizes.iter().enumerate() {
        let actual = t.size(t.leaf_count() + k);
        if size != actual {
            return Err(parse_err(line, format!("size column says {size}, children hold {actual} leaves")));
        }
    }
    Ok(t)
}

pub fn write_linkage(mut out: impl Write, t: &Dendrogram) -> io::Result<()> {
    let mut s = String::new();
    for (a, b, alt, size) in t.merges() {
        writeln!(s, "{a} {b} {} {size}", fmt_f64(alt)).unwrap();
    }
    out.write_all(s.as_bytes())
}

pub fn read_triplets(r: impl Read, vertex_count: usize) -> Result<TripletSet, FormatError> {
    let text = read_all(r)?;
    let mut out = Vec::new();
    for (line, text) in content_lines(&text) {
        let f = expect_fields(line, text, 3, "ref pos neg")?;
        let mut t = [0usize; 3];
        for (slot, field) in t.iter_mut().zip(&f) {
            *slot = parse_field(line, field, "vertex")?;
            if *slot >= vertex_count {
                return Err(parse_err(line, format!("vertex {slot} out of range for {vertex_count} vertices")));
            }
        }
        if t[0] == t[2] {
            return Err(parse_err(line, "reference and negative are the same vertex"));
        }
        out.push((t[0], t[1], t[2]));
    }
    Ok(TripletSet::from_tuples(&out)?)
}

/// Per-vertex class labels. Class names are arbitrary strings, mapped to
/// integers in order of first appearance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labels {
    pub classes: Vec<Option<u32>>,
    pub names: Vec<String>,
}

impl Labels {
    pub fn class_count(&self) -> usize {
        self.names.len()
    }

    pub fn labeled_count(&self) -> usize {
        self.classes.iter().filter(|c| c.is_some()).count()
    }
}

/// Reads a `vertex class` file. Vertices not listed are unlabeled. A first
/// line whose vertex field is not an integer is taken as a header. Without
/// a `vertex_count`, the largest listed vertex sets the length.
pub fn read_labels(r: impl Read, vertex_count: Option<usize>) -> Result<Labels, FormatError> {
    let text = read_all(r)?;
    let mut rows: Vec<(usize, usize, &str)> = Vec::new();
    for (i, (line, text)) in content_lines(&text).enumerate() {
        let f = expect_fields(line, text, 2, "vertex class")?;
        let v: usize = match f[0].parse() {
            Ok(v) => v,
            Err(_) if i == 0 => continue,
            Err(_) => return Err(parse_err(line, format!("invalid vertex `{}`", f[0]))),
        };
        if let Some(n) = vertex_count.filter(|&n| v >= n) {
            return Err(parse_err(line, format!("vertex {v} out of range for {n} vertices")));
        }
        rows.push((line, v, f[1]));
    }
    let n = vertex_count.unwrap_or_else(|| rows.iter().map(|r| r.1 + 1).max().unwrap_or(0));
    let mut classes = vec![None; n];
    let mut names: Vec<String> = Vec::new();
    for (line, v, name) in rows {
        if classes[v].is_some() {
            return Err(parse_err(line, format!("vertex {v} labeled twice")));
        }
        let id = match names.iter().position(|n| n == name) {
            Some(id) => id,
            None => {
                names.push(name.to_string());
                names.len() - 1
            }
        };
        classes[v] = Some(id as u32);
    }
    Ok(Labels { classes, names })
}

/// Writes `vertex,cluster` rows under a header.
pub fn write_labels(mut out: impl Write, labels: &[usize]) -> io::Result<()> {
    let mut s = String::from("vertex,cluster\n");
    for (v, c) in labels.iter().enumerate() {
        writeln!(s, "{v},{c}").unwrap();
    }
    out.write_all(s.as_bytes())
}

/// Reads a CSV of coordinates. A first row that does not parse as numbers
/// is treated as a header.
pub fn read_points(r: impl Read) -> Result<PointSet, FormatError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(r);
    let mut dim = None;
    let mut coords = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let line = record.position().map_or(i + 1, |p| p.line() as usize);
        let row: Result<Vec<f64>, _> = record.iter().map(f64::from_str).collect();
        let row = match row {
            Ok(row) => row,
            Err(_) if i == 0 => continue,
            Err(_) => return Err(parse_err(line, "non-numeric coordinate")),
        };
        match dim {
            None => dim = Some(row.len()),
            Some(d) if d != row.len() => {
                return Err(parse_err(line, format!("expected {d} columns, found {}", row.len())));
            }
            Some(_) => {}
        }
        coords.extend(row);
    }
    let dim = dim.ok_or_else(|| parse_err(1, "no points"))?;
    Ok(PointSet::new(dim, coords)?)
}

pub fn write_trace(mut out: impl Write, trace: &[f64]) -> io::Result<()> {
    let mut s = String::from("iteration,cost\n");
    for (i, v) in trace.iter().enumerate() {
        writeln!(s, "{i},{}", fmt_f64(*v)).unwrap();
    }
    out.write_all(s.as_bytes())
}

/// Self-contained SVG line chart of a cost trace.
pub fn trace_svg(trace: &[f64], title: &str) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const PAD: f64 = 50.0;
    let lo = trace.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = trace.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let steps = trace.len().saturating_sub(1).max(1) as f64;
    let points: Vec<String> = trace
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let x = PAD + (W - 2.0 * PAD) * i as f64 / steps;
            let y = H - PAD - (H - 2.0 * PAD) * (v - lo) / span;
            format!("{x:.2},{y:.2}")
        })
        .collect();
    let title = title.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;");
    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#).unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="16">{title}</text>"#, W / 2.0).unwrap();
    writeln!(
        s,
        r#"<path d="M{PAD},{PAD} V{} H{}" fill="none" stroke="black"/>"#,
        H - PAD,
        W - PAD
    )
    .unwrap();
    let label = |s: &mut String, x: f64, y: f64, anchor: &str, text: String| {
        writeln!(s, r#"<text x="{x}" y="{y}" text-anchor="{anchor}" font-family="sans-serif" font-size="12">{text}</text>"#).unwrap();
    };
    label(&mut s, PAD - 6.0, PAD + 4.0, "end", format!("{hi:.4e}"));
    label(&mut s, PAD - 6.0, H - PAD + 4.0, "end", format!("{lo:.4e}"));
    label(&mut s, PAD, H - PAD + 18.0, "middle", "0".into());
    label(&mut s, W - PAD, H - PAD + 18.0, "middle", format!("{}", trace.len().saturating_sub(1)));
    label(&mut s, W / 2.0, H - 12.0, "middle", "iteration".into());
    writeln!(s, r#"<polyline points="{}" fill="none" stroke="steelblue" stroke-width="2"/>"#, points.join(" ")).unwrap();
    s.push_str("</svg>\n");
    s
}
