//! SVG rendering of scans and boundary traces in the `(a, b)` plane.
//!
//! Locked cells are shaded, boundaries `a₀,ₖ(b)`, `a_π,ₖ(b)` are solid, the
//! Bessel predictions dashed and the lines `a = kμ` dotted. All coordinates
//! are printed with two decimals so output is byte-stable.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scan::ScanCell;
use crate::tongue::BoundaryPoint;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvgStyle {
    pub width: f64,
    pub height: f64,
    pub margin: f64,
    /// Fill of even and odd tongues.
    pub fill_even: String,
    pub fill_odd: String,
    /// Bessel predictions are drawn only for `b` at least this large.
    pub bessel_min_b: f64,
    /// `μ` for the dotted lines `a = kμ`; taken from the data when absent.
    pub mu: Option<f64>,
    /// Tongues whose `a = kμ` line is drawn.
    pub k_range: (i64, i64),
    pub ticks: usize,
}

impl Default for SvgStyle {
    fn default() -> Self {
        Self {
            width: 800.0,
            height: 600.0,
            margin: 50.0,
            fill_even: "#b0b0b0".into(),
            fill_odd: "#d0d0d0".into(),
            bessel_min_b: 0.0,
            mu: None,
            k_range: (-4, 4),
            ticks: 6,
        }
    }
}

struct Frame {
    a: (f64, f64),
    b: (f64, f64),
    style: SvgStyle,
}

impl Frame {
    fn x(&self, a: f64) -> f64 {
        let w = self.style.width - 2.0 * self.style.margin;
        self.style.margin + (a - self.a.0) / (self.a.1 - self.a.0) * w
    }

    fn y(&self, b: f64) -> f64 {
        let h = self.style.height - 2.0 * self.style.margin;
        self.style.height - self.style.margin - (b - self.b.0) / (self.b.1 - self.b.0) * h
    }

    fn inside_a(&self, a: f64) -> bool {
        a >= self.a.0 && a <= self.a.1
    }
}

/// Render a scan, boundary traces, or both.
pub fn render_svg(cells: &[ScanCell], boundaries: &[BoundaryPoint], style: &SvgStyle) -> Result<String> {
    if cells.is_empty() && boundaries.is_empty() {
        return Err(Error::InvalidParams("nothing to render".into()));
    }
    let frame = Frame { a: extent_a(cells, boundaries), b: extent_b(cells, boundaries), style: style.clone() };
    let mu = style.mu.or_else(|| boundaries.first().map(|p| p.mu));

    let mut out = String::new();
    let (w, h) = (style.width, style.height);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}">"#
    );
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{w:.0}" height="{h:.0}" fill="white"/>"#);
    shade(&mut out, &frame, cells);
    if let Some(mu) = mu {
        lock_lines(&mut out, &frame, mu);
    }
    curves(&mut out, &frame, boundaries);
    axes(&mut out, &frame);
    out.push_str("</svg>\n");
    Ok(out)
}

fn extent_a(cells: &[ScanCell], boundaries: &[BoundaryPoint]) -> (f64, f64) {
    if !cells.is_empty() {
        return min_max(cells.iter().map(|c| c.a));
    }
    min_max(boundaries.iter().flat_map(|p| [p.a0, p.api]))
}

fn extent_b(cells: &[ScanCell], boundaries: &[BoundaryPoint]) -> (f64, f64) {
    if !cells.is_empty() {
        return min_max(cells.iter().map(|c| c.b));
    }
    min_max(boundaries.iter().map(|p| p.b))
}

fn min_max(xs: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = xs
        .filter(|x| x.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

/// Distinct sorted coordinates along one axis.
fn axis_nodes(xs: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = xs.collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Half-way points between neighbouring nodes, clamped to the outer nodes.
fn cell_edges(nodes: &[f64], i: usize) -> (f64, f64) {
    let lo = if i == 0 { nodes[0] } else { 0.5 * (nodes[i - 1] + nodes[i]) };
    let hi = if i + 1 == nodes.len() { nodes[i] } else { 0.5 * (nodes[i] + nodes[i + 1]) };
    (lo, hi)
}

fn shade(out: &mut String, f: &Frame, cells: &[ScanCell]) {
    if cells.is_empty() {
        return;
    }
    let a_nodes = axis_nodes(cells.iter().map(|c| c.a));
    let b_nodes = axis_nodes(cells.iter().map(|c| c.b));
    let mut rows: BTreeMap<usize, Vec<(usize, Option<i64>)>> = BTreeMap::new();
    for c in cells {
        let i = a_nodes.partition_point(|x| *x < c.a);
        let j = b_nodes.partition_point(|x| *x < c.b);
        rows.entry(j).or_default().push((i, if c.locked { c.k } else { None }));
    }
    out.push_str("<g stroke=\"none\">\n");
    for (j, mut row) in rows {
        row.sort_by_key(|p| p.0);
        let (b_lo, b_hi) = cell_edges(&b_nodes, j);
        let (y0, y1) = (f.y(b_hi), f.y(b_lo));
        // merge runs of equal k into one rectangle
        let mut start = 0;
        while start < row.len() {
            let mut end = start;
            while end + 1 < row.len() && row[end + 1].1 == row[start].1 && row[end + 1].0 == row[end].0 + 1 {
                end += 1;
            }
            if let Some(k) = row[start].1 {
                let (a_lo, _) = cell_edges(&a_nodes, row[start].0);
                let (_, a_hi) = cell_edges(&a_nodes, row[end].0);
                let fill = if k.rem_euclid(2) == 0 { &f.style.fill_even } else { &f.style.fill_odd };
                let _ = writeln!(
                    out,
                    r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{fill}"/>"#,
                    f.x(a_lo),
                    y0,
                    f.x(a_hi) - f.x(a_lo),
                    y1 - y0
                );
            }
            start = end + 1;
        }
    }
    out.push_str("</g>\n");
}

fn lock_lines(out: &mut String, f: &Frame, mu: f64) {
    out.push_str("<g stroke=\"black\" stroke-width=\"0.6\" stroke-dasharray=\"1 3\">\n");
    for k in f.style.k_range.0..=f.style.k_range.1 {
        let a = k as f64 * mu;
        if f.inside_a(a) {
            let x = f.x(a);
            let _ = writeln!(out, r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}"/>"#, f.y(f.b.0), f.y(f.b.1));
        }
    }
    out.push_str("</g>\n");
}

fn polyline(out: &mut String, f: &Frame, pts: &[(f64, f64)], attrs: &str) {
    if pts.len() < 2 {
        return;
    }
    let mut s = String::new();
    for (i, (a, b)) in pts.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{:.2},{:.2}", f.x(*a), f.y(*b));
    }
    let _ = writeln!(out, r#"<polyline fill="none" {attrs} points="{s}"/>"#);
}

fn curves(out: &mut String, f: &Frame, boundaries: &[BoundaryPoint]) {
    let mut by_k: BTreeMap<i64, Vec<&BoundaryPoint>> = BTreeMap::new();
    for p in boundaries {
        by_k.entry(p.k).or_default().push(p);
    }
    for pts in by_k.values_mut() {
        pts.sort_by(|l, r| l.b.total_cmp(&r.b));
        let solid = r#"stroke="black" stroke-width="1.2""#;
        let dashed = r##"stroke="#1f4e9e" stroke-width="0.9" stroke-dasharray="5 3""##;
        let a0: Vec<(f64, f64)> = pts.iter().map(|p| (p.a0, p.b)).collect();
        let api: Vec<(f64, f64)> = pts.iter().map(|p| (p.api, p.b)).collect();
        polyline(out, f, &a0, solid);
        polyline(out, f, &api, solid);
        let keep = |p: &&&BoundaryPoint| p.b >= f.style.bessel_min_b && !p.closed_form;
        let p0: Vec<(f64, f64)> = pts.iter().filter(keep).map(|p| (p.bessel_pred_0, p.b)).collect();
        let ppi: Vec<(f64, f64)> = pts.iter().filter(keep).map(|p| (p.bessel_pred_pi, p.b)).collect();
        polyline(out, f, &p0, dashed);
        polyline(out, f, &ppi, dashed);
    }
}

fn ticks(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn axes(out: &mut String, f: &Frame) {
    let (x0, x1) = (f.x(f.a.0), f.x(f.a.1));
    let (y0, y1) = (f.y(f.b.0), f.y(f.b.1));
    out.push_str("<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n");
    let _ = writeln!(out, r#"<rect x="{x0:.2}" y="{y1:.2}" width="{:.2}" height="{:.2}"/>"#, x1 - x0, y0 - y1);
    for a in ticks(f.a.0, f.a.1, f.style.ticks) {
        let x = f.x(a);
        let _ = writeln!(out, r#"<line x1="{x:.2}" y1="{y0:.2}" x2="{x:.2}" y2="{:.2}"/>"#, y0 + 5.0);
    }
    for b in ticks(f.b.0, f.b.1, f.style.ticks) {
        let y = f.y(b);
        let _ = writeln!(out, r#"<line x1="{:.2}" y1="{y:.2}" x2="{x0:.2}" y2="{y:.2}"/>"#, x0 - 5.0);
    }
    out.push_str("</g>\n");
    out.push_str("<g font-family=\"sans-serif\" font-size=\"11\" fill=\"black\">\n");
    for a in ticks(f.a.0, f.a.1, f.style.ticks) {
        let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{a:.2}</text>"#, f.x(a), y0 + 18.0);
    }
    for b in ticks(f.b.0, f.b.1, f.style.ticks) {
        let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{b:.2}</text>"#, x0 - 8.0, f.y(b) + 4.0);
    }
    let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">a</text>"#, 0.5 * (x0 + x1), y0 + 36.0);
    let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">b</text>"#, x0 - 36.0, 0.5 * (y0 + y1));
    out.push_str("</g>\n");
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell(a: f64, b: f64, k: Option<i64>) -> ScanCell {
        ScanCell { a, b, rho: k.map(|k| k as f64).unwrap_or(0.5), locked: k.is_some(), k }
    }

    #[test]
    fn empty_input_rejected() {
        assert!(render_svg(&[], &[], &SvgStyle::default()).is_err());
    }

    #[test]
    fn runs_are_merged() {
        let cells = vec![cell(0.0, 0.0, Some(0)), cell(1.0, 0.0, Some(0)), cell(2.0, 0.0, None), cell(3.0, 0.0, Some(1))];
        let svg = render_svg(&cells, &[], &SvgStyle { mu: Some(1.0), ..SvgStyle::default() }).unwrap();
        assert_eq!(svg.matches("#b0b0b0").count(), 1);
        assert_eq!(svg.matches("#d0d0d0").count(), 1);
        assert!(svg.contains("stroke-dasharray=\"1 3\""));
        assert!(!svg.contains("<polyline"));
    }

    #[test]
    fn scan_only_has_no_curves() {
        let cells = vec![cell(0.0, 0.0, Some(0)), cell(1.0, 1.0, None)];
        let svg = render_svg(&cells, &[], &SvgStyle::default()).unwrap();
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert!(!svg.contains("<polyline"));
    }
}
