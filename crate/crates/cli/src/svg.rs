//! Bare-bones SVG: scatter dots, polylines and axes. Meant for a quick look;
//! the CSV files carry the data.

use std::fmt::Write;

use nswishart::stats::Histogram;
use num_complex::Complex64;

const SIZE: f64 = 480.0;
const MARGIN: f64 = 40.0;

pub enum Series {
    Dots { points: Vec<(f64, f64)>, color: &'static str },
    Line { points: Vec<(f64, f64)>, color: &'static str, dashed: bool, closed: bool },
}

impl Series {
    pub fn dots(values: &[Complex64], color: &'static str) -> Self {
        Series::Dots { points: values.iter().map(|z| (z.re, z.im)).collect(), color }
    }

    pub fn contour(points: &[Complex64], color: &'static str, dashed: bool) -> Self {
        Series::Line { points: points.iter().map(|z| (z.re, z.im)).collect(), color, dashed, closed: true }
    }

    pub fn curve(points: Vec<(f64, f64)>, color: &'static str) -> Self {
        Series::Line { points, color, dashed: false, closed: false }
    }

    /// Staircase outline of a 1-D histogram.
    pub fn steps(h: &Histogram, color: &'static str) -> Self {
        let mut points = vec![(h.edges[0], 0.0)];
        for (i, d) in h.normalized.iter().enumerate() {
            points.push((h.edges[i], *d));
            points.push((h.edges[i + 1], *d));
        }
        points.push((h.edges[h.edges.len() - 1], 0.0));
        Series::Line { points, color, dashed: false, closed: false }
    }

    fn points(&self) -> &[(f64, f64)] {
        match self {
            Series::Dots { points, .. } | Series::Line { points, .. } => points,
        }
    }
}

pub struct Plot {
    pub title: String,
    pub series: Vec<Series>,
    /// Same scale on both axes (for the complex plane).
    pub equal_aspect: bool,
}

impl Plot {
    pub fn plane(title: impl Into<String>, series: Vec<Series>) -> Self {
        Plot { title: title.into(), series, equal_aspect: true }
    }

    pub fn graph(title: impl Into<String>, series: Vec<Series>) -> Self {
        Plot { title: title.into(), series, equal_aspect: false }
    }

    fn bounds(&self) -> (f64, f64, f64, f64) {
        let all = self.series.iter().flat_map(|s| s.points().iter()).filter(|p| p.0.is_finite() && p.1.is_finite());
        let (mut x0, mut x1, mut y0, mut y1) = all.fold(
            (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
            |(a, b, c, d), p| (a.min(p.0), b.max(p.0), c.min(p.1), d.max(p.1)),
        );
        if x0 > x1 {
            (x0, x1, y0, y1) = (-1.0, 1.0, -1.0, 1.0);
        }
        if x1 - x0 < 1e-12 {
            (x0, x1) = (x0 - 0.5, x1 + 0.5);
        }
        if y1 - y0 < 1e-12 {
            (y0, y1) = (y0 - 0.5, y1 + 0.5);
        }
        if self.equal_aspect {
            let half = 0.5 * (x1 - x0).max(y1 - y0);
            let (cx, cy) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
            (x0, x1, y0, y1) = (cx - half, cx + half, cy - half, cy + half);
        }
        let (px, py) = (0.04 * (x1 - x0), 0.04 * (y1 - y0));
        (x0 - px, x1 + px, y0 - py, y1 + py)
    }

    pub fn render(&self) -> String {
        let (x0, x1, y0, y1) = self.bounds();
        let span = SIZE - 2.0 * MARGIN;
        let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * span;
        let sy = |y: f64| SIZE - MARGIN - (y - y0) / (y1 - y0) * span;
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<rect x="{MARGIN}" y="{MARGIN}" width="{span}" height="{span}" fill="none" stroke="black" stroke-width="0.5"/>"#
        );
        if x0 < 0.0 && x1 > 0.0 {
            let _ = writeln!(
                s,
                r##"<line x1="{0:.2}" y1="{MARGIN}" x2="{0:.2}" y2="{1}" stroke="#999" stroke-width="0.5"/>"##,
                sx(0.0),
                SIZE - MARGIN
            );
        }
        if y0 < 0.0 && y1 > 0.0 {
            let _ = writeln!(
                s,
                r##"<line x1="{MARGIN}" y1="{0:.2}" x2="{1}" y2="{0:.2}" stroke="#999" stroke-width="0.5"/>"##,
                sy(0.0),
                SIZE - MARGIN
            );
        }
        let label = |s: &mut String, x: f64, y: f64, anchor: &str, text: String| {
            let _ = writeln!(
                s,
                r#"<text x="{x:.1}" y="{y:.1}" font-size="10" font-family="sans-serif" text-anchor="{anchor}">{text}</text>"#
            );
        };
        label(&mut s, MARGIN, SIZE - MARGIN + 14.0, "start", format!("{x0:.3}"));
        label(&mut s, SIZE - MARGIN, SIZE - MARGIN + 14.0, "end", format!("{x1:.3}"));
        label(&mut s, MARGIN - 4.0, SIZE - MARGIN, "end", format!("{y0:.3}"));
        label(&mut s, MARGIN - 4.0, MARGIN + 8.0, "end", format!("{y1:.3}"));
        label(&mut s, SIZE / 2.0, MARGIN - 12.0, "middle", escape(&self.title));

        for series in &self.series {
            match series {
                Series::Dots { points, color } => {
                    let _ = writeln!(s, r#"<g fill="{color}" fill-opacity="0.6">"#);
                    for (x, y) in points {
                        let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="1.2"/>"#, sx(*x), sy(*y));
                    }
                    let _ = writeln!(s, "</g>");
                }
                Series::Line { points, color, dashed, closed } => {
                    let coords: Vec<String> =
                        points.iter().map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y))).collect();
                    let tag = if *closed { "polygon" } else { "polyline" };
                    let dash = if *dashed { r#" stroke-dasharray="5,3""# } else { "" };
                    let _ = writeln!(
                        s,
                        r#"<{tag} points="{}" fill="none" stroke="{color}" stroke-width="1.2"{dash}/>"#,
                        coords.join(" ")
                    );
                }
            }
        }
        s.push_str("</svg>\n");
        s
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
