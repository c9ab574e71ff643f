//! Minimal standalone SVG 1.1 plots. Axes are drawn with `line` and `text`
//! elements only, so each data series maps to exactly one `polyline` (line
//! plots) or one `circle` per point (spectra).

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 44.0;
const BOTTOM: f64 = 56.0;
const TICKS: usize = 5;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            label: label.into(),
            points,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlotKind {
    Line,
    /// Both axes logarithmic; the fitted slope, if given, is annotated.
    LogLog { slope: Option<f64> },
    /// One marker per point, e.g. eigenvalue against its index.
    Spectrum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub kind: PlotKind,
}

impl Plot {
    pub fn new(kind: PlotKind, title: &str, x_label: &str, y_label: &str) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            kind,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SvgError {
    #[error("nothing to plot: the series list is empty")]
    NoSeries,
    #[error("series {0:?} has no points")]
    EmptySeries(String),
    #[error("series {0:?} contains a non-finite value")]
    NonFinite(String),
    #[error("series {0:?} has a non-positive value on a log axis")]
    NonPositive(String),
}

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>, log: bool) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values {
            let v = if log { v.log10() } else { v };
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if hi - lo < 1e-12 * (1.0 + lo.abs()) {
            lo -= 0.5;
            hi += 0.5;
        } else {
            let pad = 0.05 * (hi - lo);
            lo -= pad;
            hi += pad;
        }
        Self { lo, hi, log }
    }

    /// Position in `[0, 1]` along the axis.
    fn unit(&self, v: f64) -> f64 {
        let v = if self.log { v.log10() } else { v };
        (v - self.lo) / (self.hi - self.lo)
    }

    fn tick_label(&self, i: usize) -> (f64, String) {
        let t = i as f64 / (TICKS - 1) as f64;
        let v = self.lo + t * (self.hi - self.lo);
        let label = if self.log { format!("1e{v:.1}") } else { format_number(v) };
        (t, label)
    }
}

fn format_number(v: f64) -> String {
    if v == 0.0 || (1e-3..1e4).contains(&v.abs()) {
        format!("{v:.3}")
    } else {
        format!("{v:.2e}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn check(series: &[Series], log: bool) -> Result<(), SvgError> {
    if series.is_empty() {
        return Err(SvgError::NoSeries);
    }
    for s in series {
        if s.points.is_empty() {
            return Err(SvgError::EmptySeries(s.label.clone()));
        }
        if s.points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(SvgError::NonFinite(s.label.clone()));
        }
        if log && s.points.iter().any(|&(x, y)| x <= 0.0 || y <= 0.0) {
            return Err(SvgError::NonPositive(s.label.clone()));
        }
    }
    Ok(())
}

/// Renders `series` as an SVG document. Output depends only on the input.
pub fn emit_svg(series: &[Series], plot: &Plot) -> Result<String, SvgError> {
    let log = matches!(plot.kind, PlotKind::LogLog { .. });
    check(series, log)?;
    let all = || series.iter().flat_map(|s| s.points.iter());
    let xa = Axis::fit(all().map(|p| p.0), log);
    let ya = Axis::fit(all().map(|p| p.1), log);
    let (pw, ph) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
    let px = |x: f64| LEFT + xa.unit(x) * pw;
    let py = |y: f64| TOP + (1.0 - ya.unit(y)) * ph;

    let mut out = String::new();
    // writing into a String cannot fail
    let w = &mut out;
    let _ = writeln!(w, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(w, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        w,
        r#"<text x="{:.1}" y="24" font-family="sans-serif" font-size="15" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(&plot.title)
    );

    let _ = writeln!(w, r#"<g stroke="black" stroke-width="1">"#);
    let _ = writeln!(w, r#"<line x1="{LEFT}" y1="{:.1}" x2="{:.1}" y2="{:.1}"/>"#, TOP + ph, LEFT + pw, TOP + ph);
    let _ = writeln!(w, r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{:.1}"/>"#, TOP + ph);
    for i in 0..TICKS {
        let (t, _) = xa.tick_label(i);
        let x = LEFT + t * pw;
        let _ = writeln!(w, r#"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}"/>"#, TOP + ph, TOP + ph + 5.0);
        let (t, _) = ya.tick_label(i);
        let y = TOP + (1.0 - t) * ph;
        let _ = writeln!(w, r#"<line x1="{:.1}" y1="{y:.1}" x2="{LEFT}" y2="{y:.1}"/>"#, LEFT - 5.0);
    }
    let _ = writeln!(w, "</g>");

    let _ = writeln!(w, r#"<g font-family="sans-serif" font-size="11">"#);
    for i in 0..TICKS {
        let (t, label) = xa.tick_label(i);
        let _ = writeln!(
            w,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{label}</text>"#,
            LEFT + t * pw,
            TOP + ph + 18.0
        );
        let (t, label) = ya.tick_label(i);
        let _ = writeln!(
            w,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{label}</text>"#,
            LEFT - 8.0,
            TOP + (1.0 - t) * ph + 4.0
        );
    }
    let _ = writeln!(
        w,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="13">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 14.0,
        escape(&plot.x_label)
    );
    let _ = writeln!(
        w,
        r#"<text x="18" y="{:.1}" text-anchor="middle" font-size="13" transform="rotate(-90 18 {:.1})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(&plot.y_label)
    );
    let _ = writeln!(w, "</g>");

    for (k, s) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        match plot.kind {
            PlotKind::Spectrum => {
                let _ = writeln!(w, r#"<g fill="{color}">"#);
                for &(x, y) in &s.points {
                    let _ = writeln!(w, r#"<circle cx="{:.2}" cy="{:.2}" r="3.5"/>"#, px(x), py(y));
                }
                let _ = writeln!(w, "</g>");
            }
            PlotKind::Line | PlotKind::LogLog { .. } => {
                let coords: Vec<String> = s.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
                let _ = writeln!(
                    w,
                    r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                    coords.join(" ")
                );
            }
        }
        let _ = writeln!(
            w,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" fill="{color}">{}</text>"#,
            LEFT + 10.0,
            TOP + 14.0 + 14.0 * k as f64,
            escape(&s.label)
        );
    }

    if let PlotKind::LogLog { slope: Some(slope) } = plot.kind {
        let _ = writeln!(
            w,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12" text-anchor="end">fitted slope {slope:.3}</text>"#,
            LEFT + pw - 8.0,
            TOP + ph - 10.0
        );
    }
    let _ = writeln!(w, "</svg>");
    Ok(out)
}
