//! Self-contained SVG plots.

use std::fmt::Write as _;

use crate::diagnostics::LifshitzFit;
use crate::error::{Error, Result};
use crate::spectra::StepFunction;

const W: f64 = 640.0;
const H: f64 = 400.0;
const MARGIN: f64 = 60.0;

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn fit(xs: impl Iterator<Item = f64> + Clone, ys: impl Iterator<Item = f64> + Clone) -> Self {
        let (x0, x1) = span(xs);
        let (y0, y1) = span(ys);
        Self { x0, x1, y0, y1 }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) / (self.x1 - self.x0) * (W - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        H - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (H - 2.0 * MARGIN)
    }
}

/// Range padded by 5% on each side; a single value gets a unit-width range.
fn span(v: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = v.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    if hi > lo {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        (lo - 0.5, lo + 0.5)
    }
}

fn open(s: &mut String, title: &str, xlabel: &str, ylabel: &str, f: &Frame) {
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, escape(title));
    let (l, r, t, b) = (MARGIN, W - MARGIN, MARGIN, H - MARGIN);
    let _ = writeln!(s, r#"<polyline points="{l},{t} {l},{b} {r},{b}" fill="none" stroke="black"/>"#);
    for (v, x) in [(f.x0, l), (f.x1, r)] {
        let _ = writeln!(s, r#"<text x="{x}" y="{}" text-anchor="middle">{}</text>"#, b + 16.0, num(v));
    }
    for (v, y) in [(f.y0, b), (f.y1, t)] {
        let _ = writeln!(s, r#"<text x="{}" y="{y}" text-anchor="end">{}</text>"#, l - 6.0, num(v));
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, W / 2.0, H - 16.0, escape(xlabel));
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        H / 2.0,
        H / 2.0,
        escape(ylabel)
    );
}

fn num(v: f64) -> String {
    format!("{v:.3}")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Step plot: one horizontal run per level and one vertical rise per breakpoint.
pub fn ids_curve(curve: &StepFunction, title: &str) -> Result<String> {
    if curve.is_empty() {
        return Err(Error::Empty("step function with no breakpoints"));
    }
    let bps = curve.breakpoints();
    let ys = curve.cumulative();
    let f = Frame::fit(bps.iter().copied(), [0.0, curve.final_value()].into_iter());
    let mut s = String::new();
    open(&mut s, title, "lambda", "cumulative", &f);
    let mut path = format!("M{:.2},{:.2}", f.px(f.x0), f.py(0.0));
    for (&b, &c) in bps.iter().zip(ys) {
        let _ = write!(path, " H{:.2} V{:.2}", f.px(b), f.py(c));
    }
    let _ = write!(path, " H{:.2}", f.px(f.x1));
    let _ = writeln!(s, r#"<path d="{path}" fill="none" stroke="steelblue" stroke-width="1.5"/>"#);
    s.push_str("</svg>\n");
    Ok(s)
}

/// Line plot with one marker per point.
pub fn line_plot(points: &[(f64, f64)], title: &str, xlabel: &str, ylabel: &str) -> Result<String> {
    if points.is_empty() {
        return Err(Error::Empty("no points to plot"));
    }
    let f = Frame::fit(points.iter().map(|p| p.0), points.iter().map(|p| p.1));
    let mut s = String::new();
    open(&mut s, title, xlabel, ylabel, &f);
    let pts: Vec<String> = points.iter().map(|&(x, y)| format!("{:.2},{:.2}", f.px(x), f.py(y))).collect();
    let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="steelblue"/>"#, pts.join(" "));
    for &(x, y) in points {
        let _ = writeln!(
            s,
            r#"<circle class="point" cx="{:.2}" cy="{:.2}" r="3" fill="steelblue"><title>({}, {})</title></circle>"#,
            f.px(x),
            f.py(y),
            num(x),
            num(y)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// Scatter of `(log E, log(−log G))` with the fitted line and its slope.
pub fn loglog_lifshitz(fit: &LifshitzFit) -> Result<String> {
    let pts: Vec<(f64, f64)> = fit.points.iter().filter_map(|p| p.loglog_g.map(|y| (p.log_e, y))).collect();
    if pts.is_empty() {
        return Err(Error::Empty("no usable points"));
    }
    let line = |x: f64| fit.intercept + fit.slope * x;
    let f = Frame::fit(
        pts.iter().map(|p| p.0),
        pts.iter().map(|p| p.1).chain(pts.iter().map(|p| line(p.0))),
    );
    let mut s = String::new();
    open(&mut s, "low-energy fit", "log E", "log(-log G)", &f);
    for &(x, y) in &pts {
        let _ = writeln!(
            s,
            r#"<circle class="point" cx="{:.2}" cy="{:.2}" r="3" fill="steelblue"/>"#,
            f.px(x),
            f.py(y)
        );
    }
    let (a, b) = (pts[0].0, pts[pts.len() - 1].0);
    let _ = writeln!(
        s,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="firebrick"/>"#,
        f.px(a),
        f.py(line(a)),
        f.px(b),
        f.py(line(b))
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" fill="firebrick">slope = {:.3}</text>"#,
        MARGIN + 10.0,
        MARGIN + 14.0,
        fit.slope
    );
    s.push_str("</svg>\n");
    Ok(s)
}
