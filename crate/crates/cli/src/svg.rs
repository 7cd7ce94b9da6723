//! Minimal static SVG panels: a line plot for envelope series and a bar
//! histogram for densities. Output is a pure function of the data.

use std::fmt::Write;

use qho_core::envelope::EmpiricalDensity;

const W: f64 = 480.0;
const H: f64 = 320.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 16.0;
const TOP: f64 = 36.0;
const BOTTOM: f64 = 48.0;

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        let pad = |a: f64, b: f64| if b > a { (a, b) } else { (a - 0.5, a + 0.5) };
        let (x0, x1) = pad(x0, x1);
        let (y0, y1) = pad(y0, y1);
        Self { x0, x1, y0, y1 }
    }

    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x0) / (self.x1 - self.x0) * (W - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        H - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (H - TOP - BOTTOM)
    }
}

fn open(out: &mut String, panel: &str, title: &str, f: &Frame, xlabel: &str, ylabel: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" data-panel="{panel}">"#
    );
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{title}</text>"#, W / 2.0);
    let (l, r, t, b) = (LEFT, W - RIGHT, TOP, H - BOTTOM);
    let _ = writeln!(out, r#"<path d="M{l} {t} L{l} {b} L{r} {b}" fill="none" stroke="black" stroke-width="1"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="12">{xlabel}</text>"#,
        (l + r) / 2.0,
        H - 10.0
    );
    let _ = writeln!(
        out,
        r#"<text x="14" y="{0}" text-anchor="middle" font-size="12" transform="rotate(-90 14 {0})">{ylabel}</text>"#,
        (t + b) / 2.0
    );
    for (v, anchor, x, y) in [
        (f.x0, "start", l, b + 16.0),
        (f.x1, "end", r, b + 16.0),
        (f.y0, "end", l - 4.0, b),
        (f.y1, "end", l - 4.0, t + 10.0),
    ] {
        let _ = writeln!(out, r#"<text x="{x}" y="{y}" text-anchor="{anchor}" font-size="10">{v:.3e}</text>"#);
    }
}

/// Line plot of `ys` against `xs`.
pub fn line_panel(panel: &str, title: &str, xlabel: &str, ylabel: &str, xs: &[f64], ys: &[f64]) -> String {
    let lo = ys.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let f = Frame::new(xs[0], xs[xs.len() - 1], lo.min(0.0), hi);
    let mut out = String::new();
    open(&mut out, panel, title, &f, xlabel, ylabel);
    out.push_str(r#"<polyline fill="none" stroke="steelblue" stroke-width="1" points=""#);
    for (i, (&x, &y)) in xs.iter().zip(ys).enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{:.2},{:.2}", f.px(x), f.py(y));
    }
    out.push_str("\"/>\n</svg>\n");
    out
}

/// One bar per bin, zero-height bars included, heights are probability
/// densities (probability over bin width).
pub fn histogram_panel(panel: &str, title: &str, xlabel: &str, d: &EmpiricalDensity<f64>) -> String {
    let (x0, x1) = d.support();
    let heights: Vec<f64> = d.edges().windows(2).zip(d.probabilities()).map(|(e, p)| p / (e[1] - e[0])).collect();
    let hi = heights.iter().cloned().fold(0.0, f64::max);
    let f = Frame::new(x0, x1, 0.0, hi);
    let mut out = String::new();
    open(&mut out, panel, title, &f, xlabel, "density");
    for (e, h) in d.edges().windows(2).zip(&heights) {
        let (a, b) = (f.px(e[0]), f.px(e[1]));
        let top = f.py(*h);
        let _ = writeln!(
            out,
            r#"<rect class="bar" x="{a:.2}" y="{top:.2}" width="{:.2}" height="{:.2}" fill="gray" stroke="black" stroke-width="0.3"/>"#,
            b - a,
            f.py(0.0) - top
        );
    }
    out.push_str("</svg>\n");
    out
}
