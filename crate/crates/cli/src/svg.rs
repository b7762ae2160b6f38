//! Minimal SVG plotter: lines, markers, histogram bars and interval rows on
//! linear axes.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 400.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 36.0;
const BOTTOM: f64 = 48.0;

const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

enum Layer {
    Line(Vec<(f64, f64)>),
    Markers(Vec<(f64, f64)>),
    Bars(Vec<(f64, f64, f64)>),
    HLine(f64),
    Intervals(Vec<(f64, f64, f64)>),
}

pub struct Plot {
    title: String,
    xlabel: String,
    ylabel: String,
    layers: Vec<(Layer, usize)>,
}

impl Plot {
    pub fn new(title: &str, xlabel: &str, ylabel: &str) -> Self {
        Plot {
            title: title.into(),
            xlabel: xlabel.into(),
            ylabel: ylabel.into(),
            layers: Vec::new(),
        }
    }

    pub fn line(mut self, pts: Vec<(f64, f64)>, color: usize) -> Self {
        self.layers.push((Layer::Line(pts), color));
        self
    }

    pub fn markers(mut self, pts: Vec<(f64, f64)>, color: usize) -> Self {
        self.layers.push((Layer::Markers(pts), color));
        self
    }

    /// Bars `(lo, hi, height)`.
    pub fn bars(mut self, bars: Vec<(f64, f64, f64)>, color: usize) -> Self {
        self.layers.push((Layer::Bars(bars), color));
        self
    }

    pub fn hline(mut self, y: f64, color: usize) -> Self {
        self.layers.push((Layer::HLine(y), color));
        self
    }

    /// Horizontal segments `(lo, hi, row)`; a zero-length segment is drawn as a dot.
    pub fn intervals(mut self, segs: Vec<(f64, f64, f64)>, color: usize) -> Self {
        self.layers.push((Layer::Intervals(segs), color));
        self
    }

    fn bounds(&self) -> ((f64, f64), (f64, f64)) {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        let mut add = |x: f64, y: f64| {
            if x.is_finite() {
                x0 = x0.min(x);
                x1 = x1.max(x);
            }
            if y.is_finite() {
                y0 = y0.min(y);
                y1 = y1.max(y);
            }
        };
        for (layer, _) in &self.layers {
            match layer {
                Layer::Line(p) | Layer::Markers(p) => p.iter().for_each(|&(x, y)| add(x, y)),
                Layer::Bars(b) => b.iter().for_each(|&(lo, hi, h)| {
                    add(lo, 0.0);
                    add(hi, h);
                }),
                Layer::HLine(y) => add(f64::NAN, *y),
                Layer::Intervals(s) => s.iter().for_each(|&(lo, hi, r)| {
                    add(lo, r - 0.5);
                    add(hi, r + 0.5);
                }),
            }
        }
        (pad(x0, x1), pad(y0, y1))
    }

    pub fn render(&self) -> String {
        let ((x0, x1), (y0, y1)) = self.bounds();
        let pw = W - LEFT - RIGHT;
        let ph = H - TOP - BOTTOM;
        let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">"#
        );
        let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="20" text-anchor="middle" font-size="13">{}</text>"#,
            W / 2.0,
            esc(&self.title)
        );
        let _ = writeln!(
            s,
            r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
        );
        for t in ticks(x0, x1) {
            let x = sx(t);
            let _ = writeln!(
                s,
                r#"<line x1="{x:.2}" y1="{}" x2="{x:.2}" y2="{}" stroke="black"/>"#,
                TOP + ph,
                TOP + ph + 4.0
            );
            let _ = writeln!(
                s,
                r#"<text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#,
                TOP + ph + 16.0,
                label(t)
            );
        }
        for t in ticks(y0, y1) {
            let y = sy(t);
            let _ = writeln!(
                s,
                r#"<line x1="{}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/>"#,
                LEFT - 4.0
            );
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
                LEFT - 6.0,
                y + 4.0,
                label(t)
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            LEFT + pw / 2.0,
            H - 10.0,
            esc(&self.xlabel)
        );
        let _ = writeln!(
            s,
            r#"<text x="14" y="{0}" text-anchor="middle" transform="rotate(-90 14 {0})">{1}</text>"#,
            TOP + ph / 2.0,
            esc(&self.ylabel)
        );
        for (layer, c) in &self.layers {
            let color = PALETTE[c % PALETTE.len()];
            match layer {
                Layer::Line(p) => {
                    let pts: Vec<String> = p.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
                    let _ = writeln!(
                        s,
                        r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                        pts.join(" ")
                    );
                }
                Layer::Markers(p) => {
                    for &(x, y) in p {
                        let _ = writeln!(
                            s,
                            r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                            sx(x),
                            sy(y)
                        );
                    }
                }
                Layer::Bars(b) => {
                    for &(lo, hi, h) in b {
                        let (top, base) = (sy(h.max(0.0)), sy(h.min(0.0)));
                        let _ = writeln!(
                            s,
                            r#"<rect x="{:.2}" y="{top:.2}" width="{:.2}" height="{:.2}" fill="{color}" fill-opacity="0.5"/>"#,
                            sx(lo),
                            sx(hi) - sx(lo),
                            base - top
                        );
                    }
                }
                Layer::HLine(y) => {
                    let _ = writeln!(
                        s,
                        r#"<line x1="{LEFT}" y1="{0:.2}" x2="{1}" y2="{0:.2}" stroke="{color}" stroke-dasharray="4 3"/>"#,
                        sy(*y),
                        LEFT + pw
                    );
                }
                Layer::Intervals(segs) => {
                    for &(lo, hi, r) in segs {
                        if hi > lo {
                            let _ = writeln!(
                                s,
                                r#"<line x1="{:.2}" y1="{2:.2}" x2="{:.2}" y2="{2:.2}" stroke="{color}" stroke-width="6"/>"#,
                                sx(lo),
                                sx(hi),
                                sy(r)
                            );
                        } else {
                            let _ = writeln!(
                                s,
                                r#"<circle cx="{:.2}" cy="{:.2}" r="5" fill="{color}"/>"#,
                                sx(lo),
                                sy(r)
                            );
                        }
                    }
                }
            }
        }
        s.push_str("</svg>\n");
        s
    }
}

fn pad(lo: f64, hi: f64) -> (f64, f64) {
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    let span = if hi > lo { hi - lo } else { lo.abs().max(1.0) };
    (lo - 0.05 * span, hi + 0.05 * span)
}

/// Round tick positions covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn label(v: f64) -> String {
    let s = format!("{:.4}", v);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
