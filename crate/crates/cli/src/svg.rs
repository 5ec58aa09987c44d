//! Minimal self-contained SVG line charts for the optional plot artifacts.
//! Deterministic output: same data, same bytes.

fn fmt_tick(x: f64) -> String {
    if x == 0.0 {
        return String::from("0");
    }
    let a = x.abs();
    if (1e-3..1e5).contains(&a) {
        let s = format!("{x:.4}");
        let s = s.trim_end_matches('0').trim_end_matches('.').to_string();
        if s.is_empty() || s == "-" {
            String::from("0")
        } else {
            s
        }
    } else {
        format!("{x:.2e}")
    }
}

fn fmt_coord(x: f64) -> String {
    format!("{x:.2}")
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub color: &'static str,
    pub points: Vec<(f64, f64)>,
    /// Per-point half-height of an error bar (same length as `points`),
    /// or empty for a plain polyline.
    pub bars: Vec<f64>,
    /// Draw markers at the points instead of connecting them.
    pub scatter: bool,
}

impl Series {
    pub fn line(label: &str, color: &'static str, points: Vec<(f64, f64)>) -> Self {
        Self { label: label.to_string(), color, points, bars: Vec::new(), scatter: false }
    }
    pub fn scatter_with_bars(
        label: &str,
        color: &'static str,
        points: Vec<(f64, f64)>,
        bars: Vec<f64>,
    ) -> Self {
        Self { label: label.to_string(), color, points, bars, scatter: true }
    }
}

#[derive(Debug, Clone)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    /// Optional horizontal reference (dashed), e.g. a martingale's mean0.
    pub href: Option<(f64, String)>,
}

const W: f64 = 720.0;
const H: f64 = 440.0;
const ML: f64 = 70.0; // left margin
const MR: f64 = 20.0;
const MT: f64 = 40.0;
const MB: f64 = 55.0;

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    if !(span > 0.0) {
        return vec![lo];
    }
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let step = mag
        * if norm < 1.5 {
            1.0
        } else if norm < 3.5 {
            2.0
        } else if norm < 7.5 {
            5.0
        } else {
            10.0
        };
    let first = (lo / step).ceil() * step;
    let mut out = Vec::new();
    let mut t = first;
    while t <= hi + 1e-9 * span {
        // snap near-zero ticks produced by roundoff
        out.push(if t.abs() < 1e-12 * span { 0.0 } else { t });
        t += step;
    }
    out
}

impl Chart {
    pub fn render(&self) -> String {
        let mut xs: Vec<f64> = Vec::new();
        let mut ys: Vec<f64> = Vec::new();
        for s in &self.series {
            for (i, &(x, y)) in s.points.iter().enumerate() {
                xs.push(x);
                let bar = s.bars.get(i).copied().unwrap_or(0.0);
                ys.push(y - bar);
                ys.push(y + bar);
            }
        }
        if let Some((y, _)) = self.href {
            ys.push(y);
        }
        let (mut x0, mut x1) = min_max(&xs);
        let (mut y0, mut y1) = min_max(&ys);
        if x1 <= x0 {
            x0 -= 0.5;
            x1 += 0.5;
        }
        if y1 <= y0 {
            y0 -= 0.5;
            y1 += 0.5;
        }
        let xpad = 0.04 * (x1 - x0);
        let ypad = 0.08 * (y1 - y0);
        x0 -= xpad;
        x1 += xpad;
        y0 -= ypad;
        y1 += ypad;

        let px = |x: f64| ML + (x - x0) / (x1 - x0) * (W - ML - MR);
        let py = |y: f64| H - MB - (y - y0) / (y1 - y0) * (H - MT - MB);

        let mut b = String::new();
        b.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" \
viewBox=\"0 0 {W} {H}\" font-family=\"sans-serif\" font-size=\"12\">\n"
        ));
        b.push_str(&format!(
            "<rect x=\"0\" y=\"0\" width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n"
        ));
        b.push_str(&format!(
            "<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
            W / 2.0,
            escape(&self.title)
        ));

        // frame
        b.push_str(&format!(
            "<rect x=\"{ML}\" y=\"{MT}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#444\"/>\n",
            W - ML - MR,
            H - MT - MB
        ));
        // ticks
        for t in ticks(x0, x1) {
            let x = px(t);
            b.push_str(&format!(
                "<line x1=\"{x:.2}\" y1=\"{}\" x2=\"{x:.2}\" y2=\"{}\" stroke=\"#444\"/>\n",
                H - MB,
                H - MB + 5.0
            ));
            b.push_str(&format!(
                "<text x=\"{x:.2}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
                H - MB + 18.0,
                fmt_tick(t)
            ));
        }
        for t in ticks(y0, y1) {
            let y = py(t);
            b.push_str(&format!(
                "<line x1=\"{}\" y1=\"{y:.2}\" x2=\"{ML}\" y2=\"{y:.2}\" stroke=\"#444\"/>\n",
                ML - 5.0
            ));
            b.push_str(&format!(
                "<text x=\"{}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>\n",
                ML - 8.0,
                y + 4.0,
                fmt_tick(t)
            ));
        }
        b.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
            (ML + W - MR) / 2.0,
            H - 12.0,
            escape(&self.x_label)
        ));
        b.push_str(&format!(
            "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{}</text>\n",
            (MT + H - MB) / 2.0,
            (MT + H - MB) / 2.0,
            escape(&self.y_label)
        ));

        if let Some((y, ref label)) = self.href {
            let yy = py(y);
            b.push_str(&format!(
                "<line x1=\"{ML}\" y1=\"{yy:.2}\" x2=\"{}\" y2=\"{yy:.2}\" stroke=\"#888\" stroke-dasharray=\"6 4\"/>\n",
                W - MR
            ));
            b.push_str(&format!(
                "<text x=\"{}\" y=\"{:.2}\" text-anchor=\"end\" fill=\"#666\">{}</text>\n",
                W - MR - 4.0,
                yy - 5.0,
                escape(label)
            ));
        }

        for (si, s) in self.series.iter().enumerate() {
            if s.points.is_empty() {
                continue;
            }
            if s.scatter {
                for (i, &(x, y)) in s.points.iter().enumerate() {
                    let (cx, cy) = (px(x), py(y));
                    if let Some(&bar) = s.bars.get(i) {
                        if bar > 0.0 {
                            let (ylo, yhi) = (py(y - bar), py(y + bar));
                            b.push_str(&format!(
                                "<line x1=\"{cx:.2}\" y1=\"{ylo:.2}\" x2=\"{cx:.2}\" y2=\"{yhi:.2}\" stroke=\"{}\"/>\n",
                                s.color
                            ));
                            for yy in [ylo, yhi] {
                                b.push_str(&format!(
                                    "<line x1=\"{:.2}\" y1=\"{yy:.2}\" x2=\"{:.2}\" y2=\"{yy:.2}\" stroke=\"{}\"/>\n",
                                    cx - 4.0,
                                    cx + 4.0,
                                    s.color
                                ));
                            }
                        }
                    }
                    b.push_str(&format!(
                        "<circle cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"3\" fill=\"{}\"/>\n",
                        s.color
                    ));
                }
            } else {
                let mut d = String::new();
                for (i, &(x, y)) in s.points.iter().enumerate() {
                    d.push_str(if i == 0 { "M" } else { " L" });
                    d.push_str(&format!("{} {}", fmt_coord(px(x)), fmt_coord(py(y))));
                }
                b.push_str(&format!(
                    "<path d=\"{d}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.3\"/>\n",
                    s.color
                ));
            }
            // legend entry
            let ly = MT + 16.0 + 16.0 * si as f64;
            b.push_str(&format!(
                "<line x1=\"{}\" y1=\"{ly:.2}\" x2=\"{}\" y2=\"{ly:.2}\" stroke=\"{}\" stroke-width=\"3\"/>\n",
                ML + 10.0,
                ML + 34.0,
                s.color
            ));
            b.push_str(&format!(
                "<text x=\"{}\" y=\"{:.2}\">{}</text>\n",
                ML + 40.0,
                ly + 4.0,
                escape(&s.label)
            ));
        }
        b.push_str("</svg>\n");
        b
    }
}

fn min_max(v: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &x in v {
        if x.is_finite() {
            lo = lo.min(x);
            hi = hi.max(x);
        }
    }
    if lo > hi {
        (0.0, 1.0)
    } else {
        (lo, hi)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
