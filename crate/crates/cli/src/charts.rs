//! Minimal self-contained SVG charts. Every chart is a rendering of
//! numbers that are co-emitted as CSV; nothing is computed here beyond
//! pixel placement.

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 70.0;

fn plot_width() -> f64 {
    WIDTH - MARGIN_LEFT - MARGIN_RIGHT
}

fn plot_height() -> f64 {
    HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
}

fn header(title: &str) -> String {
    format!(
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" ",
            "viewBox=\"0 0 {w} {h}\" font-family=\"sans-serif\" font-size=\"12\">\n",
            "<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n",
            "<text x=\"{cx}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{title}</text>\n"
        ),
        w = WIDTH,
        h = HEIGHT,
        cx = WIDTH / 2.0,
        title = escape(title)
    )
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn fmt(v: f64) -> String {
    format!("{v:.2}")
}

struct Scale {
    lo: f64,
    hi: f64,
}

impl Scale {
    fn from_values(values: impl Iterator<Item = f64>) -> Scale {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for v in values {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() || !hi.is_finite() {
            return Scale { lo: 0.0, hi: 1.0 };
        }
        if (hi - lo).abs() < 1e-12 {
            return Scale { lo: lo - 1.0, hi: hi + 1.0 };
        }
        let pad = 0.08 * (hi - lo);
        Scale { lo: lo - pad, hi: hi + pad }
    }

    fn y(&self, v: f64) -> f64 {
        MARGIN_TOP + plot_height() * (1.0 - (v - self.lo) / (self.hi - self.lo))
    }
}

fn y_axis(scale: &Scale) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "<line x1=\"{x}\" y1=\"{y1}\" x2=\"{x}\" y2=\"{y2}\" stroke=\"black\"/>\n",
        x = MARGIN_LEFT,
        y1 = MARGIN_TOP,
        y2 = MARGIN_TOP + plot_height()
    ));
    for k in 0..=4 {
        let v = scale.lo + (scale.hi - scale.lo) * k as f64 / 4.0;
        let y = scale.y(v);
        out.push_str(&format!(
            "<line x1=\"{x1}\" y1=\"{y}\" x2=\"{x2}\" y2=\"{y}\" stroke=\"#cccccc\"/>\n",
            x1 = MARGIN_LEFT,
            x2 = MARGIN_LEFT + plot_width(),
            y = fmt(y)
        ));
        out.push_str(&format!(
            "<text x=\"{x}\" y=\"{y}\" text-anchor=\"end\">{v}</text>\n",
            x = MARGIN_LEFT - 6.0,
            y = fmt(y + 4.0),
            v = fmt(v)
        ));
    }
    out
}

/// Two series over a shared 1..n index, e.g. actual vs. predicted
/// counts on the validation projects.
pub fn line_chart(title: &str, series: &[(&str, &[f64], &str)]) -> String {
    let mut svg = header(title);
    let scale = Scale::from_values(series.iter().flat_map(|(_, v, _)| v.iter().copied()));
    svg.push_str(&y_axis(&scale));
    let n = series.iter().map(|(_, v, _)| v.len()).max().unwrap_or(0);
    let x_at = |i: usize| {
        if n <= 1 {
            MARGIN_LEFT + plot_width() / 2.0
        } else {
            MARGIN_LEFT + plot_width() * i as f64 / (n - 1) as f64
        }
    };
    for i in 0..n {
        svg.push_str(&format!(
            "<text x=\"{x}\" y=\"{y}\" text-anchor=\"middle\">{label}</text>\n",
            x = fmt(x_at(i)),
            y = HEIGHT - MARGIN_BOTTOM + 20.0,
            label = i + 1
        ));
    }
    for (label_idx, (label, values, color)) in series.iter().enumerate() {
        let points: Vec<String> = values
            .iter()
            .enumerate()
            .map(|(i, &v)| format!("{},{}", fmt(x_at(i)), fmt(scale.y(v))))
            .collect();
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
            points.join(" ")
        ));
        for (i, &v) in values.iter().enumerate() {
            svg.push_str(&format!(
                "<circle cx=\"{x}\" cy=\"{y}\" r=\"3\" fill=\"{color}\"/>\n",
                x = fmt(x_at(i)),
                y = fmt(scale.y(v))
            ));
        }
        svg.push_str(&format!(
            "<text x=\"{x}\" y=\"{y}\" fill=\"{color}\">{label}</text>\n",
            x = MARGIN_LEFT + 10.0 + 120.0 * label_idx as f64,
            y = MARGIN_TOP - 8.0,
            label = escape(label)
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

/// One box per (label, [min, q1, median, q3, max]).
pub fn box_plot(title: &str, boxes: &[(String, [f64; 5])]) -> String {
    let mut svg = header(title);
    let scale = Scale::from_values(boxes.iter().flat_map(|(_, b)| b.iter().copied()));
    svg.push_str(&y_axis(&scale));
    let n = boxes.len().max(1);
    let slot = plot_width() / n as f64;
    for (i, (label, b)) in boxes.iter().enumerate() {
        let cx = MARGIN_LEFT + slot * (i as f64 + 0.5);
        let half = (slot * 0.3).min(40.0);
        let [min, q1, median, q3, max] = *b;
        svg.push_str(&format!(
            "<line x1=\"{cx}\" y1=\"{y1}\" x2=\"{cx}\" y2=\"{y2}\" stroke=\"black\"/>\n",
            cx = fmt(cx),
            y1 = fmt(scale.y(min)),
            y2 = fmt(scale.y(max))
        ));
        for v in [min, max] {
            svg.push_str(&format!(
                "<line x1=\"{x1}\" y1=\"{y}\" x2=\"{x2}\" y2=\"{y}\" stroke=\"black\"/>\n",
                x1 = fmt(cx - half / 2.0),
                x2 = fmt(cx + half / 2.0),
                y = fmt(scale.y(v))
            ));
        }
        svg.push_str(&format!(
            "<rect x=\"{x}\" y=\"{y}\" width=\"{w}\" height=\"{h}\" fill=\"#9fd8db\" stroke=\"black\"/>\n",
            x = fmt(cx - half),
            y = fmt(scale.y(q3)),
            w = fmt(2.0 * half),
            h = fmt((scale.y(q1) - scale.y(q3)).max(0.5))
        ));
        svg.push_str(&format!(
            "<line x1=\"{x1}\" y1=\"{y}\" x2=\"{x2}\" y2=\"{y}\" stroke=\"black\" stroke-width=\"2\"/>\n",
            x1 = fmt(cx - half),
            x2 = fmt(cx + half),
            y = fmt(scale.y(median))
        ));
        svg.push_str(&format!(
            "<text x=\"{x}\" y=\"{y}\" text-anchor=\"middle\">{label}</text>\n",
            x = fmt(cx),
            y = HEIGHT - MARGIN_BOTTOM + 20.0,
            label = escape(label)
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

/// Odds-ratio bars around the OR = 1 baseline with 95% CI whiskers.
/// Green above 1, red below.
pub fn odds_ratio_bars(title: &str, entries: &[(String, f64, f64, f64)]) -> String {
    let mut svg = header(title);
    let scale = Scale::from_values(
        entries
            .iter()
            .flat_map(|(_, or, lo, hi)| [*or, *lo, *hi].into_iter())
            .chain(std::iter::once(1.0)),
    );
    svg.push_str(&y_axis(&scale));
    let baseline = scale.y(1.0);
    svg.push_str(&format!(
        "<line x1=\"{x1}\" y1=\"{y}\" x2=\"{x2}\" y2=\"{y}\" stroke=\"black\" stroke-dasharray=\"4 3\"/>\n",
        x1 = MARGIN_LEFT,
        x2 = MARGIN_LEFT + plot_width(),
        y = fmt(baseline)
    ));
    let n = entries.len().max(1);
    let slot = plot_width() / n as f64;
    for (i, (term, or, lo, hi)) in entries.iter().enumerate() {
        let cx = MARGIN_LEFT + slot * (i as f64 + 0.5);
        let half = (slot * 0.3).min(30.0);
        let color = if *or >= 1.0 { "#2e8b57" } else { "#c0392b" };
        let top = scale.y(*or).min(baseline);
        let height = (scale.y(*or) - baseline).abs().max(0.5);
        svg.push_str(&format!(
            "<rect x=\"{x}\" y=\"{y}\" width=\"{w}\" height=\"{h}\" fill=\"{color}\"/>\n",
            x = fmt(cx - half),
            y = fmt(top),
            w = fmt(2.0 * half),
            h = fmt(height)
        ));
        svg.push_str(&format!(
            "<line x1=\"{cx}\" y1=\"{y1}\" x2=\"{cx}\" y2=\"{y2}\" stroke=\"black\"/>\n",
            cx = fmt(cx),
            y1 = fmt(scale.y(*lo)),
            y2 = fmt(scale.y(*hi))
        ));
        for v in [*lo, *hi] {
            svg.push_str(&format!(
                "<line x1=\"{x1}\" y1=\"{y}\" x2=\"{x2}\" y2=\"{y}\" stroke=\"black\"/>\n",
                x1 = fmt(cx - half / 3.0),
                x2 = fmt(cx + half / 3.0),
                y = fmt(scale.y(v))
            ));
        }
        svg.push_str(&format!(
            "<text x=\"{x}\" y=\"{y}\" text-anchor=\"end\" transform=\"rotate(-35 {x} {y})\" font-size=\"10\">{label}</text>\n",
            x = fmt(cx),
            y = HEIGHT - MARGIN_BOTTOM + 16.0,
            label = escape(term)
        ));
        svg.push_str(&format!(
            "<text x=\"{x}\" y=\"{y}\" text-anchor=\"middle\" font-size=\"10\">{v}</text>\n",
            x = fmt(cx),
            y = fmt(top - 4.0),
            v = format!("{or:.3}")
        ));
    }
    svg.push_str("</svg>\n");
    svg
}
