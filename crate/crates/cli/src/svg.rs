//! Tiny static SVG renderer for line charts and heatmaps.

use std::fmt::Write;

const W: f64 = 800.0;
const H: f64 = 400.0;
const PAD: f64 = 50.0;

pub struct Series<'a> {
    pub name: &'a str,
    pub values: &'a [f64],
    pub color: &'a str,
}

fn header(title: &str) -> String {
    let mut s = String::new();
    let _ = write!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\" font-family=\"sans-serif\" font-size=\"12\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
        W / 2.0,
        escape(title)
    );
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn finite_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

/// Line chart over a shared x axis; `markers` are (x, y, colour) dots.
pub fn line_chart(title: &str, x: &[f64], series: &[Series], markers: &[(f64, f64, &str)], y_range: Option<(f64, f64)>) -> String {
    let mut s = header(title);
    let (x0, x1) = finite_range(x.iter().copied());
    let (y0, y1) = y_range.unwrap_or_else(|| finite_range(series.iter().flat_map(|s| s.values.iter().copied())));
    let px = |v: f64| PAD + (v - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let py = |v: f64| H - PAD - (v - y0) / (y1 - y0) * (H - 2.0 * PAD);
    let _ = writeln!(
        s,
        "<rect x=\"{PAD}\" y=\"{PAD}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#999\"/>",
        W - 2.0 * PAD,
        H - 2.0 * PAD
    );
    for (v, anchor) in [(y0, "end"), (y1, "end")] {
        let _ = writeln!(s, "<text x=\"{}\" y=\"{:.1}\" text-anchor=\"{anchor}\">{v:.3}</text>", PAD - 4.0, py(v) + 4.0);
    }
    for v in [x0, x1] {
        let _ = writeln!(s, "<text x=\"{:.1}\" y=\"{}\" text-anchor=\"middle\">{v:.3}</text>", px(v), H - PAD + 16.0);
    }
    for (k, ser) in series.iter().enumerate() {
        let pts: Vec<String> = x
            .iter()
            .zip(ser.values)
            .filter(|(_, y)| y.is_finite())
            .map(|(&a, &b)| format!("{:.2},{:.2}", px(a), py(b)))
            .collect();
        let _ = writeln!(s, "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>", ser.color, pts.join(" "));
        let ly = PAD + 14.0 * k as f64 + 12.0;
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{ly}\" fill=\"{}\">{}</text>",
            W - PAD - 150.0,
            ser.color,
            escape(ser.name)
        );
    }
    for &(a, b, c) in markers {
        let _ = writeln!(s, "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{c}\"/>", px(a), py(b));
    }
    s.push_str("</svg>\n");
    s
}

/// Heatmap of `rows` (top row drawn first) with a white-to-dark ramp.
pub fn heatmap(title: &str, rows: &[Vec<f64>], row_labels: &[f64], x_label: &str, y_label: &str) -> String {
    let mut s = header(title);
    let n_rows = rows.len().max(1);
    let n_cols = rows.first().map_or(1, Vec::len).max(1);
    let (lo, hi) = finite_range(rows.iter().flatten().copied());
    let cw = (W - 2.0 * PAD) / n_cols as f64;
    let ch = (H - 2.0 * PAD) / n_rows as f64;
    for (i, r) in rows.iter().enumerate() {
        for (j, &v) in r.iter().enumerate() {
            let t = if v.is_finite() { ((v - lo) / (hi - lo)).clamp(0.0, 1.0) } else { 0.0 };
            let shade = (255.0 * (1.0 - t)).round() as u8;
            let _ = writeln!(
                s,
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"rgb({shade},{shade},255)\"/>",
                PAD + j as f64 * cw,
                PAD + i as f64 * ch,
                cw + 0.05,
                ch + 0.05
            );
        }
    }
    for (i, l) in row_labels.iter().enumerate().step_by((n_rows / 8).max(1)) {
        let _ = writeln!(s, "<text x=\"{}\" y=\"{:.1}\" text-anchor=\"end\">{l:.2}</text>", PAD - 4.0, PAD + (i as f64 + 0.5) * ch + 4.0);
    }
    let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>", W / 2.0, H - 15.0, escape(x_label));
    let _ = writeln!(s, "<text x=\"14\" y=\"{}\" transform=\"rotate(-90 14 {})\" text-anchor=\"middle\">{}</text>", H / 2.0, H / 2.0, escape(y_label));
    s.push_str("</svg>\n");
    s
}
