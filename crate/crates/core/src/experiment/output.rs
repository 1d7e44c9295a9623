use std::collections::BTreeMap;
use std::time::{SystemTime, UNIX_EPOCH};

use super::SuiteReport;
use crate::error::Result;

const HEADER: [&str; 9] = [
    "suite", "case", "quantity", "depth", "value", "bound", "relation", "pass", "runtime_ms",
];

fn number(x: f64) -> String {
    if x.is_finite() {
        // Empty float sums are -0.0.
        format!("{:.12e}", x + 0.0)
    } else {
        format!("{x}")
    }
}

/// CSV text with a stable column order. With `timestamp` a comment line
/// leads and runtimes are filled in; without it the output depends only on
/// the configuration.
pub fn write_csv(report: &SuiteReport, timestamp: bool) -> Result<String> {
    let mut out = String::new();
    if timestamp {
        let secs = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        out.push_str(&format!("# generated at unix time {secs}\n"));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(HEADER)?;
    for r in &report.rows {
        w.write_record([
            report.suite.clone(),
            r.case.clone(),
            r.quantity.clone(),
            r.depth.map_or(String::new(), |d| d.to_string()),
            number(r.value),
            r.bound.map_or(String::new(), number),
            r.relation.to_string(),
            if r.pass { "pass" } else { "fail" }.to_string(),
            if timestamp {
                format!("{:.3}", r.runtime_ms)
            } else {
                "-".to_string()
            },
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| crate::error::Error::Io(e.to_string()))?;
    out.push_str(&String::from_utf8_lossy(&bytes));
    Ok(out)
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// `log10(value)` against depth, one polyline per `(case, quantity)` among
/// rows that carry a depth and a positive value.
pub fn render_svg(report: &SuiteReport) -> String {
    let mut series: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for r in &report.rows {
        if let (Some(d), true) = (r.depth, r.value > 0.0 && r.value.is_finite()) {
            series
                .entry(format!("{} {}", r.case, r.quantity))
                .or_default()
                .push((d as f64, r.value.log10()));
        }
    }
    series.retain(|_, pts| pts.len() > 1);
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{MARGIN}\" y=\"20\" font-size=\"14\">{}: log10(value) vs depth</text>\n",
        report.suite
    );
    let all: Vec<(f64, f64)> = series.values().flatten().copied().collect();
    if all.is_empty() {
        svg.push_str("</svg>\n");
        return svg;
    }
    let (x0, x1) = bounds(all.iter().map(|p| p.0));
    let (y0, y1) = bounds(all.iter().map(|p| p.1));
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);
    svg.push_str(&format!(
        "<path d=\"M{m} {b} H{r} M{m} {b} V{t}\" stroke=\"black\" fill=\"none\"/>\n\
         <text x=\"{m}\" y=\"{ly}\" font-size=\"11\">{x0}</text>\n\
         <text x=\"{r}\" y=\"{ly}\" font-size=\"11\">{x1}</text>\n\
         <text x=\"4\" y=\"{b}\" font-size=\"11\">{y0:.2}</text>\n\
         <text x=\"4\" y=\"{t}\" font-size=\"11\">{y1:.2}</text>\n",
        m = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN,
        t = MARGIN,
        ly = HEIGHT - MARGIN + 16.0,
    ));
    for (k, (name, pts)) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let d: Vec<String> = pts
            .iter()
            .enumerate()
            .map(|(i, (x, y))| format!("{}{:.2} {:.2}", if i == 0 { "M" } else { "L" }, sx(*x), sy(*y)))
            .collect();
        svg.push_str(&format!(
            "<path d=\"{}\" stroke=\"{color}\" fill=\"none\" stroke-width=\"1.5\"/>\n\
             <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"10\" fill=\"{color}\">{}</text>\n",
            d.join(" "),
            WIDTH - MARGIN - 150.0,
            MARGIN + 12.0 * k as f64,
            escape(name)
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

fn bounds(it: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = it.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
