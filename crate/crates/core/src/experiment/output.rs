//! CSV and SVG emitters with atomic file replacement.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::solvers::CmdpTrace;

/// Writes through a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path
        .file_name()
        .ok_or_else(|| Error::Io(format!("{} has no file name", path.display())))?
        .to_string_lossy();
    let tmp = dir.join(format!(".{name}.tmp-{}", std::process::id()));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::from(e)
    })
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn trace_header(n_constraints: usize) -> String {
    let mut cols = vec!["iter".to_string()];
    cols.extend((0..=n_constraints).map(|n| format!("v{n}")));
    cols.extend((1..=n_constraints).map(|n| format!("mu{n}")));
    cols.push("lagrangian".into());
    cols.push("dist_to_saddle".into());
    cols.join(",")
}

/// One row per record; `distance` may be empty when no saddle is known, in
/// which case the column holds `NaN`.
pub fn trace_csv(trace: &CmdpTrace, distance: &[f64]) -> String {
    let n = trace.thresholds.len();
    let mut out = trace_header(n);
    out.push('\n');
    for (i, r) in trace.records.iter().enumerate() {
        let mut row = vec![r.iteration.to_string()];
        row.extend(r.values.iter().map(|&x| fmt_f64(x)));
        row.extend(r.mu.iter().map(|&x| fmt_f64(x)));
        row.push(fmt_f64(r.lagrangian));
        row.push(fmt_f64(distance.get(i).copied().unwrap_or(f64::NAN)));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Series parsed back from [`trace_csv`] output.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedTraceCsv {
    pub iterations: Vec<usize>,
    pub values: Vec<Vec<f64>>,
    pub mu: Vec<Vec<f64>>,
    pub lagrangian: Vec<f64>,
    pub distance: Vec<f64>,
}

pub fn parse_trace_csv(text: &str) -> Result<ParsedTraceCsv> {
    let bad = |m: String| Error::Validation(format!("trace csv: {m}"));
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().ok_or_else(|| bad("empty".into()))?.split(',').collect();
    let n_v = header.iter().filter(|h| h.starts_with('v')).count();
    let n_mu = header.iter().filter(|h| h.starts_with("mu")).count();
    if header.len() != 3 + n_v + n_mu || n_v != n_mu + 1 {
        return Err(bad(format!("unexpected header {header:?}")));
    }
    let mut out = ParsedTraceCsv {
        iterations: Vec::new(),
        values: Vec::new(),
        mu: Vec::new(),
        lagrangian: Vec::new(),
        distance: Vec::new(),
    };
    for (ln, line) in lines.enumerate() {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != header.len() {
            return Err(bad(format!("line {} has {} fields", ln + 2, f.len())));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|e| bad(format!("line {}: {e}", ln + 2)));
        out.iterations
            .push(f[0].parse().map_err(|e| bad(format!("line {}: {e}", ln + 2)))?);
        out.values.push(f[1..1 + n_v].iter().map(|s| num(s)).collect::<Result<_>>()?);
        out.mu
            .push(f[1 + n_v..1 + n_v + n_mu].iter().map(|s| num(s)).collect::<Result<_>>()?);
        out.lagrangian.push(num(f[1 + n_v + n_mu])?);
        out.distance.push(num(f[2 + n_v + n_mu])?);
    }
    Ok(out)
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

/// A self-contained SVG line chart. Non-finite points are skipped; with
/// `log_y` nonpositive points are skipped as well.
pub fn line_chart_svg(title: &str, x_label: &str, y_label: &str, series: &[(String, Vec<(f64, f64)>)], log_y: bool) -> String {
    let (w, h) = (720.0, 420.0);
    let (left, right, top, bottom) = (70.0, 160.0, 40.0, 50.0);
    let tf = |y: f64| if log_y { y.log10() } else { y };
    let pts: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|(_, s)| s.iter().copied())
        .filter(|&(x, y)| x.is_finite() && y.is_finite() && (!log_y || y > 0.0))
        .map(|(x, y)| (x, tf(y)))
        .collect();
    let bounds = |it: &mut dyn Iterator<Item = f64>| {
        it.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)))
    };
    let (mut x0, mut x1) = bounds(&mut pts.iter().map(|p| p.0));
    let (mut y0, mut y1) = bounds(&mut pts.iter().map(|p| p.1));
    if pts.is_empty() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= y0 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let pw = w - left - right;
    let ph = h - top - bottom;
    let sx = |x: f64| left + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| top + ph - (y - y0) / (y1 - y0) * ph;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, left + pw / 2.0, escape(title));
    let _ = writeln!(
        svg,
        r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for i in 0..=4 {
        let fx = x0 + (x1 - x0) * i as f64 / 4.0;
        let fy = y0 + (y1 - y0) * i as f64 / 4.0;
        let ylab = if log_y { format!("1e{fy:.1}") } else { format!("{fy:.3}") };
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            sx(fx),
            top + ph + 16.0,
            tick(fx)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{ylab}</text>"#,
            left - 6.0,
            sy(fy) + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        left + pw / 2.0,
        h - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        top + ph / 2.0,
        top + ph / 2.0,
        escape(y_label)
    );
    for (i, (label, s)) in series.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let path: Vec<String> = s
            .iter()
            .filter(|&&(x, y)| x.is_finite() && y.is_finite() && (!log_y || y > 0.0))
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(tf(y))))
            .collect();
        if !path.is_empty() {
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="{colour}" stroke-width="1.2" points="{}"/>"#,
                path.join(" ")
            );
        }
        let ly = top + 14.0 + 18.0 * i as f64;
        let lx = w - right + 12.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{colour}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn tick(x: f64) -> String {
    if x.abs() >= 1000.0 || x.fract() == 0.0 {
        format!("{x:.0}")
    } else {
        format!("{x:.2}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
