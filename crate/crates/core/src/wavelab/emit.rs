use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::{last_decade_start, DecayReport};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    pub const ALL: [Format; 3] = [Format::Csv, Format::Json, Format::Svg];

    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            other => Err(Error::Config(format!("unknown format {other:?}"))),
        }
    }
}

/// Writes `<dir>/<experiment>.<ext>` and returns its path.
pub fn emit(report: &DecayReport, format: Format, dir: &Path) -> Result<PathBuf> {
    let body = match format {
        Format::Csv => to_csv(report)?,
        Format::Json => to_json(report)?,
        Format::Svg => to_svg(report),
    };
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let path = dir.join(format!("{}.{}", report.experiment, format.extension()));
    std::fs::write(&path, body).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(path)
}

/// One row per time, one column per series; undefined entries are empty.
/// Without any series only the header is written.
pub fn to_csv(report: &DecayReport) -> Result<String> {
    let io = |e: csv::Error| Error::Io(e.to_string());
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["t".to_string()];
    header.extend(report.series.iter().map(|s| s.name.clone()));
    w.write_record(&header).map_err(io)?;
    if !report.series.is_empty() {
        for (i, t) in report.times.iter().enumerate() {
            let mut row = vec![t.to_string()];
            for s in &report.series {
                row.push(s.values.get(i).copied().flatten().map_or(String::new(), |v| v.to_string()));
            }
            w.write_record(&row).map_err(io)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

pub fn to_json(report: &DecayReport) -> Result<String> {
    serde_json::to_string_pretty(report).map_err(|e| Error::Io(e.to_string()))
}

pub fn read_json(text: &str) -> Result<DecayReport> {
    serde_json::from_str(text).map_err(|e| Error::Config(format!("report: {e}")))
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 460.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];

struct Axes {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Axes {
    fn px(&self, t: f64) -> f64 {
        LEFT + (t.log10() - self.x0) / (self.x1 - self.x0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, v: f64) -> f64 {
        HEIGHT - BOTTOM - (v.log10() - self.y0) / (self.y1 - self.y0) * (HEIGHT - TOP - BOTTOM)
    }
}

/// Log-log plot of every series with positive values, the fitted power law
/// over the last decade (dashed) and a slope −1 guide (dotted).
pub fn to_svg(report: &DecayReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{LEFT}" y="18" font-size="13">{}</text>"#, report.experiment);
    let points: Vec<(f64, f64)> = report
        .series
        .iter()
        .flat_map(|s| report.times.iter().zip(&s.values).filter_map(|(&t, v)| v.map(|v| (t, v))))
        .filter(|&(t, v)| t > 0.0 && v > 0.0 && v.is_finite())
        .collect();
    if points.is_empty() {
        let _ = writeln!(out, r#"<text x="{LEFT}" y="{}">no positive data</text>"#, HEIGHT / 2.0);
        out.push_str("</svg>\n");
        return out;
    }
    let (tmin, tmax, vmin, vmax) = points.iter().fold(
        (f64::INFINITY, 0.0f64, f64::INFINITY, 0.0f64),
        |(a, b, c, d), &(t, v)| (a.min(t), b.max(t), c.min(v), d.max(v)),
    );
    let mut ax = Axes {
        x0: tmin.log10().floor(),
        x1: tmax.log10().ceil(),
        y0: vmin.log10().floor(),
        y1: vmax.log10().ceil(),
    };
    if ax.x1 <= ax.x0 {
        ax.x1 = ax.x0 + 1.0;
    }
    if ax.y1 <= ax.y0 {
        ax.y1 = ax.y0 + 1.0;
    }
    let (l, r, t, b) = (LEFT, WIDTH - RIGHT, TOP, HEIGHT - BOTTOM);
    let _ = writeln!(
        out,
        r##"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="#444"/>"##,
        r - l,
        b - t
    );
    for k in ax.x0 as i64..=ax.x1 as i64 {
        let x = ax.px(10f64.powi(k as i32));
        let _ = writeln!(out, r##"<line x1="{x:.2}" y1="{b}" x2="{x:.2}" y2="{t}" stroke="#ddd"/>"##);
        let _ = writeln!(out, r#"<text x="{x:.2}" y="{}" text-anchor="middle">1e{k}</text>"#, b + 16.0);
    }
    let ystep = ((ax.y1 - ax.y0) / 8.0).ceil().max(1.0) as i64;
    let mut k = ax.y0 as i64;
    while k <= ax.y1 as i64 {
        let y = ax.py(10f64.powi(k as i32));
        let _ = writeln!(out, r##"<line x1="{l}" y1="{y:.2}" x2="{r}" y2="{y:.2}" stroke="#ddd"/>"##);
        let _ = writeln!(out, r#"<text x="{}" y="{:.2}" text-anchor="end">1e{k}</text>"#, l - 6.0, y + 4.0);
        k += ystep;
    }
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">t</text>"#, 0.5 * (l + r), HEIGHT - 12.0);
    let mut legend = 0;
    for (i, s) in report.series.iter().enumerate() {
        let pts: Vec<String> = report
            .times
            .iter()
            .zip(&s.values)
            .filter_map(|(&t, v)| v.filter(|&v| v > 0.0 && v.is_finite() && t > 0.0).map(|v| (t, v)))
            .map(|(t, v)| format!("{:.2},{:.2}", ax.px(t), ax.py(v)))
            .collect();
        if pts.is_empty() {
            continue;
        }
        let color = PALETTE[i % PALETTE.len()];
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            pts.join(" ")
        );
        let y = t + 14.0 + 16.0 * legend as f64;
        let _ = writeln!(
            out,
            r#"<line x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            r + 12.0,
            r + 32.0,
            r + 38.0,
            y + 4.0,
            s.name
        );
        legend += 1;
    }
    if let (Some(fit), Some(start)) = (report.fit, last_decade_start(&report.times)) {
        let (ta, tb) = (report.times[start], tmax);
        let line = |c: f64, k: f64, style: &str, label: &str, out: &mut String, legend: &mut usize| {
            let (va, vb) = (c * ta.powf(k), c * tb.powf(k));
            if va > 0.0 && vb > 0.0 && va.is_finite() && vb.is_finite() {
                let _ = writeln!(
                    out,
                    r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#000" {style}/>"##,
                    ax.px(ta),
                    ax.py(va),
                    ax.px(tb),
                    ax.py(vb)
                );
                let y = t + 14.0 + 16.0 * *legend as f64;
                let _ = writeln!(
                    out,
                    r##"<line x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="#000" {style}/><text x="{}" y="{}">{label}</text>"##,
                    r + 12.0,
                    r + 32.0,
                    r + 38.0,
                    y + 4.0
                );
                *legend += 1;
            }
        };
        line(
            fit.constant,
            fit.exponent,
            r#"stroke-dasharray="6 3""#,
            &format!("fit slope {:.3}", fit.exponent),
            &mut out,
            &mut legend,
        );
        // Slope −1 through the fitted value at the start of the decade.
        let anchor = fit.constant * ta.powf(fit.exponent);
        line(anchor * ta, -1.0, r#"stroke-dasharray="2 3""#, "slope -1", &mut out, &mut legend);
    }
    out.push_str("</svg>\n");
    out
}
