//! CSV, SVG and run-manifest emission.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use chernoff_tradeoff::model::SourceModel;
use chernoff_tradeoff::optimizer::{kernel_parameters, TradeoffPoint};

use crate::error::{CliError, CliResult};

pub const CSV_HEADER: [&str; 7] = [
    "lambda",
    "s",
    "k",
    "privacy_rate",
    "utility_rate",
    "feasible",
    "kernel_params",
];

fn write_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Write {
        path: path.to_path_buf(),
        source,
    }
}

pub fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes).map_err(write_err(path))
}

/// CSV bytes for a sweep. Floats use Rust's shortest round-trip form;
/// kernel parameters are joined with `;`.
pub fn tradeoff_csv(model: &SourceModel, points: &[TradeoffPoint]) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Input(format!("csv: {e}"));
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for p in points {
        let params = kernel_parameters(model, &p.kernel)?
            .iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(";");
        w.write_record([
            p.lambda.to_string(),
            p.s.to_string(),
            p.k.to_string(),
            p.privacy_rate.to_string(),
            p.utility_rate.to_string(),
            p.feasible.to_string(),
            params,
        ])
        .map_err(csv_err)?;
    }
    w.into_inner()
        .map_err(|e| CliError::Input(format!("csv: {e}")))
}

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

/// Line plot of privacy rate against lambda, one polyline per `s`.
/// Infeasible points are left out.
pub fn tradeoff_svg(points: &[TradeoffPoint]) -> String {
    let (width, height) = (640.0, 420.0);
    let (left, right, top, bottom) = (80.0, 130.0, 30.0, 60.0);
    let (pw, ph) = (width - left - right, height - top - bottom);

    let feasible: Vec<&TradeoffPoint> = points.iter().filter(|p| p.feasible).collect();
    let x_max = points
        .iter()
        .map(|p| p.lambda)
        .fold(0.0, f64::max)
        .max(1e-12);
    let x_min = points.iter().map(|p| p.lambda).fold(x_max, f64::min);
    let y_max = feasible
        .iter()
        .map(|p| p.privacy_rate)
        .filter(|v| v.is_finite())
        .fold(0.0, f64::max);
    let y_max = if y_max > 0.0 { y_max * 1.05 } else { 1.0 };
    let x_span = (x_max - x_min).max(1e-12);
    let sx = |x: f64| left + (x - x_min) / x_span * pw;
    let sy = |y: f64| top + ph - y / y_max * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}">
<rect width="100%" height="100%" fill="white"/>
<g stroke="black" stroke-width="1" fill="none">
<line x1="{left}" y1="{y0}" x2="{x1}" y2="{y0}"/>
<line x1="{left}" y1="{top}" x2="{left}" y2="{y0}"/>
</g>"#,
        y0 = top + ph,
        x1 = left + pw,
    );
    let _ = writeln!(
        s,
        r#"<g font-family="sans-serif" font-size="11" fill="black">"#
    );
    for i in 0..=4 {
        let fx = x_min + x_span * i as f64 / 4.0;
        let fy = y_max * i as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{:.3}</text>"#,
            sx(fx),
            top + ph + 18.0,
            fx
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{:.2e}</text>"#,
            left - 6.0,
            sy(fy) + 4.0,
            fy
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">utility guarantee lambda (nats/slot)</text>"#,
        left + pw / 2.0,
        height - 18.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">privacy exponent (nats/slot)</text>"#,
        top + ph / 2.0,
        top + ph / 2.0
    );
    let _ = writeln!(s, "</g>");

    let mut s_values: Vec<f64> = Vec::new();
    for p in points {
        if !s_values.contains(&p.s) {
            s_values.push(p.s);
        }
    }
    for (i, sv) in s_values.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let coords: Vec<String> = feasible
            .iter()
            .filter(|p| p.s == *sv && p.privacy_rate.is_finite())
            .map(|p| format!("{:.2},{:.2}", sx(p.lambda), sy(p.privacy_rate)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            coords.join(" ")
        );
        let ly = top + 16.0 + 18.0 * i as f64;
        let lx = left + pw + 14.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
            lx + 22.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11">s = {sv}</text>"#,
            lx + 28.0,
            ly + 4.0
        );
    }
    s.push_str("</svg>\n");
    s
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

/// Provenance record written next to every output artifact.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    pub parameters: serde_json::Value,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub started_at: String,
    pub finished_at: String,
}

impl RunManifest {
    pub fn write(&self, path: &Path) -> CliResult<()> {
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::Input(format!("manifest: {e}")))?;
        write_file(path, text.as_bytes())
    }
}

/// `<path>.manifest.json`
pub fn manifest_path(artifact: &Path) -> PathBuf {
    let mut name = artifact.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

pub fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}
