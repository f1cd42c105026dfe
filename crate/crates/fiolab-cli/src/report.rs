//! Result persistence: RFC-4180-style CSV (header row, decimal points,
//! floats at 17 significant digits), TOML report files that parse back into
//! their structs, and a dependency-free SVG line plot.

use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;

use fiolab::experiment::ExperimentReport;

/// Fixed float formatting: 17 significant digits, locale-independent.
pub fn fmt_float(v: f64) -> String {
    format!("{:.16e}", v)
}

fn write_file(path: &str, contents: &str) -> Result<(), String> {
    let p = Path::new(path);
    if let Some(parent) = p.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| format!("cannot create {:?}: {}", parent, e))?;
        }
    }
    fs::write(p, contents).map_err(|e| format!("cannot write {}: {}", path, e))
}

/// Write a CSV file from a header and rows of preformatted cells.
pub fn write_csv(path: &str, header: &[&str], rows: &[Vec<String>]) -> Result<(), String> {
    let mut text = String::new();
    text.push_str(&header.join(","));
    text.push('\n');
    for row in rows {
        text.push_str(&row.join(","));
        text.push('\n');
    }
    write_file(path, &text)
}

/// Serializable twin of [`ExperimentReport`] with run provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepReportFile {
    pub config: String,
    pub seed: u64,
    pub reduction: String,
    pub scales: Vec<u32>,
    pub ratios: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
    pub predicted: f64,
    pub tolerance: f64,
    pub verdict: bool,
}

impl SweepReportFile {
    pub fn new(report: &ExperimentReport, seed: u64, reduction: &str) -> SweepReportFile {
        SweepReportFile {
            config: report.config.clone(),
            seed,
            reduction: reduction.to_string(),
            scales: report.scales.clone(),
            ratios: report.ratios.clone(),
            slope: report.slope,
            intercept: report.intercept,
            residual: report.residual,
            predicted: report.predicted,
            tolerance: report.tolerance,
            verdict: report.verdict,
        }
    }

    pub fn save(&self, path: &str) -> Result<(), String> {
        let text =
            toml::to_string_pretty(self).map_err(|e| format!("report serialize error: {}", e))?;
        write_file(path, &text)
    }

    #[cfg(test)]
    pub fn load(path: &Path) -> Result<SweepReportFile, String> {
        let text = fs::read_to_string(path)
            .map_err(|e| format!("cannot read report {}: {}", path.display(), e))?;
        toml::from_str(&text).map_err(|e| format!("report parse error: {}", e))
    }
}

/// Generic key/value report for the non-sweep commands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckReportFile {
    pub command: String,
    pub seed: u64,
    pub reduction: String,
    pub entries: Vec<CheckEntry>,
    pub verdict: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckEntry {
    pub name: String,
    pub value: f64,
    pub pass: bool,
}

impl CheckReportFile {
    pub fn save(&self, path: &str) -> Result<(), String> {
        let text =
            toml::to_string_pretty(self).map_err(|e| format!("report serialize error: {}", e))?;
        write_file(path, &text)
    }

    #[allow(dead_code)]
    pub fn load(path: &Path) -> Result<CheckReportFile, String> {
        let text = fs::read_to_string(path)
            .map_err(|e| format!("cannot read report {}: {}", path.display(), e))?;
        toml::from_str(&text).map_err(|e| format!("report parse error: {}", e))
    }
}

/// Line plot of log2(ratio) against j with the predicted-slope guide line.
/// Pure-text SVG, no rendering dependency.
pub fn write_sweep_svg(path: &str, report: &ExperimentReport) -> Result<(), String> {
    const W: f64 = 480.0;
    const H: f64 = 320.0;
    const M: f64 = 45.0;

    let xs: Vec<f64> = report.scales.iter().map(|&j| j as f64).collect();
    let ys: Vec<f64> = report.ratios.iter().map(|r| r.log2()).collect();
    if xs.is_empty() {
        return Err("empty sweep".into());
    }
    let (x0, x1) = (xs[0], xs[xs.len() - 1]);
    let guide: Vec<f64> = xs
        .iter()
        .map(|&x| ys[0] + report.predicted * (x - x0))
        .collect();
    let ymin = ys
        .iter()
        .chain(&guide)
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let ymax = ys
        .iter()
        .chain(&guide)
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let yspan = (ymax - ymin).max(1e-9);
    let px = |x: f64| M + (x - x0) / (x1 - x0).max(1e-9) * (W - 2.0 * M);
    let py = |y: f64| H - M - (y - ymin) / yspan * (H - 2.0 * M);

    let poly = |vals: &[f64]| -> String {
        xs.iter()
            .zip(vals)
            .map(|(&x, &y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect::<Vec<_>>()
            .join(" ")
    };

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
    ));
    svg.push_str(&format!(
        "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n"
    ));
    svg.push_str(&format!(
        "<line x1=\"{M}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        H - M,
        W - M,
        H - M
    ));
    svg.push_str(&format!(
        "<line x1=\"{M}\" y1=\"{M}\" x2=\"{M}\" y2=\"{}\" stroke=\"black\"/>\n",
        H - M
    ));
    svg.push_str(&format!(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\"/>\n",
        poly(&ys)
    ));
    svg.push_str(&format!(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"gray\" stroke-dasharray=\"6 4\"/>\n",
        poly(&guide)
    ));
    for (&x, &y) in xs.iter().zip(&ys) {
        svg.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"steelblue\"/>\n",
            px(x),
            py(y)
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
            px(x),
            H - M + 16.0,
            x as u32
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"18\" font-size=\"12\" text-anchor=\"middle\">log2 ratio vs scale: slope {:.4}, predicted {:.4}</text>\n",
        W / 2.0,
        report.slope,
        report.predicted
    ));
    svg.push_str("</svg>\n");
    write_file(path, &svg)
}
