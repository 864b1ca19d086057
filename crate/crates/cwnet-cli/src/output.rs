//! Output plumbing: run manifests, stable error codes, and tiny SVG charts.

use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Provenance record emitted next to every file output.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub seed: Option<u64>,
    pub inputs: Vec<InputDigest>,
    pub outputs: Vec<String>,
    pub artifact_version: String,
    pub duration_ms: u128,
}

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

pub struct Run {
    started: Instant,
    command: String,
    seed: Option<u64>,
    inputs: Vec<InputDigest>,
    outputs: Vec<String>,
}

impl Run {
    pub fn new(seed: Option<u64>) -> Self {
        let command = std::env::args().collect::<Vec<_>>().join(" ");
        Run { started: Instant::now(), command, seed, inputs: Vec::new(), outputs: Vec::new() }
    }

    pub fn record_input(&mut self, path: &Path) -> anyhow::Result<()> {
        let bytes = std::fs::read(path)?;
        let mut hasher = Sha256::new();
        hasher.update(&bytes);
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: format!("{:x}", hasher.finalize()),
        });
        Ok(())
    }

    /// Writes `content` to `path` (or stdout when `None`). File outputs get a
    /// sibling `<path>.manifest.json`.
    pub fn emit(&mut self, path: Option<&Path>, content: &str) -> anyhow::Result<()> {
        match path {
            None => {
                println!("{content}");
                Ok(())
            }
            Some(p) => {
                std::fs::write(p, content)?;
                self.outputs.push(p.display().to_string());
                self.write_manifest(p)?;
                Ok(())
            }
        }
    }

    pub fn write_manifest(&self, for_output: &Path) -> anyhow::Result<()> {
        let manifest = RunManifest {
            command: self.command.clone(),
            seed: self.seed,
            inputs: self.inputs.iter().map(|i| InputDigest {
                path: i.path.clone(),
                sha256: i.sha256.clone(),
            }).collect(),
            outputs: self.outputs.clone(),
            artifact_version: env!("CARGO_PKG_VERSION").to_string(),
            duration_ms: self.started.elapsed().as_millis(),
        };
        let mut manifest_path: PathBuf = for_output.to_path_buf();
        let name = format!(
            "{}.manifest.json",
            manifest_path.file_name().map(|s| s.to_string_lossy().to_string()).unwrap_or_default()
        );
        manifest_path.set_file_name(name);
        std::fs::write(manifest_path, serde_json::to_string_pretty(&manifest)?)?;
        Ok(())
    }
}

/// Stable machine-readable code for each library error.
pub fn error_code(err: &cwnet::Error) -> &'static str {
    use cwnet::Error::*;
    match err {
        HermitianViolation(_) => "hermitian_violation",
        Disconnected => "disconnected",
        InvalidEdge(_) => "invalid_edge",
        ParseError { .. } => "parse_error",
        NotHermitian(_) => "not_hermitian",
        NumericalFailure(_) => "numerical_failure",
        NotInClass(_) => "not_in_class",
        Bipartite => "bipartite",
        TooLarge(_, _) => "too_large",
        PhaseGridViolation { .. } => "phase_grid_violation",
        InvalidSubset(_) => "invalid_subset",
        InvalidK(_) => "invalid_k",
        GenerationFailed(_) => "generation_failed",
        DimensionMismatch { .. } => "dimension_mismatch",
        InvalidParameter(_) => "invalid_parameter",
        Io(_) => "io",
    }
}

/// A minimal polyline chart; decorative output for the repro curves.
pub fn polyline_svg(title: &str, series: &[(String, Vec<(f64, f64)>)]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const M: f64 = 50.0;
    let all: Vec<(f64, f64)> = series.iter().flat_map(|(_, pts)| pts.iter().copied()).collect();
    if all.is_empty() {
        return String::from("<svg xmlns=\"http://www.w3.org/2000/svg\"/>");
    }
    let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if (x1 - x0).abs() < 1e-12 {
        x1 = x0 + 1.0;
    }
    if (y1 - y0).abs() < 1e-12 {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| M + (x - x0) / (x1 - x0) * (W - 2.0 * M);
    let sy = |y: f64| H - M - (y - y0) / (y1 - y0) * (H - 2.0 * M);
    let palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n\
         <rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
        W / 2.0,
        title
    );
    svg.push_str(&format!(
        "<line x1=\"{M}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n\
         <line x1=\"{M}\" y1=\"{M}\" x2=\"{M}\" y2=\"{}\" stroke=\"black\"/>\n",
        H - M,
        W - M,
        H - M,
        H - M
    ));
    for (idx, (label, pts)) in series.iter().enumerate() {
        let color = palette[idx % palette.len()];
        let path: Vec<String> =
            pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            path.join(" ")
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" fill=\"{color}\">{label}</text>\n",
            W - M + 4.0,
            M + 14.0 * idx as f64
        ));
    }
    svg.push_str("</svg>\n");
    svg
}
