//! Artifact plumbing: CSV tables, JSON reports, the run manifest, and the
//! content hashes that make reruns checkable bit-for-bit.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{Format, RunConfig};

/// Schema version stamped on every JSON artifact.
pub const SCHEMA_VERSION: u32 = 1;

/// Format a float with 17 significant digits — enough to round-trip f64
/// exactly, so CSV rows are faithful to the computed values.
pub fn g17(x: f64) -> String {
    format!("{x:.16e}")
}

/// One named pass/fail check performed inside a run.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Verdict {
    pub fn new(name: &str, pass: bool, detail: String) -> Self {
        Self { name: name.to_string(), pass, detail }
    }
}

/// A CSV table staged for writing (values already formatted).
#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }
    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
    fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Everything a command hands back to the shared writer.
#[derive(Debug, Clone)]
pub struct CommandOutput {
    /// Machine-readable report body (wrapped with schema/version/verdicts).
    pub report: serde_json::Value,
    pub tables: Vec<Table>,
    /// (file name, rendered SVG document)
    pub plots: Vec<(String, String)>,
    pub verdicts: Vec<Verdict>,
    /// Human-readable lines echoed to stdout.
    pub summary: Vec<String>,
}

impl CommandOutput {
    pub fn pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

#[derive(Debug, Clone, Serialize)]
struct ArtifactEntry {
    name: String,
    bytes: usize,
    sha256: String,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    schema_version: u32,
    command: &'a str,
    /// Effective configuration (defaults filled, seed recorded): rerunning
    /// this exact config reproduces every artifact bit-for-bit.
    config: &'a RunConfig,
    seed: u64,
    config_sha256: String,
    /// Combined hash over all artifacts except this manifest, in name order.
    outputs_sha256: String,
    artifacts: Vec<ArtifactEntry>,
    wall_time_s: f64,
    pass: bool,
    verdicts: &'a [Verdict],
}

/// Outcome handed back to `main` for exit-code and messaging decisions.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub pass: bool,
    pub verdicts: Vec<Verdict>,
    pub manifest_path: PathBuf,
    pub artifact_names: Vec<String>,
    pub outputs_sha256: String,
    pub summary: Vec<String>,
}

/// Write the staged artifacts plus the manifest into the output directory.
/// Nothing outside `directory` is touched.
pub fn write_artifacts(
    config: &RunConfig,
    seed: u64,
    output: &CommandOutput,
    started: Instant,
) -> Result<RunOutcome> {
    let dir = Path::new(&config.output.directory);
    fs::create_dir_all(dir)
        .with_context(|| format!("creating output directory {}", dir.display()))?;

    let formats = &config.output.formats;
    let mut files: Vec<(String, Vec<u8>)> = Vec::new();

    if formats.contains(&Format::Json) {
        let report = serde_json::json!({
            "schema_version": SCHEMA_VERSION,
            "command": config.command.name(),
            "seed": seed,
            "pass": output.pass(),
            "verdicts": output.verdicts,
            "body": output.report,
        });
        let text = serde_json::to_string_pretty(&report).context("serializing report")?;
        files.push((String::from("report.json"), text.into_bytes()));
    }
    if formats.contains(&Format::Csv) {
        for table in &output.tables {
            files.push((format!("{}.csv", table.name), table.render().into_bytes()));
        }
    }
    if formats.contains(&Format::Svg) {
        for (name, svg) in &output.plots {
            files.push((format!("{name}.svg"), svg.clone().into_bytes()));
        }
    }

    files.sort_by(|a, b| a.0.cmp(&b.0));
    let mut artifacts = Vec::with_capacity(files.len());
    let mut combined = String::new();
    for (name, bytes) in &files {
        let digest = sha256_hex(bytes);
        combined.push_str(name);
        combined.push(':');
        combined.push_str(&digest);
        combined.push('\n');
        artifacts.push(ArtifactEntry { name: name.clone(), bytes: bytes.len(), sha256: digest });
        fs::write(dir.join(name), bytes)
            .with_context(|| format!("writing artifact {name}"))?;
    }
    let outputs_sha256 = sha256_hex(combined.as_bytes());

    let config_text = crate::config::canonical_json(config)?;
    let manifest = Manifest {
        schema_version: SCHEMA_VERSION,
        command: config.command.name(),
        config,
        seed,
        config_sha256: sha256_hex(config_text.as_bytes()),
        outputs_sha256: outputs_sha256.clone(),
        artifacts,
        wall_time_s: started.elapsed().as_secs_f64(),
        pass: output.pass(),
        verdicts: &output.verdicts,
    };
    let manifest_path = dir.join("manifest.json");
    fs::write(
        &manifest_path,
        serde_json::to_string_pretty(&manifest).context("serializing manifest")?,
    )
    .with_context(|| format!("writing {}", manifest_path.display()))?;

    Ok(RunOutcome {
        pass: output.pass(),
        verdicts: output.verdicts.clone(),
        manifest_path,
        artifact_names: files.into_iter().map(|(n, _)| n).collect(),
        outputs_sha256,
        summary: output.summary.clone(),
    })
}
