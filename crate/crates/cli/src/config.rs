//! Run configuration: JSON schema, defaults, validation with field-path
//! messages, and the lossless round-trip the manifest relies on.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sle_rho_core::cft::SleParams;

/// The experiment family a config drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Weights,
    Simulate,
    Trace,
    Lpp,
    Martingale,
    VirasoroCheck,
    StripCompare,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Weights => "weights",
            Command::Simulate => "simulate",
            Command::Trace => "trace",
            Command::Lpp => "lpp",
            Command::Martingale => "martingale",
            Command::VirasoroCheck => "virasoro-check",
            Command::StripCompare => "strip-compare",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub kappa: f64,
    #[serde(default)]
    pub rho: Vec<f64>,
    #[serde(default)]
    pub x: Vec<f64>,
    #[serde(default)]
    pub xi0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsConfig {
    /// Base step of whichever dynamics the command integrates
    /// (capacity time for chordal commands, strip time for strip commands).
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Collision/swallow guard; omitted = per-dynamics default.
    #[serde(default)]
    pub guard: Option<f64>,
    /// Integration horizon in the same time units as `dt`.
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    /// Strip escape bound: |Re h| beyond this decides a side.
    #[serde(rename = "L", default = "default_l_escape")]
    pub l_escape: f64,
    /// Relative tolerance for the analytic quadrature.
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    /// Trace seed height; omitted = 2*sqrt(dt).
    #[serde(default)]
    pub tip_offset: Option<f64>,
    /// Central-difference step for derivative checks.
    #[serde(default = "default_fd_step")]
    pub fd_step: f64,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        Self {
            dt: default_dt(),
            guard: None,
            horizon: default_horizon(),
            l_escape: default_l_escape(),
            rel_tol: default_rel_tol(),
            tip_offset: None,
            fd_step: default_fd_step(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McConfig {
    /// Ensemble size; for `lpp` this is paths per observation point.
    #[serde(default = "default_n_paths")]
    pub n_paths: usize,
    /// Strip times at which martingale slices are recorded.
    #[serde(default = "default_slice_times")]
    pub slice_times: Vec<f64>,
    /// Master seed; omitted = drawn once at run time and recorded.
    #[serde(default)]
    pub seed: Option<u64>,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            n_paths: default_n_paths(),
            slice_times: default_slice_times(),
            seed: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_directory")]
    pub directory: String,
    /// Artifact classes to write. The manifest is always written; `json`
    /// gates the report, `csv` the tables, `svg` the plots.
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { directory: default_directory(), formats: default_formats() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_command")]
    pub command: Command,
    pub params: ParamsConfig,
    #[serde(default)]
    pub numerics: NumericsConfig,
    #[serde(default)]
    pub mc: McConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_command() -> Command {
    Command::Simulate
}
fn default_dt() -> f64 {
    1e-3
}
fn default_horizon() -> f64 {
    10.0
}
fn default_l_escape() -> f64 {
    30.0
}
fn default_rel_tol() -> f64 {
    1e-9
}
fn default_fd_step() -> f64 {
    // Central-difference truncation error scales as fd_step²·|∂³ log D|·κ/6;
    // 1e-5 keeps it near 1e-8 for order-one separations while staying five
    // decades above the f64 roundoff floor eps/fd_step ≈ 2e-11.
    1e-5
}
fn default_n_paths() -> usize {
    1000
}
fn default_slice_times() -> Vec<f64> {
    vec![0.5, 1.0, 2.0, 3.0, 4.0, 5.0]
}
fn default_directory() -> String {
    String::from("out")
}
fn default_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Json]
}

impl RunConfig {
    /// The validated `SleParams` instance this config describes.
    pub fn sle_params(&self) -> Result<SleParams> {
        SleParams::new(
            self.params.kappa,
            self.params.rho.clone(),
            self.params.x.clone(),
            self.params.xi0,
        )
        .map_err(|e| anyhow::anyhow!("params: {e}"))
    }

    pub fn effective_guard_chordal(&self, params: &SleParams) -> f64 {
        self.numerics
            .guard
            .unwrap_or_else(|| sle_rho_core::chordal::default_guard(params))
    }

    pub fn strip_scheme(&self) -> sle_rho_core::strip::StripScheme {
        let mut scheme = sle_rho_core::strip::StripScheme::default();
        if let Some(g) = self.numerics.guard {
            scheme.guard = g;
        }
        scheme.l_escape = self.numerics.l_escape;
        scheme
    }

    pub fn effective_tip_offset(&self) -> f64 {
        self.numerics
            .tip_offset
            .unwrap_or_else(|| sle_rho_core::chordal::default_tip_offset(self.numerics.dt))
    }
}

/// Parse and validate a JSON run configuration. Unknown keys are rejected;
/// defaults are filled in the returned value, so serializing it echoes the
/// complete effective configuration.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let config: RunConfig = serde_json::from_str(text)
        .map_err(|e| anyhow::anyhow!("config schema violation: {e}"))?;
    validate(&config)?;
    Ok(config)
}

fn validate(config: &RunConfig) -> Result<()> {
    let p = &config.params;
    if !(p.kappa > 0.0) || !p.kappa.is_finite() {
        bail!("params.kappa: must be positive and finite (got {})", p.kappa);
    }
    if p.rho.len() != p.x.len() {
        bail!(
            "params.rho and params.x: length mismatch ({} weights vs {} marked points)",
            p.rho.len(),
            p.x.len()
        );
    }
    for (j, v) in p.rho.iter().enumerate() {
        if !v.is_finite() {
            bail!("params.rho[{j}]: must be finite");
        }
    }
    for (j, v) in p.x.iter().enumerate() {
        if !v.is_finite() {
            bail!("params.x[{j}]: must be finite");
        }
        if *v == p.xi0 {
            bail!("params.x[{j}]: coincides with params.xi0 = {}", p.xi0);
        }
        for (k, w) in p.x.iter().enumerate().skip(j + 1) {
            if v == w {
                bail!("params.x[{j}] and params.x[{k}]: marked points must be distinct");
            }
        }
    }
    if !p.xi0.is_finite() {
        bail!("params.xi0: must be finite");
    }

    let n = &config.numerics;
    if !(n.dt > 0.0) || !n.dt.is_finite() || n.dt > 1.0 {
        bail!("numerics.dt: must lie in (0, 1] (got {})", n.dt);
    }
    if let Some(g) = n.guard {
        if !(g >= 0.0) || !g.is_finite() {
            bail!("numerics.guard: must be a finite nonnegative real (got {g})");
        }
    }
    if !(n.horizon > 0.0) || !n.horizon.is_finite() {
        bail!("numerics.horizon: must be positive and finite (got {})", n.horizon);
    }
    if !(n.l_escape > 1.0) || !n.l_escape.is_finite() {
        bail!("numerics.L: escape bound must exceed 1 (got {})", n.l_escape);
    }
    if !(n.rel_tol > 0.0) || n.rel_tol > 1e-2 {
        bail!("numerics.rel_tol: must lie in (0, 1e-2] (got {})", n.rel_tol);
    }
    if let Some(t) = n.tip_offset {
        if !(t > 0.0) || !t.is_finite() {
            bail!("numerics.tip_offset: must be positive (got {t})");
        }
    }
    if !(n.fd_step > 0.0) || !(n.fd_step < 1.0) {
        bail!("numerics.fd_step: must lie in (0, 1) (got {})", n.fd_step);
    }

    let mc = &config.mc;
    if mc.n_paths == 0 {
        bail!("mc.n_paths: must be at least 1");
    }
    if mc.n_paths > 10_000_000 {
        bail!("mc.n_paths: ensemble cap is 1e7 (got {})", mc.n_paths);
    }
    let mut prev = 0.0;
    for (j, &s) in mc.slice_times.iter().enumerate() {
        if !(s > prev) || !s.is_finite() {
            bail!("mc.slice_times[{j}]: times must be positive, finite, strictly increasing");
        }
        prev = s;
    }

    let out = &config.output;
    if out.directory.is_empty() {
        bail!("output.directory: must be nonempty");
    }
    if out.formats.is_empty() {
        bail!("output.formats: must name at least one of csv, json, svg");
    }
    for (j, f) in out.formats.iter().enumerate() {
        if out.formats[..j].contains(f) {
            bail!("output.formats[{j}]: duplicate entry");
        }
    }

    // Cross-checks the run commands rely on.
    match config.command {
        Command::Martingale => {
            if mc.slice_times.is_empty() {
                bail!("mc.slice_times: martingale needs at least one slice time");
            }
            if *mc.slice_times.last().unwrap() > n.horizon {
                bail!(
                    "mc.slice_times and numerics.horizon: last slice {} exceeds horizon {}",
                    mc.slice_times.last().unwrap(),
                    n.horizon
                );
            }
            if mc.n_paths < 2 {
                bail!("mc.n_paths: martingale statistics need at least 2 paths");
            }
        }
        Command::Lpp => {
            if mc.n_paths < 2 {
                bail!("mc.n_paths: lpp statistics need at least 2 paths");
            }
        }
        _ => {}
    }
    Ok(())
}

/// Serialize the effective config exactly as the manifest records it.
pub fn canonical_json(config: &RunConfig) -> Result<String> {
    serde_json::to_string_pretty(config).context("serializing config")
}
