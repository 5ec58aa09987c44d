//! `trace`: simulate one chordal path and extract the curve by backward
//! composition of the exact slit inverses.

use anyhow::Result;
use serde_json::json;
use sle_rho_core::chordal::{run_path, trace_points};

use crate::config::RunConfig;
use crate::report::{g17, CommandOutput, Table, Verdict};
use crate::svg::{Chart, Series};

/// Cap on extracted points: backward composition costs O(k) per sample, so
/// the full grid would be quadratic in path length.
const MAX_SAMPLES: usize = 2000;

pub fn run(config: &RunConfig, seed: u64) -> Result<CommandOutput> {
    let params = config.sle_params()?;
    let dt = config.numerics.dt;
    let horizon = config.numerics.horizon;
    let guard = config.effective_guard_chordal(&params);
    let tip_offset = config.effective_tip_offset();

    let (state, path) =
        run_path(&params, horizon, dt, Some(guard), seed, 0).map_err(|e| anyhow::anyhow!("{e}"))?;

    let times: Vec<f64> = if path.times.len() <= MAX_SAMPLES {
        path.times.clone()
    } else {
        let stride = (path.times.len() - 1) as f64 / (MAX_SAMPLES - 1) as f64;
        let mut v: Vec<f64> = (0..MAX_SAMPLES)
            .map(|i| path.times[(i as f64 * stride).round() as usize])
            .collect();
        *v.last_mut().unwrap() = *path.times.last().unwrap();
        v
    };
    let trace = trace_points(&path, &times, tip_offset).map_err(|e| anyhow::anyhow!("{e}"))?;

    let mut table = Table::new("trace", &["t", "re", "im"]);
    let mut min_im = f64::INFINITY;
    for (t, z) in trace.times.iter().zip(&trace.points) {
        min_im = min_im.min(z.im);
        table.push(vec![g17(*t), g17(z.re), g17(z.im)]);
    }
    let start_gap = (trace.points[0] - sle_rho_core::Complex64::new(params.xi0(), 0.0)).norm();

    let verdicts = vec![
        Verdict::new(
            "trace-finite",
            trace.points.iter().all(|z| z.re.is_finite() && z.im.is_finite()),
            format!("{} extracted points", trace.points.len()),
        ),
        Verdict::new(
            "trace-in-upper-half-plane",
            min_im >= -1e-9,
            format!("min Im gamma = {min_im:.3e} (tolerance -1e-9)"),
        ),
        Verdict::new(
            "trace-starts-at-xi0",
            start_gap < 1e-12,
            format!("|gamma(0) - xi0| = {start_gap:.3e}"),
        ),
    ];

    let curve: Vec<(f64, f64)> = trace.points.iter().map(|z| (z.re, z.im)).collect();
    let plots = vec![(
        String::from("trace"),
        Chart {
            title: format!("trace, kappa = {}, T = {:.4}", params.kappa(), state.t),
            x_label: String::from("Re"),
            y_label: String::from("Im"),
            series: vec![Series::line("gamma", "#1a6faf", curve)],
            href: None,
        }
        .render(),
    )];

    let tip = *trace.points.last().unwrap();
    let summary = vec![
        format!(
            "traced one path to t = {:.6} ({} accepted steps, tip_offset = {tip_offset:.4e})",
            state.t,
            path.n_steps()
        ),
        format!("tip estimate gamma(T) = {:.6} + {:.6}i", tip.re, tip.im),
    ];

    let report = json!({
        "dt": dt,
        "horizon": horizon,
        "tip_offset": tip_offset,
        "duration": state.t,
        "accepted_steps": path.n_steps(),
        "samples": trace.points.len(),
        "tip": {"re": tip.re, "im": tip.im},
        "min_im": min_im,
    });

    Ok(CommandOutput { report, tables: vec![table], plots, verdicts, summary })
}
