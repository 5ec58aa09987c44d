//! `lpp`: left-passage verification — analytic P^l from the contour
//! quadrature against Monte Carlo side classification under the strip
//! dynamics, on five canonical points of the midline Im w = π/2.

use anyhow::{bail, Result};
use serde_json::json;
use sle_rho_core::observables::{
    classify_side, p_left, swallowed_weight, QuadratureSpec, SideCounts, SideLabel,
};
use sle_rho_core::Complex64;

use crate::config::RunConfig;
use crate::ensemble::par_streams;
use crate::report::{g17, CommandOutput, Table, Verdict};
use crate::svg::{Chart, Series};

/// Observation points: Re w on this grid, Im w = π/2.
pub const MIDLINE_RE: [f64; 5] = [-2.0, -1.0, 0.0, 1.0, 2.0];

pub fn run(config: &RunConfig, seed: u64) -> Result<CommandOutput> {
    let params = config.sle_params()?;
    if params.n_marked() != 1 {
        bail!("lpp: params must carry exactly one (rho, x) pair (got {})", params.n_marked());
    }
    if !(params.x()[0] < 0.0) || params.xi0() != 0.0 {
        bail!("lpp: the strip normalization needs params.x[0] < 0 and params.xi0 = 0");
    }
    let rho = params.rho()[0];
    // Window enforcement: this is where e.g. kappa = 3 is refused.
    let spec = QuadratureSpec::new(params.kappa(), rho, config.numerics.rel_tol)
        .map_err(|e| anyhow::anyhow!("lpp: {e}"))?;

    let ds = config.numerics.dt;
    let s_max = config.numerics.horizon;
    let scheme = config.strip_scheme();
    let n = config.mc.n_paths;

    let points: Vec<Complex64> = MIDLINE_RE
        .iter()
        .map(|&x| Complex64::new(x, core::f64::consts::FRAC_PI_2))
        .collect();

    // Analytic side first (cheap), so window or tolerance trouble surfaces
    // before the ensemble runs.
    let mut analytic = Vec::with_capacity(points.len());
    for &w in &points {
        let p = p_left(w, &spec).map_err(|e| anyhow::anyhow!("lpp analytic at {w}: {e}"))?;
        let sw = swallowed_weight(w, &spec).map_err(|e| anyhow::anyhow!("lpp analytic at {w}: {e}"))?;
        analytic.push((p, sw));
    }

    // Independent ensemble per point: point i owns streams i*n .. i*n + n.
    let labels = par_streams(points.len() * n, |stream| {
        let w = points[(stream / n as u64) as usize];
        classify_side(&params, w, ds, s_max, &scheme, seed, stream).map(|c| c.label)
    });

    let mut table = Table::new(
        "lpp",
        &[
            "re_w",
            "im_w",
            "p_left_analytic",
            "sw_analytic",
            "left_freq",
            "se",
            "dev_se",
            "n_left",
            "n_right",
            "n_swallowed",
            "n_undecided",
            "within_3se",
        ],
    );
    let mut rows_json = Vec::new();
    let mut all_within = true;
    let mut max_dev_se = 0.0f64;
    let mut mc_points = Vec::new();
    let mut mc_bars = Vec::new();
    for (i, &w) in points.iter().enumerate() {
        let mut counts = SideCounts::default();
        for s in 0..n {
            match &labels[i * n + s] {
                Ok(label) => counts.record(*label),
                Err(e) => bail!("lpp: path {s} at point {w} failed: {e}"),
            }
        }
        let (p, sw) = analytic[i];
        let freq = counts.left as f64 / n as f64;
        let se = (freq * (1.0 - freq) / n as f64).sqrt();
        let dev_se = if se > 0.0 {
            (freq - p).abs() / se
        } else if freq == p {
            0.0
        } else {
            f64::INFINITY
        };
        let within = dev_se < 3.0;
        all_within &= within;
        max_dev_se = max_dev_se.max(dev_se);
        table.push(vec![
            g17(w.re),
            g17(w.im),
            g17(p),
            g17(sw),
            g17(freq),
            g17(se),
            g17(dev_se),
            counts.left.to_string(),
            counts.right.to_string(),
            counts.swallowed.to_string(),
            counts.undecided.to_string(),
            within.to_string(),
        ]);
        rows_json.push(json!({
            "w": {"re": w.re, "im": w.im},
            "p_left_analytic": p,
            "swallowed_analytic": sw,
            "left_freq": freq,
            "se": se,
            "dev_se": dev_se,
            "counts": {
                "left": counts.left,
                "right": counts.right,
                "swallowed": counts.swallowed,
                "undecided": counts.undecided,
            },
            "swallowed_freq": counts.swallowed as f64 / n as f64,
            "within_3se": within,
        }));
        mc_points.push((w.re, freq));
        mc_bars.push(3.0 * se);
    }

    // Analytic curve for the plot.
    let mut curve = Vec::new();
    for k in 0..=40 {
        let x = -2.5 + 5.0 * k as f64 / 40.0;
        let w = Complex64::new(x, core::f64::consts::FRAC_PI_2);
        curve.push((x, p_left(w, &spec).map_err(|e| anyhow::anyhow!("{e}"))?));
    }
    let plots = vec![(
        String::from("lpp"),
        Chart {
            title: format!(
                "left passage on Im w = pi/2, kappa = {}, rho = {rho}",
                params.kappa()
            ),
            x_label: String::from("Re w"),
            y_label: String::from("P^l"),
            series: vec![
                Series::line("analytic", "#1a6faf", curve),
                Series::scatter_with_bars("MC +/- 3 SE", "#c23b22", mc_points, mc_bars),
            ],
            href: None,
        }
        .render(),
    )];

    let undecided_total: u64 = labels
        .iter()
        .filter(|r| matches!(r, Ok(SideLabel::Undecided)))
        .count() as u64;
    let verdicts = vec![
        Verdict::new(
            "mc-within-3se",
            all_within,
            format!(
                "max |left_freq - P^l|/SE = {max_dev_se:.2} over {} points, {n} paths each",
                points.len()
            ),
        ),
        Verdict::new(
            "horizon-resolves-paths",
            undecided_total * 100 <= (points.len() * n) as u64,
            format!(
                "{undecided_total} of {} paths undecided at s_max = {s_max} (must stay below 1%)",
                points.len() * n
            ),
        ),
    ];

    let summary = vec![
        format!(
            "left-passage check: kappa = {}, rho = {rho}, {n} paths x {} points, ds = {ds}",
            params.kappa(),
            points.len()
        ),
        format!("max normalized deviation {max_dev_se:.2} SE (criterion: < 3)"),
        format!(
            "swallowed fractions (MC): {}",
            rows_json
                .iter()
                .map(|r| format!("{:.4}", r["swallowed_freq"].as_f64().unwrap()))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    ];

    let report = json!({
        "kappa": params.kappa(),
        "rho": rho,
        "x1": params.x()[0],
        "ds": ds,
        "s_max": s_max,
        "n_paths_per_point": n,
        "rel_tol": config.numerics.rel_tol,
        "points": rows_json,
        "max_dev_se": max_dev_se,
    });

    Ok(CommandOutput { report, tables: vec![table], plots, verdicts, summary })
}
