//! `strip-compare`: the coordinate-change consistency experiment. One
//! chordal path is pushed through the strip map and the capacity↔strip time
//! change; the strip stepper, driven by the matched increments, must stay
//! within a C·√dt band of the pushed-forward images.

use anyhow::{bail, Result};
use serde_json::json;
use sle_rho_core::chordal::{replay_states, run_path, slit_advance_point};
use sle_rho_core::strip::{
    chordal_strip_image, map_to_strip, matched_strip_increments, strip_drive_matched,
    strip_initial, time_change, StripFate,
};
use sle_rho_core::Complex64;

use crate::config::RunConfig;
use crate::report::{g17, CommandOutput, Table, Verdict};
use crate::svg::{Chart, Series};

/// Regression constant for the √dt deviation bound, frozen on the first
/// verified run of the matched-increment comparison at dt = 1e-4.
pub const FROZEN_C: f64 = 2.0;

/// Rows kept in the comparison table.
const MAX_ROWS: usize = 2000;

pub fn run(config: &RunConfig, seed: u64) -> Result<CommandOutput> {
    let params = config.sle_params()?;
    if params.n_marked() == 0 {
        bail!("strip-compare: params needs the marked point x[0] that anchors the strip map");
    }
    let x1 = params.x()[0];
    if !(x1 < 0.0) || params.xi0() != 0.0 {
        bail!("strip-compare: the strip normalization needs params.x[0] < 0 and params.xi0 = 0");
    }
    let dt = config.numerics.dt;
    let horizon = config.numerics.horizon;
    let guard = config.effective_guard_chordal(&params);
    let scheme = config.strip_scheme();

    // Canonical tracked point: one capacity unit above the start.
    let z0 = Complex64::new(params.xi0(), 1.0);

    let (final_state, path) =
        run_path(&params, horizon, dt, Some(guard), seed, 0).map_err(|e| anyhow::anyhow!("{e}"))?;
    if path.n_steps() == 0 {
        bail!("strip-compare: the chordal path stopped before its first step");
    }

    let w0 = map_to_strip(z0, x1).map_err(|e| anyhow::anyhow!("{e}"))?;
    let initial = strip_initial(&params, &[w0]).map_err(|e| anyhow::anyhow!("{e}"))?;
    let incs = matched_strip_increments(&path, &params).map_err(|e| anyhow::anyhow!("{e}"))?;
    let strip_states =
        strip_drive_matched(&initial, &incs, &params, &scheme).map_err(|e| anyhow::anyhow!("{e}"))?;
    let rows = replay_states(&path, &params);
    let tc = time_change(&path, &params).map_err(|e| anyhow::anyhow!("{e}"))?;

    let mut table = Table::new(
        "strip_compare",
        &["t", "s", "h_chordal_re", "h_chordal_im", "h_strip_re", "h_strip_im", "dev"],
    );
    let stride = (path.n_steps() / MAX_ROWS).max(1);
    let mut max_dev = 0.0f64;
    let mut dev_curve = Vec::new();
    let mut g = z0;
    let mut compared_steps = 0usize;
    for k in 0..=path.n_steps() {
        let strip_state = &strip_states[k];
        // Stop comparing once the tracked point resolves on the strip side
        // or drifts past the escape window: both coordinates blow up there
        // and the comparison would measure overflow, not scheme error.
        if strip_state.h_points[0].fate != StripFate::Tracking {
            break;
        }
        let row = &rows[k];
        let h_chordal = chordal_strip_image(g, row.xi, row.x_img[0]);
        if h_chordal.re.abs() > scheme.l_escape {
            break;
        }
        let h_strip = strip_state.h_points[0].h;
        let dev = (h_strip - h_chordal).norm();
        max_dev = max_dev.max(dev);
        compared_steps = k;
        if k % stride == 0 || k == path.n_steps() {
            table.push(vec![
                g17(row.t),
                g17(tc.s[k]),
                g17(h_chordal.re),
                g17(h_chordal.im),
                g17(h_strip.re),
                g17(h_strip.im),
                g17(dev),
            ]);
            dev_curve.push((tc.s[k], dev));
        }
        if k < path.n_steps() {
            g = slit_advance_point(g, path.xi_values[k], path.step_dt(k));
        }
    }
    if compared_steps == 0 {
        bail!("strip-compare: no comparable steps before the tracked point resolved");
    }

    let bound = FROZEN_C * dt.sqrt();
    let verdicts = vec![Verdict::new(
        "matched-deviation",
        max_dev < bound,
        format!(
            "max |h_strip - h_chordal| = {max_dev:.4e} over {compared_steps} steps, bound {bound:.4e} = {FROZEN_C}*sqrt(dt)"
        ),
    )];

    let plots = vec![(
        String::from("strip_compare"),
        Chart {
            title: format!("strip vs chordal images, dt = {dt}"),
            x_label: String::from("s"),
            y_label: String::from("deviation"),
            series: vec![Series::line("|h_strip - h_chordal|", "#1a6faf", dev_curve)],
            href: Some((bound, format!("{FROZEN_C}*sqrt(dt)"))),
        }
        .render(),
    )];

    let s_final = tc.s[compared_steps];
    let summary = vec![
        format!(
            "compared {compared_steps} of {} chordal steps (t up to {:.5}, s up to {:.5})",
            path.n_steps(),
            rows[compared_steps].t,
            s_final
        ),
        format!("max deviation {max_dev:.4e} vs frozen bound {bound:.4e}"),
    ];

    let report = json!({
        "kappa": params.kappa(),
        "dt": dt,
        "horizon": horizon,
        "z0": {"re": z0.re, "im": z0.im},
        "chordal_steps": path.n_steps(),
        "chordal_stop": format!("{:?}", final_state.stop_reason),
        "compared_steps": compared_steps,
        "s_reached": s_final,
        "max_deviation": max_dev,
        "bound": bound,
        "frozen_c": FROZEN_C,
    });

    Ok(CommandOutput { report, tables: vec![table], plots, verdicts, summary })
}
