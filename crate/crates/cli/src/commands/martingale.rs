//! `martingale`: Monte Carlo constancy of E[F(ĥ_s(w))] across slice times,
//! with the raw coordinate Re ĥ_s(w) as a drifting negative control.

use anyhow::{bail, Result};
use serde_json::json;
use sle_rho_core::observables::{
    f_value, martingale_path_slices, martingale_report, FreezePolicy, MartingaleReport,
    QuadratureSpec,
};
use sle_rho_core::strip::{strip_initial, StripState};
use sle_rho_core::Complex64;

use crate::config::RunConfig;
use crate::ensemble::par_streams;
use crate::report::{g17, CommandOutput, Table, Verdict};
use crate::svg::{Chart, Series};

/// Canonical observation point: the centre of the midline.
pub fn observation_point() -> Complex64 {
    Complex64::new(0.0, core::f64::consts::FRAC_PI_2)
}

/// Normalized-deviation threshold for the constancy verdicts.
pub const THRESHOLD: f64 = 3.5;

fn report_json(r: &MartingaleReport) -> serde_json::Value {
    json!({
        "slice_times": r.slice_times,
        "means": r.means,
        "std_errors": r.std_errors,
        "slice_counts": r.slice_counts,
        "n_paths": r.n_paths,
        "mean0": r.mean0,
        "max_deviation": r.max_deviation,
        "threshold": r.threshold,
        "pass": r.pass,
        "policy": r.policy,
        "note": r.note,
    })
}

fn chart(name: &str, r: &MartingaleReport) -> (String, String) {
    let pts: Vec<(f64, f64)> =
        r.slice_times.iter().zip(&r.means).map(|(&s, &m)| (s, m)).collect();
    let bars: Vec<f64> = r.std_errors.clone();
    (
        name.to_string(),
        Chart {
            title: format!("{name}: max deviation {:.2} (threshold {})", r.max_deviation, r.threshold),
            x_label: String::from("s"),
            y_label: String::from("ensemble mean"),
            series: vec![Series::scatter_with_bars("mean +/- SE", "#1a6faf", pts, bars)],
            href: Some((r.mean0, String::from("time-0 value"))),
        }
        .render(),
    )
}

pub fn run(config: &RunConfig, seed: u64) -> Result<CommandOutput> {
    let params = config.sle_params()?;
    if params.n_marked() != 1 {
        bail!(
            "martingale: params must carry exactly one (rho, x) pair (got {})",
            params.n_marked()
        );
    }
    if !(params.x()[0] < 0.0) || params.xi0() != 0.0 {
        bail!("martingale: the strip normalization needs params.x[0] < 0 and params.xi0 = 0");
    }
    let rho = params.rho()[0];
    let spec = QuadratureSpec::new(params.kappa(), rho, config.numerics.rel_tol)
        .map_err(|e| anyhow::anyhow!("martingale: {e}"))?;

    let w = observation_point();
    let ds = config.numerics.dt;
    let s_max = config.numerics.horizon;
    let scheme = config.strip_scheme();
    let slices = config.mc.slice_times.clone();
    let n = config.mc.n_paths;

    let path_rows = par_streams(n, |stream| {
        martingale_path_slices(&params, w, ds, s_max, &scheme, &slices, seed, stream)
    });
    let mut rows: Vec<Vec<StripState>> = Vec::with_capacity(n);
    for (k, r) in path_rows.into_iter().enumerate() {
        match r {
            Ok(row) => rows.push(row),
            Err(e) => bail!("martingale: path {k} failed: {e}"),
        }
    }

    let initial = strip_initial(&params, &[w]).map_err(|e| anyhow::anyhow!("{e}"))?;
    let f_of = |st: &StripState| -> Result<Complex64, sle_rho_core::Error> {
        f_value(st.h_points[0].h, &spec)
    };
    let f0 = f_of(&initial).map_err(|e| anyhow::anyhow!("martingale: F at time 0: {e}"))?;

    let re_obs = |st: &StripState| f_of(st).map(|c| c.re).unwrap_or(f64::NAN);
    let im_obs = |st: &StripState| f_of(st).map(|c| c.im).unwrap_or(f64::NAN);
    let control_obs = |st: &StripState| st.h_points[0].h.re;

    let policy = FreezePolicy::FreezeLast;
    let re_report = martingale_report(&rows, re_obs, f0.re, &slices, THRESHOLD, policy)
        .map_err(|e| anyhow::anyhow!("martingale: {e}"))?;
    let im_report = martingale_report(&rows, im_obs, f0.im, &slices, THRESHOLD, policy)
        .map_err(|e| anyhow::anyhow!("martingale: {e}"))?;
    let control_report =
        martingale_report(&rows, control_obs, initial.h_points[0].h.re, &slices, THRESHOLD, policy)
            .map_err(|e| anyhow::anyhow!("martingale: {e}"))?;

    let mut table = Table::new(
        "martingale",
        &[
            "s",
            "count",
            "mean_re_f",
            "se_re_f",
            "dev_re_f",
            "mean_im_f",
            "se_im_f",
            "dev_im_f",
            "mean_control",
            "se_control",
            "dev_control",
        ],
    );
    let dev = |mean: f64, se: f64, mean0: f64| -> f64 {
        if se > 0.0 {
            (mean - mean0).abs() / se
        } else if mean == mean0 {
            0.0
        } else {
            f64::INFINITY
        }
    };
    for j in 0..slices.len() {
        table.push(vec![
            g17(slices[j]),
            re_report.slice_counts[j].to_string(),
            g17(re_report.means[j]),
            g17(re_report.std_errors[j]),
            g17(dev(re_report.means[j], re_report.std_errors[j], f0.re)),
            g17(im_report.means[j]),
            g17(im_report.std_errors[j]),
            g17(dev(im_report.means[j], im_report.std_errors[j], f0.im)),
            g17(control_report.means[j]),
            g17(control_report.std_errors[j]),
            g17(dev(
                control_report.means[j],
                control_report.std_errors[j],
                control_report.mean0,
            )),
        ]);
    }

    let verdicts = vec![
        Verdict::new(
            "re-f-constant",
            re_report.pass,
            format!(
                "max deviation {:.2} over {} slices (threshold {THRESHOLD})",
                re_report.max_deviation,
                slices.len()
            ),
        ),
        Verdict::new(
            "im-f-constant",
            im_report.pass,
            format!(
                "max deviation {:.2} over {} slices (threshold {THRESHOLD})",
                im_report.max_deviation,
                slices.len()
            ),
        ),
        Verdict::new(
            "negative-control-detects-drift",
            !control_report.pass,
            format!(
                "raw Re h deviation {:.2} must exceed the threshold, or the test has no power",
                control_report.max_deviation
            ),
        ),
    ];

    let plots = vec![
        chart("martingale_re_f", &re_report),
        chart("martingale_im_f", &im_report),
        chart("martingale_control", &control_report),
    ];

    let summary = vec![
        format!(
            "martingale constancy at w = i*pi/2: kappa = {}, rho = {rho}, {n} paths, {} slices",
            params.kappa(),
            slices.len()
        ),
        format!(
            "Re F max deviation {:.2}, Im F {:.2}, control {:.2} (threshold {THRESHOLD})",
            re_report.max_deviation, im_report.max_deviation, control_report.max_deviation
        ),
    ];

    let report = json!({
        "kappa": params.kappa(),
        "rho": rho,
        "w": {"re": w.re, "im": w.im},
        "ds": ds,
        "s_max": s_max,
        "n_paths": n,
        "f0": {"re": f0.re, "im": f0.im},
        "re_f": report_json(&re_report),
        "im_f": report_json(&im_report),
        "control": report_json(&control_report),
    });

    Ok(CommandOutput { report, tables: vec![table], plots, verdicts, summary })
}
