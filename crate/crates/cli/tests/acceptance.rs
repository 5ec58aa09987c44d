//! Acceptance suite: ten go/no-go criteria spanning the exact algebra, the
//! Loewner solvers, the singular quadrature, and the Monte Carlo ensembles.
//! Every criterion always runs and prints exactly one
//! `ACCEPTANCE <n> <name>: PASS|FAIL (<evidence>; <time>)` line; the test
//! fails at the end if any line is a FAIL. Criteria with a hard runtime
//! bound also fail when they blow their budget. All seeds are fixed up
//! front, so a red line here always reproduces.

use std::f64::consts::FRAC_PI_2;
use std::time::{Duration, Instant};

use sle_rho::config::parse_config;
use sle_rho::ensemble::par_streams;
use sle_rho::report::RunOutcome;
use sle_rho_core::cft::{self, SleParams};
use sle_rho_core::chordal::{self, run_path, slit_advance_point};
use sle_rho_core::observables::{
    classify_side, f_profile, martingale_ode_residual, p_left, p_left_decided, swallowed_weight,
    QuadratureSpec, SideCounts,
};
use sle_rho_core::rng::SplitRng;
use sle_rho_core::strip::{
    chordal_strip_image, map_to_strip, matched_strip_increments, strip_drive_matched, ExtReal,
    StripFate, StripScheme, StripState, TrackedPoint,
};
use sle_rho_core::virasoro::{self, Scalar};
use sle_rho_core::Complex64;

type Check = Result<String, String>;

macro_rules! require {
    ($cond:expr, $($fmt:tt)*) => {
        if !($cond) {
            return Err(format!($($fmt)*));
        }
    };
}

fn err_str<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Criterion 1 — level-2 null vectors at the six benchmark kappas, with a
/// generic-weight negative control kept clear of the Kac zeros. Rational
/// kappas go through the exact-rational arithmetic path (the module's
/// declared policy), where the pairing and determinant must vanish
/// identically; the float path is additionally held to 1e-10 wherever its
/// inputs are exactly representable (all five dyadic kappas — at 8/3 the
/// square root puts the float residual at the sqrt(eps) rounding floor).
fn c1_null_vectors() -> Check {
    let kappas: [(i64, i64); 6] = [(2, 1), (8, 3), (3, 1), (4, 1), (6, 1), (8, 1)];
    let mut worst_residual = 0.0f64;
    let mut worst_det_rel = 0.0f64;
    let mut control_floor = f64::INFINITY;
    for &(num, den) in &kappas {
        let kappa = num as f64 / den as f64;
        let exact_kappa = virasoro::BigRational::new(num.into(), den.into());
        let (pairing, det) = virasoro::null_vector_exact(&exact_kappa).map_err(err_str)?;
        require!(
            Scalar::is_zero(&pairing) && Scalar::is_zero(&det),
            "kappa {num}/{den}: exact null pairing or determinant is nonzero"
        );
        let check = virasoro::null_vector_residual(kappa).map_err(err_str)?;
        if den == 1 {
            require!(
                check.residual < 1e-10,
                "kappa {kappa}: float null-vector residual {:.3e} not < 1e-10",
                check.residual
            );
            worst_residual = worst_residual.max(check.residual);
        }
        require!(
            check.det_rel.abs() < 1e-10,
            "kappa {kappa}: normalized Gram determinant {:.3e} not < 1e-10",
            check.det_rel
        );
        worst_det_rel = worst_det_rel.max(check.det_rel.abs());

        let c = cft::central_charge(kappa).map_err(err_str)?;
        let zeros = [
            cft::kac_weight(1, 1, kappa).map_err(err_str)?,
            cft::kac_weight(1, 2, kappa).map_err(err_str)?,
            cft::kac_weight(2, 1, kappa).map_err(err_str)?,
        ];
        let h = [0.7, 0.77, 0.83, 0.91]
            .into_iter()
            .find(|h| zeros.iter().all(|z| (h - z).abs() > 0.02))
            .ok_or_else(|| format!("kappa {kappa}: no generic weight clear of the Kac zeros"))?;
        let gram = virasoro::gram_matrix(&c, &h, 2).map_err(err_str)?;
        let det = virasoro::determinant(&gram);
        require!(
            det.abs() > 1e-3,
            "kappa {kappa}: generic-weight |det| {:.3e} not > 1e-3",
            det.abs()
        );
        control_floor = control_floor.min(det.abs());
    }
    Ok(format!(
        "6 kappas: exact pairing and det identically 0; float residual <= {worst_residual:.1e}, |det|/scale^2 <= {worst_det_rel:.1e}, generic-h |det| >= {control_floor:.2}"
    ))
}

/// Criterion 2 — the closed-form drift equals kappa times the central
/// difference of log D on 200 randomized configurations.
fn c2_drift_identity() -> Check {
    let mut rng = SplitRng::new(0xD21F_71DE, 0);
    let h = 1e-5;
    let mut worst = 0.0f64;
    for instance in 0..200 {
        let kappa = 1.0 + 8.0 * rng.uniform();
        let n = (rng.uniform() * 5.0).floor() as usize; // weight vectors of length 0..=4
        let mut x: Vec<f64> = Vec::with_capacity(n);
        let mut attempts = 0u32;
        while x.len() < n {
            attempts += 1;
            if attempts > 10_000 {
                return Err(format!("instance {instance}: marked-point sampler stalled"));
            }
            let cand = 12.0 * rng.uniform() - 6.0;
            if cand.abs() >= 0.5 && x.iter().all(|&v| (cand - v).abs() >= 0.5) {
                x.push(cand);
            }
        }
        x.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        let rho: Vec<f64> = (0..n).map(|_| 8.0 * rng.uniform() - 4.0).collect();
        let params = SleParams::new(kappa, rho, x.clone(), 0.0).map_err(err_str)?;
        // Evaluation point clear of every marked point; the x-range is wider
        // than the blocked neighbourhoods, so this terminates.
        let xi = loop {
            let cand = 16.0 * rng.uniform() - 8.0;
            if x.iter().all(|&v| (cand - v).abs() >= 0.5) {
                break cand;
            }
        };
        let plus = cft::log_correlator_d(xi + h, &params).map_err(err_str)?;
        let minus = cft::log_correlator_d(xi - h, &params).map_err(err_str)?;
        let fd = kappa * (plus - minus) / (2.0 * h);
        let closed = cft::drift_f(xi, &params).map_err(err_str)?;
        let rel = (fd - closed).abs() / closed.abs().max(1.0);
        require!(
            rel < 1e-6,
            "instance {instance} (kappa {kappa:.3}, {n} weights): rel err {rel:.3e} not < 1e-6"
        );
        worst = worst.max(rel);
    }
    Ok(format!("200 randomized configurations: worst rel err {worst:.1e}"))
}

/// Criterion 3 — the vertex-charge ledger sums to zero on 1000 random
/// configurations.
fn c3_charge_neutrality() -> Check {
    let mut rng = SplitRng::new(0xCA4E_0003, 0);
    let mut worst = 0.0f64;
    for instance in 0..1000 {
        let kappa = 0.3 + 11.7 * rng.uniform();
        let n = (rng.uniform() * 5.0).floor() as usize;
        let rho: Vec<f64> = (0..n).map(|_| 10.0 * rng.uniform() - 5.0).collect();
        let mut x: Vec<f64> = (0..n)
            .map(|j| -(1.0 + 1.5 * j as f64) - rng.uniform())
            .collect();
        x.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        let params = SleParams::new(kappa, rho, x, 0.0).map_err(err_str)?;
        let total = cft::charge_ledger(&params).total();
        require!(
            total.abs() < 1e-12,
            "instance {instance} (kappa {kappa:.3}): |charge total| {:.3e} not < 1e-12",
            total.abs()
        );
        worst = worst.max(total.abs());
    }
    Ok(format!("1000 random ledgers: worst |total| {worst:.1e}"))
}

/// Criterion 4 — composed slit updates under constant driving reproduce
/// sqrt(z^2 + 4t) across step partitions, and the large-|z| capacity
/// expansion holds at y = 1e3.
fn c4_constant_driving() -> Check {
    let t_total = 0.7;
    let zs = [
        Complex64::new(0.3, 0.1),
        Complex64::new(-1.2, 0.8),
        Complex64::new(2.0, 2.0),
        Complex64::new(-0.5, 3.0),
        Complex64::new(5.0, 0.04),
        Complex64::new(3.0, 0.01),
        Complex64::new(-4.0, 0.5),
        Complex64::new(0.0, 100.0),
    ];
    let mut partitions: Vec<Vec<f64>> = [1usize, 2, 10, 137, 1000]
        .iter()
        .map(|&n| vec![t_total / n as f64; n])
        .collect();
    // One uneven partition: geometric steps, ratio 5/4.
    let weights: Vec<f64> = (0..12).map(|k| 1.25f64.powi(k)).collect();
    let wsum: f64 = weights.iter().sum();
    partitions.push(weights.into_iter().map(|v| v * t_total / wsum).collect());

    let mut worst = 0.0f64;
    for dts in &partitions {
        let t: f64 = dts.iter().sum();
        for &z in &zs {
            let mut g = z;
            for &dt in dts {
                g = slit_advance_point(g, 0.0, dt);
            }
            let mut closed = (z * z + Complex64::new(4.0 * t, 0.0)).sqrt();
            if closed.im < 0.0 {
                closed = -closed;
            }
            let rel = (g - closed).norm() / closed.norm();
            require!(
                rel < 1e-12,
                "z = {z}, {} steps: rel err {rel:.3e} not < 1e-12",
                dts.len()
            );
            worst = worst.max(rel);
        }
    }

    // Capacity expansion g_t(iy) - iy ~ 2t/(iy) at y = 1e3, through 1000
    // composed numerical steps rather than the closed form.
    let y = 1e3;
    let z = Complex64::new(0.0, y);
    let mut g = z;
    for _ in 0..1000 {
        g = slit_advance_point(g, 0.0, 1e-3);
    }
    let t = 1.0;
    let predicted = Complex64::new(0.0, -2.0 * t / y); // 2t/(iy)
    let cap_rel = ((g - z) - predicted).norm() / predicted.norm();
    require!(
        cap_rel < 1e-3,
        "capacity expansion rel err {cap_rel:.3e} not < 1e-3"
    );
    Ok(format!(
        "{} compositions: worst rel err {worst:.1e}; capacity term rel err {cap_rel:.1e}",
        partitions.len() * zs.len()
    ))
}

/// Criterion 5 — the accumulated F profile satisfies the hypergeometric-type
/// second-order ODE across u in [0.5, 5] at kappa = 6, rho = 0.5.
fn c5_f_ode_residual() -> Check {
    let spec = QuadratureSpec::new(6.0, 0.5, 1e-9)
        .map_err(err_str)?
        .with_split_point(0.45)
        .map_err(err_str)?;
    let h = 5e-3;
    let prof = f_profile(&spec, 0.5 - 2.0 * h, 5.0 + 2.0 * h, h).map_err(err_str)?;
    let resid = martingale_ode_residual(&prof.u, &prof.f, &spec).map_err(err_str)?;
    require!(resid < 1e-6, "max ODE residual {resid:.3e} not < 1e-6");
    Ok(format!(
        "max ODE residual {resid:.1e} over u in [0.5, 5] ({} samples, h = {h})",
        prof.u.len()
    ))
}

/// Frozen analytic left-passage values on the midline grid for kappa = 6,
/// rho = 0.5, x1 = -1 (independently cross-checked high-precision quadrature,
/// 20 digits). A drift here means the quadrature regressed, and the MC
/// comparison below would be against a wrong target.
const P_LEFT_FROZEN: [f64; 5] = [
    0.80687218354133947226,
    0.68968587687999749521,
    0.53658582190252437106,
    0.40441178598241337033,
    0.31982282323060352529,
];
/// Frozen swallowed weight at the midline centre for the same configuration.
const SW_FROZEN_MID: f64 = 0.250663209952;

/// Criterion 6 — full left-passage pipeline: 5 midline points, 1e4 paths per
/// point at ds = 1e-3, every point within 3 standard errors of the analytic
/// value, swallowed fractions reported.
fn c6_lpp_mc(dir: &str) -> Check {
    let config_json = serde_json::json!({
        "command": "lpp",
        "params": {"kappa": 6.0, "rho": [0.5], "x": [-1.0]},
        "numerics": {"dt": 1e-3, "horizon": 200.0, "rel_tol": 1e-9},
        "mc": {"n_paths": 10_000, "seed": 6001},
        "output": {"directory": dir, "formats": ["csv", "json"]},
    });
    let config = parse_config(&config_json.to_string()).map_err(err_str)?;
    let outcome = sle_rho::run(&config).map_err(err_str)?;
    verdict(&outcome, "mc-within-3se")?;
    verdict(&outcome, "horizon-resolves-paths")?;
    for v in &outcome.verdicts {
        require!(v.pass, "verdict {} failed: {}", v.name, v.detail);
    }

    let body = read_report(dir)?;
    let points = body["body"]["points"]
        .as_array()
        .ok_or("report missing points array")?;
    require!(points.len() == 5, "expected 5 points, got {}", points.len());
    let mut max_oracle_dev = 0.0f64;
    let mut max_dev_se = 0.0f64;
    let mut sw_freqs = Vec::new();
    for (i, pt) in points.iter().enumerate() {
        let p = pt["p_left_analytic"]
            .as_f64()
            .ok_or("missing p_left_analytic")?;
        require!(
            (p - P_LEFT_FROZEN[i]).abs() < 1e-8,
            "analytic p_left at point {i} drifted from frozen value: {p:.12} vs {:.12}",
            P_LEFT_FROZEN[i]
        );
        max_oracle_dev = max_oracle_dev.max((p - P_LEFT_FROZEN[i]).abs());
        let dev_se = pt["dev_se"].as_f64().ok_or("missing dev_se")?;
        require!(dev_se.is_finite(), "point {i}: non-finite dev_se");
        max_dev_se = max_dev_se.max(dev_se);
        let swf = pt["swallowed_freq"].as_f64().ok_or("missing swallowed_freq")?;
        sw_freqs.push(format!("{swf:.3}"));
    }
    let sw_mid = points[2]["swallowed_analytic"]
        .as_f64()
        .ok_or("missing swallowed_analytic")?;
    require!(
        (sw_mid - SW_FROZEN_MID).abs() < 1e-9,
        "midline swallowed weight drifted from frozen value: {sw_mid:.12}"
    );
    Ok(format!(
        "5 points x 1e4 paths within 3 SE (max {max_dev_se:.2} SE); swallowed fractions [{}]; analytic vs frozen {max_oracle_dev:.0e}",
        sw_freqs.join(", ")
    ))
}

/// Criterion 7 — E[Re F] and E[Im F] stay flat across six slice times while
/// the raw un-compensated observable drifts visibly.
fn c7_martingale(dir: &str) -> Check {
    let config_json = serde_json::json!({
        "command": "martingale",
        "params": {"kappa": 6.0, "rho": [0.5], "x": [-1.0]},
        "numerics": {"dt": 1e-3, "horizon": 5.0, "rel_tol": 1e-9},
        "mc": {"n_paths": 10_000, "slice_times": [0.5, 1.0, 2.0, 3.0, 4.0, 5.0], "seed": 7001},
        "output": {"directory": dir, "formats": ["csv", "json"]},
    });
    let config = parse_config(&config_json.to_string()).map_err(err_str)?;
    let outcome = sle_rho::run(&config).map_err(err_str)?;
    verdict(&outcome, "re-f-constant")?;
    verdict(&outcome, "im-f-constant")?;
    verdict(&outcome, "negative-control-detects-drift")?;
    for v in &outcome.verdicts {
        require!(v.pass, "verdict {} failed: {}", v.name, v.detail);
    }
    let body = read_report(dir)?;
    let dev = |key: &str| -> Result<f64, String> {
        body["body"][key]["max_deviation"]
            .as_f64()
            .ok_or_else(|| format!("report missing {key}.max_deviation"))
    };
    let (re_dev, im_dev, ctrl_dev) = (dev("re_f")?, dev("im_f")?, dev("control")?);
    Ok(format!(
        "6 slices x 1e4 paths: Re F dev {re_dev:.2}, Im F dev {im_dev:.2} (< 3.5); raw-observable control dev {ctrl_dev:.0} fails as required"
    ))
}

/// Criterion 8 — the dipolar weight (kappa-6)/2 at kappa = 6: analytic
/// left/right symmetry at the midline centre to 1e-8, and the MC ensemble
/// splits its decided mass evenly within 3 SE.
fn c8_dipolar_symmetry() -> Check {
    let spec = QuadratureSpec::new(6.0, 0.0, 1e-9).map_err(err_str)?;
    let w = Complex64::new(0.0, FRAC_PI_2);
    let p = p_left(w, &spec).map_err(err_str)?;
    let sw = swallowed_weight(w, &spec).map_err(err_str)?;
    let balance = 2.0 * p + sw - 1.0;
    require!(
        balance.abs() < 1e-8,
        "2 p_left + swallowed - 1 = {balance:.3e} not within 1e-8"
    );
    let pd = p_left_decided(w, &spec).map_err(err_str)?;
    require!(
        (pd - 0.5).abs() < 1e-8,
        "decided-conditional p_left {pd:.12} not 0.5 within 1e-8"
    );
    require!(
        (p - 0.38372994865219015918).abs() < 1e-8,
        "p_left at the midline centre drifted from frozen value: {p:.12}"
    );
    // Reflection identity off the axis: left weight at +a mirrors right
    // weight at -a, and the swallowed weight is even in a.
    let (wr, wl) = (Complex64::new(1.0, FRAC_PI_2), Complex64::new(-1.0, FRAC_PI_2));
    let pr = p_left(wr, &spec).map_err(err_str)?;
    let pl = p_left(wl, &spec).map_err(err_str)?;
    let sr = swallowed_weight(wr, &spec).map_err(err_str)?;
    let sl = swallowed_weight(wl, &spec).map_err(err_str)?;
    require!(
        (sr - sl).abs() < 1e-8,
        "swallowed weight not even: {sr:.12} vs {sl:.12}"
    );
    let reflect = pr + pl + sr - 1.0;
    require!(
        reflect.abs() < 1e-8,
        "reflection identity defect {reflect:.3e} not within 1e-8"
    );

    // MC at the midline centre: driftless dynamics, so the decided mass must
    // split evenly and the half-weight estimator must centre on 1/2.
    let params = SleParams::new(6.0, vec![0.0], vec![-1.0], 0.0).map_err(err_str)?;
    let scheme = StripScheme::default();
    let results = par_streams(10_000, |stream| {
        classify_side(&params, w, 1e-3, 200.0, &scheme, 8001, stream)
    });
    let mut counts = SideCounts { left: 0, right: 0, swallowed: 0, undecided: 0 };
    for r in results {
        counts.record(r.map_err(err_str)?.label);
    }
    require!(counts.undecided == 0, "{} undecided paths", counts.undecided);
    let ndec = counts.left + counts.right;
    require!(ndec >= 2, "no decided paths");
    let freq_dec = counts.left as f64 / ndec as f64;
    let se_dec = 0.5 / (ndec as f64).sqrt();
    let dev_dec = (freq_dec - 0.5) / se_dec;
    require!(
        dev_dec.abs() <= 3.0,
        "decided left-frequency {freq_dec:.4} is {dev_dec:.2} SE from 0.5"
    );
    let n = counts.total() as f64;
    let est = (counts.left as f64 + 0.5 * counts.swallowed as f64) / n;
    let var = (counts.left as f64 + 0.25 * counts.swallowed as f64) / n - est * est;
    let se_est = (var / n).sqrt();
    let dev_est = (est - 0.5) / se_est;
    require!(
        dev_est.abs() <= 3.0,
        "half-weight estimator {est:.4} is {dev_est:.2} SE from 0.5"
    );
    Ok(format!(
        "analytic symmetry defects <= {:.0e}; MC 1e4 paths: decided freq {freq_dec:.4} ({dev_dec:+.2} SE), half-weight {est:.4} ({dev_est:+.2} SE), swallowed {:.3}",
        balance.abs().max((pd - 0.5).abs()).max((sr - sl).abs()).max(reflect.abs()),
        counts.swallowed as f64 / n
    ))
}

/// Criterion 9 — a chordal path pushed through the coordinate change matches
/// the strip stepper driven by the matched increments, within the frozen
/// regression bound C sqrt(dt), C = 2.0.
fn c9_strip_chordal() -> Check {
    let params = SleParams::new(6.0, vec![0.5], vec![-1.0], 0.0).map_err(err_str)?;
    let dt = 1e-4;
    let (_, path) = run_path(&params, 0.1, dt, None, 314, 0).map_err(err_str)?;
    let z = Complex64::new(0.0, 1.0);
    let w0 = map_to_strip(z, -1.0).map_err(err_str)?;
    let incs = matched_strip_increments(&path, &params).map_err(err_str)?;
    let state0 = StripState {
        s: 0.0,
        eta: 0.0,
        h_points: vec![TrackedPoint { h: w0, fate: StripFate::Tracking }],
        tilde_x: vec![ExtReal::NegInf],
    };
    let strip_states =
        strip_drive_matched(&state0, &incs, &params, &StripScheme::default()).map_err(err_str)?;
    let rows = chordal::replay_states(&path, &params);
    let mut max_dev = 0.0f64;
    let mut g = z;
    for k in 0..=path.n_steps() {
        let row = &rows[k];
        let h_chordal = chordal_strip_image(g, row.xi, row.x_img[0]);
        max_dev = max_dev.max((strip_states[k].h_points[0].h - h_chordal).norm());
        if k < path.n_steps() {
            g = slit_advance_point(g, path.xi_values[k], path.step_dt(k));
        }
    }
    let bound = 2.0 * dt.sqrt();
    require!(
        max_dev < bound,
        "max deviation {max_dev:.3e} not < frozen bound {bound:.3e}"
    );
    Ok(format!(
        "max deviation {max_dev:.1e} < 2.0 sqrt(dt) = {bound:.0e} over {} steps",
        path.n_steps()
    ))
}

/// Criterion 10 — a run with a drawn seed writes a manifest that alone
/// reproduces every numeric artifact bit-for-bit.
fn c10_determinism(dir_a: &str, dir_b: &str) -> Check {
    let config_json = serde_json::json!({
        "command": "lpp",
        "params": {"kappa": 6.0, "rho": [0.5], "x": [-1.0]},
        "numerics": {"dt": 1e-2, "horizon": 200.0},
        "mc": {"n_paths": 100},
        "output": {"directory": dir_a, "formats": ["csv", "json", "svg"]},
    });
    let config_a = parse_config(&config_json.to_string()).map_err(err_str)?;
    let outcome_a = sle_rho::run(&config_a).map_err(err_str)?;
    let manifest: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(&outcome_a.manifest_path).map_err(err_str)?,
    )
    .map_err(err_str)?;
    let seed = manifest["seed"].as_u64().ok_or("manifest missing seed")?;
    let mut config_b = parse_config(&manifest["config"].to_string())
        .map_err(|e| format!("manifest config echo does not re-parse: {e}"))?;
    require!(
        config_b.mc.seed == Some(seed),
        "manifest config echo does not carry the drawn seed"
    );
    config_b.output.directory = dir_b.to_string();
    let outcome_b = sle_rho::run(&config_b).map_err(err_str)?;
    require!(
        outcome_a.outputs_sha256 == outcome_b.outputs_sha256,
        "outputs hash differs: {} vs {}",
        outcome_a.outputs_sha256,
        outcome_b.outputs_sha256
    );
    require!(
        outcome_a.artifact_names == outcome_b.artifact_names,
        "artifact sets differ"
    );
    let mut compared = 0usize;
    for name in &outcome_a.artifact_names {
        let a = std::fs::read(format!("{dir_a}/{name}")).map_err(err_str)?;
        let b = std::fs::read(format!("{dir_b}/{name}")).map_err(err_str)?;
        require!(a == b, "artifact {name} differs between runs");
        compared += 1;
    }
    require!(
        compared >= 3,
        "expected csv, json and svg artifacts, compared only {compared}"
    );
    Ok(format!(
        "drawn seed {seed} recorded; {compared} artifacts byte-identical on manifest rerun; outputs sha256 {}..",
        &outcome_a.outputs_sha256[..12]
    ))
}

fn verdict<'a>(outcome: &'a RunOutcome, name: &str) -> Result<(), String> {
    let v = outcome
        .verdicts
        .iter()
        .find(|v| v.name == name)
        .ok_or_else(|| format!("missing verdict {name}"))?;
    if v.pass {
        Ok(())
    } else {
        Err(format!("verdict {name} failed: {}", v.detail))
    }
}

fn read_report(dir: &str) -> Result<serde_json::Value, String> {
    serde_json::from_str(&std::fs::read_to_string(format!("{dir}/report.json")).map_err(err_str)?)
        .map_err(err_str)
}

fn run_criterion(
    no: u32,
    name: &str,
    budget: Option<Duration>,
    body: impl FnOnce() -> Check,
    failures: &mut Vec<String>,
) {
    let started = Instant::now();
    let result = body();
    let elapsed = started.elapsed().as_secs_f64();
    let (mut pass, detail) = match result {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    let timing = match budget {
        Some(b) if elapsed > b.as_secs_f64() => {
            pass = false;
            format!("{elapsed:.2}s OVER the {:.0}s budget", b.as_secs_f64())
        }
        Some(b) => format!("{elapsed:.2}s, budget {:.0}s", b.as_secs_f64()),
        None => format!("{elapsed:.1}s"),
    };
    let line = format!(
        "ACCEPTANCE {no} {name}: {} ({detail}; {timing})",
        if pass { "PASS" } else { "FAIL" }
    );
    println!("{line}");
    if !pass {
        failures.push(line);
    }
}

#[test]
fn acceptance_criteria() {
    let base = std::env::temp_dir().join(format!("sle-rho-acceptance-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&base);
    let base = base.to_string_lossy().into_owned();
    let mut failures = Vec::new();

    run_criterion(1, "null-vector suite", Some(Duration::from_secs(1)), c1_null_vectors, &mut failures);
    run_criterion(2, "drift identity", Some(Duration::from_secs(1)), c2_drift_identity, &mut failures);
    run_criterion(3, "charge neutrality", Some(Duration::from_secs(1)), c3_charge_neutrality, &mut failures);
    run_criterion(4, "constant-driving oracle", Some(Duration::from_secs(1)), c4_constant_driving, &mut failures);
    run_criterion(5, "F-ODE residual", Some(Duration::from_secs(10)), c5_f_ode_residual, &mut failures);
    run_criterion(6, "left-passage MC vs analytic", None, || c6_lpp_mc(&format!("{base}/c6")), &mut failures);
    run_criterion(7, "martingale constancy", None, || c7_martingale(&format!("{base}/c7")), &mut failures);
    run_criterion(8, "dipolar symmetry", None, c8_dipolar_symmetry, &mut failures);
    run_criterion(9, "strip/chordal consistency", Some(Duration::from_secs(60)), c9_strip_chordal, &mut failures);
    run_criterion(
        10,
        "determinism",
        None,
        || c10_determinism(&format!("{base}/c10a"), &format!("{base}/c10b")),
        &mut failures,
    );

    if failures.is_empty() {
        let _ = std::fs::remove_dir_all(&base);
        println!("acceptance suite: 10/10 PASS");
    }
    assert!(
        failures.is_empty(),
        "{} acceptance criteria failed:\n{}",
        failures.len(),
        failures.join("\n")
    );
}
