//! `weights`: closed-form CFT arithmetic for the configured (κ, ρ̲, x̲) —
//! central charge, conformal weights, the charge ledger, and the free-field
//! jump/angle table — with the charge-neutrality and drift-identity checks.

use anyhow::Result;
use serde_json::json;
use sle_rho_core::cft;

use crate::config::RunConfig;
use crate::report::{g17, CommandOutput, Table, Verdict};

/// Default free-field coupling for the jump table (jumps scale as 1/√g and
/// the angles are g-independent, so the convention only labels the column).
const COUPLING_G: f64 = 1.0;

pub fn run(config: &RunConfig) -> Result<CommandOutput> {
    let params = config.sle_params()?;
    let kappa = params.kappa();

    let c = cft::central_charge(kappa)?;
    let h12 = cft::kac_weight(1, 2, kappa)?;
    let h21 = cft::kac_weight(2, 1, kappa)?;
    let rho_inf = cft::rho_infinity(&params);
    let ledger = cft::charge_ledger(&params);
    let bc = cft::free_field_bc(&params, COUPLING_G)?;

    // Per-weight rows: the configured ρ_j, then the induced ρ∞ entry.
    let labels: Vec<String> = (0..params.n_marked())
        .map(|j| format!("rho[{j}]"))
        .chain(std::iter::once(String::from("rho_inf")))
        .collect();
    let rhos: Vec<f64> = params.rho().iter().copied().chain([rho_inf]).collect();

    let mut table = Table::new("weights", &["label", "rho", "delta", "charge", "angle", "jump"]);
    let mut entries = Vec::new();
    for (j, (label, &rho)) in labels.iter().zip(&rhos).enumerate() {
        let delta = cft::delta_from_rho(rho, kappa)?;
        let charge = ledger.boundary[j];
        let angle = bc.angles[j];
        let jump = bc.jumps[j];
        table.push(vec![
            label.clone(),
            g17(rho),
            g17(delta),
            g17(charge),
            g17(angle),
            jump.map(g17).unwrap_or_default(),
        ]);
        entries.push(json!({
            "label": label,
            "rho": rho,
            "delta": delta,
            "charge": charge,
            "angle": angle,
            "jump": jump,
        }));
    }

    let neutrality = ledger.total().abs();
    let mut verdicts = vec![Verdict::new(
        "charge-neutrality",
        neutrality < 1e-12,
        format!("|background + interface + boundary charges| = {:.3e} (tolerance 1e-12)", neutrality),
    )];

    // Drift identity at the start point: κ ∂ξ log D vs Σ ρ_j/(ξ − x_j),
    // by central differences with the configured fd_step.
    let mut drift_report = serde_json::Value::Null;
    if params.n_marked() > 0 {
        let xi = params.xi0();
        let h = config.numerics.fd_step;
        let f_closed = cft::drift_f(xi, &params)?;
        let lp = cft::log_correlator_d(xi + h, &params)?;
        let lm = cft::log_correlator_d(xi - h, &params)?;
        let f_fd = kappa * (lp - lm) / (2.0 * h);
        let rel = (f_closed - f_fd).abs() / f_closed.abs().max(1.0);
        verdicts.push(Verdict::new(
            "drift-identity",
            rel < 1e-6,
            format!(
                "closed form {} vs kappa * d/dxi log D {} (rel err {:.3e}, tolerance 1e-6)",
                g17(f_closed),
                g17(f_fd),
                rel
            ),
        ));
        drift_report = json!({
            "xi": xi,
            "closed_form": f_closed,
            "finite_difference": f_fd,
            "fd_step": h,
            "rel_err": rel,
        });
    }

    let mut summary = vec![
        format!("kappa = {kappa}"),
        format!("central charge c = {c}"),
        format!("h_(1,2) = {h12}   h_(2,1) = {h21}"),
        format!("rho_inf = {rho_inf}"),
    ];
    for (label, &rho) in labels.iter().zip(&rhos) {
        let delta = cft::delta_from_rho(rho, kappa)?;
        summary.push(format!(
            "{label} = {rho}: delta = {delta}, angle = {}",
            bc.angles[labels.iter().position(|l| l == label).unwrap()]
        ));
    }
    summary.push(format!(
        "charge ledger: background {} interface {} sum {:.3e}",
        ledger.background, ledger.interface, ledger.total()
    ));
    summary.push(format!("total winding angle = {}", bc.total_angle));

    let report = json!({
        "kappa": kappa,
        "central_charge": c,
        "kac": {"h_1_2": h12, "h_2_1": h21},
        "rho_inf": rho_inf,
        "entries": entries,
        "ledger": {
            "background": ledger.background,
            "interface": ledger.interface,
            "boundary": ledger.boundary,
            "total": ledger.total(),
        },
        "free_field": {
            "coupling_g": COUPLING_G,
            "total_angle": bc.total_angle,
        },
        "drift_identity": drift_report,
    });

    Ok(CommandOutput { report, tables: vec![table], plots: Vec::new(), verdicts, summary })
}
