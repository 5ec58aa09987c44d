//! Strip-coordinate Loewner dynamics: the half-plane ↔ strip change of
//! coordinates, the capacity ↔ strip time change, and direct simulation of
//! the tip-centred process ĥ_s on S = {0 < Im < π}.
//!
//! The SDE for every tracked point w is
//!     dĥ(w) = −√κ dB + [ρ∞/2 + Σ_j (ρ_j/2)·coth(ĥ(x̃_j)/2) + coth(ĥ(w)/2)] ds
//! with ρ∞ = κ − 6 − Σρ_j and coth(±∞/2) read as ±1. The point-dependent
//! coth(ĥ(w)/2) term is the autonomous flow dĥ/ds = coth(ĥ/2), which
//! integrates in closed form: cosh(ĥ(s)/2) = cosh(ĥ(0)/2)·e^{s/2}. A step is
//! therefore Strang-split as half-flow → shared kick (−√κ dB + D·ds) →
//! half-flow, which keeps the weak error small enough for the Monte Carlo
//! acceptance checks; the flow legs also expose a closed-form closest
//! approach to ĥ = 0 used for swallowing detection.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::cft::{self, SleParams};
use crate::chordal::{self, DrivingPath, StepError};
use crate::error::{Error, Result};
use crate::math;
use crate::rng::SplitRng;

/// Extended-real strip coordinate of a marked point: x₁ sits at −∞ by the
/// mapping convention, other marked points are finite lower-boundary
/// coordinates until they escape, and +∞ is where escapes to the right land.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    NegInf,
    Finite(f64),
    PosInf,
}

impl ExtReal {
    /// coth(ĥ/2) with coth(±∞/2) = ±1.
    pub fn coth_half(self) -> f64 {
        match self {
            ExtReal::NegInf => -1.0,
            ExtReal::PosInf => 1.0,
            ExtReal::Finite(a) => math::coth_half(Complex64::new(a, 0.0)).re,
        }
    }
}

/// Resolution status of one tracked observation point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StripFate {
    Tracking,
    /// ĥ reached the swallow guard: the trace hit the point.
    Swallowed { s: f64 },
    /// Re ĥ passed −L: the trace ends up passing to the right of the point.
    EscapedLeft { s: f64 },
    /// Re ĥ passed +L.
    EscapedRight { s: f64 },
}

impl StripFate {
    pub fn resolved(&self) -> bool {
        !matches!(self, StripFate::Tracking)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackedPoint {
    pub h: Complex64,
    pub fate: StripFate,
}

/// Strip-time evolution state: strip time s, the centering process η_s, the
/// tip-centred images ĥ_s of the observation points, and the extended-real
/// images of the marked points. g^S_s(w) = ĥ_s(w) + η_s.
#[derive(Debug, Clone, PartialEq)]
pub struct StripState {
    pub s: f64,
    pub eta: f64,
    pub h_points: Vec<TrackedPoint>,
    pub tilde_x: Vec<ExtReal>,
}

impl StripState {
    pub fn any_tracking(&self) -> bool {
        self.h_points.iter().any(|p| !p.fate.resolved())
    }
}

/// Numerical policy for the strip stepper.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripScheme {
    /// Swallow/rejection guard around ĥ = 0. Deliberately small: absorbing a
    /// hovering point early misclassifies it with probability ∝ guard^{1/3}
    /// near κ = 6, so the guard must sit well below the statistical noise
    /// floor of the ensembles that consume these paths.
    pub guard: f64,
    /// Escape threshold: |Re ĥ| ≥ L counts as reaching ±∞
    /// (coth(L/2) differs from ±1 by < 1e−12 already at L = 30).
    pub l_escape: f64,
}

impl Default for StripScheme {
    fn default() -> Self {
        Self { guard: 1e-6, l_escape: 30.0 }
    }
}

/// m(z) = −log(−x₁/(z−x₁)) = log((z−x₁)/(−x₁)): the conformal map H → S
/// sending x₁ ↦ −∞, 0 ↦ 0, ∞ ↦ +∞ (convention ξ₀ = 0, x₁ < 0).
pub fn map_to_strip(z: Complex64, x1: f64) -> Result<Complex64> {
    if !(x1 < 0.0) {
        return Err(Error::Domain("map_to_strip: requires x1 < 0"));
    }
    if z.im < 0.0 {
        return Err(Error::Domain("map_to_strip: z below the real axis"));
    }
    if z == Complex64::new(x1, 0.0) {
        return Err(Error::Domain("map_to_strip: z = x1 maps to -infinity"));
    }
    let mut w = ((z - Complex64::new(x1, 0.0)) / Complex64::new(-x1, 0.0)).ln();
    if w.im < -1e-9 || w.im > core::f64::consts::PI + 1e-9 {
        return Err(Error::Branch("map_to_strip: image left the closed strip"));
    }
    w.im = w.im.clamp(0.0, core::f64::consts::PI);
    Ok(w)
}

/// Exact flow leg: integrate dĥ/ds = coth(ĥ/2) over `delta` via
/// cosh(ĥ/2) ↦ cosh(ĥ/2)·e^{delta/2}, evaluated through
/// cm1 = cosh(ĥ/2) − 1 = 2 sinh²(ĥ/4) to stay accurate near ĥ = 0.
/// Returns the advanced point and the closest approach to 0 during the leg
/// (the distance proxy √(8|cosh(ĥ/2)e^{Δ*/2} − 1|), exact to leading order
/// near the swallowing point).
pub fn flow_leg(h: Complex64, delta: f64) -> (Complex64, f64) {
    // The flow commutes with reflection z ↦ −z̄; fold Re < 0 onto Re > 0 so
    // the principal acosh branch applies.
    let reflect = h.re < 0.0;
    let hw = if reflect { -h.conj() } else { h };
    let q = hw * 0.25;
    let sq = q.sinh();
    let cm1 = 2.0 * sq * sq;
    let c = Complex64::new(1.0, 0.0) + cm1;
    // Closest approach of c·e^{Δ'/2} to 1 over Δ' ∈ [0, delta].
    let log_abs_c = 0.5 * math::ln(c.norm_sqr());
    let delta_star = (-2.0 * log_abs_c).clamp(0.0, delta);
    let reach = c * Complex64::new(math::exp(0.5 * delta_star), 0.0) - Complex64::new(1.0, 0.0);
    let dmin = math::sqrt(8.0 * reach.norm());
    let e_half = math::exp(0.5 * delta);
    let w = cm1 * e_half + Complex64::new(math::expm1(0.5 * delta), 0.0);
    let mut h_new = 2.0 * math::acosh_1p(w);
    if reflect {
        h_new = -h_new.conj();
    }
    (h_new, dmin)
}

/// Exact flow leg for a finite lower-boundary marked point (real ĥ): the
/// magnitude obeys the same cosh law and the sign is preserved (the flow
/// repels from 0).
pub fn flow_leg_boundary(a: f64, delta: f64) -> f64 {
    let s4 = math::sinh(0.25 * math::abs(a));
    let cm1 = 2.0 * s4 * s4;
    let w = cm1 * math::exp(0.5 * delta) + math::expm1(0.5 * delta);
    math::signum_nonzero(a) * 2.0 * math::log1p(w + math::sqrt(w * (2.0 + w)))
}

/// The shared drift constant D = ρ∞/2 + Σ_j (ρ_j/2)·coth(ĥ(x̃_j)/2).
pub fn drift_constant(state: &StripState, params: &SleParams) -> f64 {
    let mut d = 0.5 * cft::rho_infinity(params);
    for (&rho, img) in params.rho().iter().zip(&state.tilde_x) {
        d += 0.5 * rho * img.coth_half();
    }
    d
}

/// Initial strip state: observation points are taken in strip coordinates
/// (callers with half-plane points push them through `map_to_strip` first);
/// the marked points beyond x₁ are mapped here. Requires the convention
/// normalization ξ₀ = 0, x₁ < 0; x₁ itself becomes the symbolic −∞ entry.
pub fn strip_initial(params: &SleParams, obs: &[Complex64]) -> Result<StripState> {
    if params.n_marked() == 0 {
        return Err(Error::Domain("strip_initial: needs at least the marked point x1"));
    }
    if params.xi0() != 0.0 {
        return Err(Error::Domain("strip_initial: convention requires xi0 = 0"));
    }
    let x1 = params.x()[0];
    if !(x1 < 0.0) {
        return Err(Error::Domain("strip_initial: convention requires x1 < 0"));
    }
    let mut tilde_x = Vec::with_capacity(params.n_marked());
    tilde_x.push(ExtReal::NegInf);
    for &xj in &params.x()[1..] {
        let img = map_to_strip(Complex64::new(xj, 0.0), x1)?;
        tilde_x.push(ExtReal::Finite(img.re));
    }
    let mut h_points = Vec::with_capacity(obs.len());
    for &z in obs {
        h_points.push(TrackedPoint { h: z, fate: StripFate::Tracking });
    }
    Ok(StripState { s: 0.0, eta: 0.0, h_points, tilde_x })
}

fn half_flow(state: &mut StripState, delta: f64, scheme: &StripScheme, s_event: f64) {
    for p in &mut state.h_points {
        if p.fate.resolved() {
            continue;
        }
        let (h_new, dmin) = flow_leg(p.h, delta);
        if dmin <= scheme.guard || h_new.norm() <= scheme.guard {
            p.h = h_new;
            p.fate = StripFate::Swallowed { s: s_event };
        } else if math::abs(h_new.re) >= scheme.l_escape {
            p.h = h_new;
            p.fate = if h_new.re < 0.0 {
                StripFate::EscapedLeft { s: s_event }
            } else {
                StripFate::EscapedRight { s: s_event }
            };
        } else {
            p.h = h_new;
        }
    }
    for img in &mut state.tilde_x {
        if let ExtReal::Finite(a) = *img {
            let a_new = flow_leg_boundary(a, delta);
            *img = if math::abs(a_new) >= scheme.l_escape {
                if a_new < 0.0 {
                    ExtReal::NegInf
                } else {
                    ExtReal::PosInf
                }
            } else {
                ExtReal::Finite(a_new)
            };
        }
    }
}

/// One Strang-split strip step driven by the Brownian increment `db` over
/// strip time `ds`: half-flow, shared kick −√κ·db + D·ds evaluated at the
/// mid state (with the opposite increment accumulated into η), half-flow.
/// Rejected (for the caller to retry with smaller ds) if a finite marked
/// point sits within the guard of ĥ = 0 at the step start or lands there
/// after the kick.
pub fn strip_step(
    state: &StripState,
    db: f64,
    ds: f64,
    params: &SleParams,
    scheme: &StripScheme,
) -> core::result::Result<StripState, StepError> {
    for img in &state.tilde_x {
        if let ExtReal::Finite(a) = img {
            if math::abs(*a) <= scheme.guard {
                return Err(StepError::Rejected);
            }
        }
    }
    let s_event = state.s + ds;
    let mut st = state.clone();
    half_flow(&mut st, 0.5 * ds, scheme, s_event);
    let d_const = drift_constant(&st, params);
    let kick = -math::sqrt(params.kappa()) * db + d_const * ds;
    for p in &mut st.h_points {
        if p.fate.resolved() {
            continue;
        }
        p.h.re += kick;
        if p.h.norm() <= scheme.guard {
            p.fate = StripFate::Swallowed { s: s_event };
        }
    }
    for img in &mut st.tilde_x {
        if let ExtReal::Finite(a) = img {
            let a_new = *a + kick;
            if math::abs(a_new) <= scheme.guard {
                return Err(StepError::Rejected);
            }
            *img = if math::abs(a_new) >= scheme.l_escape {
                if a_new < 0.0 {
                    ExtReal::NegInf
                } else {
                    ExtReal::PosInf
                }
            } else {
                ExtReal::Finite(a_new)
            };
        }
    }
    st.eta -= kick;
    half_flow(&mut st, 0.5 * ds, scheme, s_event);
    st.s = s_event;
    Ok(st)
}

/// Why a strip run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StripStop {
    /// Every observation point was swallowed or escaped.
    Resolved,
    /// Ran to s_max with points still tracking.
    Horizon,
    /// A step near a finite marked point was rejected through all halvings.
    RejectExhausted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StripRun {
    pub state: StripState,
    pub accepted_steps: u64,
    pub stop: StripStop,
}

/// Simulate one strip path until every observation point resolves (or s_max):
/// adaptive ds_eff = ds·min(1, d²/4) over the tracked distances to ĥ = 0,
/// one Gaussian per base step (rescaled across rejection halvings), and an
/// observer fired whenever s lands on the next entry of `slice_times`
/// (the controller caps steps so slice times are hit, not stepped over).
#[allow(clippy::too_many_arguments)]
pub fn strip_run_path_observed<F: FnMut(&StripState)>(
    params: &SleParams,
    obs: &[Complex64],
    ds: f64,
    s_max: f64,
    scheme: &StripScheme,
    slice_times: &[f64],
    mut on_slice: F,
    seed: u64,
    stream: u64,
) -> Result<StripRun> {
    if !(ds > 0.0) || !(s_max > 0.0) {
        return Err(Error::Domain("strip_run_path: ds and s_max must be positive"));
    }
    let mut state = strip_initial(params, obs)?;
    let mut rng = SplitRng::new(seed, stream);
    let mut accepted: u64 = 0;
    let mut slice_idx = 0usize;
    let slice_tol = ds * 1e-9;
    let stop = loop {
        if !state.any_tracking() {
            break StripStop::Resolved;
        }
        if s_max - state.s <= ds * 1e-12 {
            break StripStop::Horizon;
        }
        let mut d2 = f64::INFINITY;
        for p in &state.h_points {
            if !p.fate.resolved() {
                d2 = d2.min(p.h.norm_sqr());
            }
        }
        for img in &state.tilde_x {
            if let ExtReal::Finite(a) = img {
                d2 = d2.min(a * a);
            }
        }
        let mut ds_try = ds;
        if d2.is_finite() {
            ds_try *= (d2 / 4.0).min(1.0);
        }
        while slice_idx < slice_times.len() && slice_times[slice_idx] <= state.s + slice_tol {
            slice_idx += 1;
        }
        if slice_idx < slice_times.len() {
            ds_try = ds_try.min(slice_times[slice_idx] - state.s);
        }
        ds_try = ds_try.min(s_max - state.s);
        let z = rng.normal();
        let mut accepted_step = false;
        for _ in 0..=chordal::MAX_HALVINGS {
            let db = z * math::sqrt(ds_try);
            match strip_step(&state, db, ds_try, params, scheme) {
                Ok(next) => {
                    state = next;
                    accepted += 1;
                    accepted_step = true;
                    break;
                }
                Err(StepError::Rejected) => ds_try *= 0.5,
                Err(StepError::Stopped) => return Err(Error::Stopped),
            }
        }
        if !accepted_step {
            break StripStop::RejectExhausted;
        }
        if slice_idx < slice_times.len() && state.s >= slice_times[slice_idx] - slice_tol {
            on_slice(&state);
            slice_idx += 1;
        }
    };
    Ok(StripRun { state, accepted_steps: accepted, stop })
}

/// `strip_run_path_observed` without slice snapshots.
pub fn strip_run_path(
    params: &SleParams,
    obs: &[Complex64],
    ds: f64,
    s_max: f64,
    scheme: &StripScheme,
    seed: u64,
    stream: u64,
) -> Result<StripRun> {
    strip_run_path_observed(params, obs, ds, s_max, scheme, &[], |_| {}, seed, stream)
}

/// Drive the strip stepper with externally prescribed (ds, dB) pairs — used
/// by the chordal cross-check, where the increments come out of a recorded
/// half-plane path via the time change. No adaptivity, no retry: a rejection
/// surfaces as an error.
pub fn strip_drive_matched(
    initial: &StripState,
    increments: &[(f64, f64)],
    params: &SleParams,
    scheme: &StripScheme,
) -> Result<Vec<StripState>> {
    let mut out = Vec::with_capacity(increments.len() + 1);
    out.push(initial.clone());
    let mut state = initial.clone();
    for &(ds, db) in increments {
        match strip_step(&state, db, ds, params, scheme) {
            Ok(next) => {
                state = next;
                out.push(state.clone());
            }
            Err(_) => {
                return Err(Error::Domain(
                    "strip_drive_matched: prescribed step rejected near a marked point",
                ))
            }
        }
    }
    Ok(out)
}

/// Capacity-time ↔ strip-time correspondence along a recorded chordal path:
/// s(t) = ∫ dt/(ξ_t − g_t(x₁))², accumulated by trapezoids on the stored
/// grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeChange {
    pub t: Vec<f64>,
    pub s: Vec<f64>,
}

pub fn time_change(path: &DrivingPath, params: &SleParams) -> Result<TimeChange> {
    if params.n_marked() == 0 {
        return Err(Error::Domain("time_change: needs the marked point x1"));
    }
    let rows = chordal::replay_states(path, params);
    let mut t = Vec::with_capacity(rows.len());
    let mut s = Vec::with_capacity(rows.len());
    let mut acc = 0.0;
    let mut prev_integrand = None;
    for row in &rows {
        if !row.alive[0] {
            return Err(Error::Domain("time_change: x1 swallowed along the path"));
        }
        let d = row.xi - row.x_img[0];
        let integrand = 1.0 / (d * d);
        if let Some((t_prev, f_prev)) = prev_integrand {
            acc += (row.t - t_prev) * 0.5 * (f_prev + integrand);
        }
        prev_integrand = Some((row.t, integrand));
        t.push(row.t);
        s.push(acc);
    }
    Ok(TimeChange { t, s })
}

/// Strip-time increments matched to a recorded chordal path: with
/// d_k = ξ_k − g_k(x₁) at the step start, ds_k = dt_k/d_k² and
/// dB̂_k = dB_k/d_k drive the strip dynamics with the same Brownian path
/// (the tip-centred log coordinate picks up −√κ dB̂ from dξ = √κ dB + …).
pub fn matched_strip_increments(
    path: &DrivingPath,
    params: &SleParams,
) -> Result<Vec<(f64, f64)>> {
    if params.n_marked() == 0 {
        return Err(Error::Domain("matched_strip_increments: needs x1"));
    }
    let rows = chordal::replay_states(path, params);
    let mut incs = Vec::with_capacity(path.n_steps());
    for k in 0..path.n_steps() {
        let row = &rows[k];
        if !row.alive[0] {
            return Err(Error::Domain("matched_strip_increments: x1 swallowed"));
        }
        let d = row.xi - row.x_img[0];
        incs.push((path.step_dt(k) / (d * d), path.db[k] / d));
    }
    Ok(incs)
}

/// The tip-centred strip image of a half-plane point along a chordal path:
/// log((g_t(z) − g_t(x₁))/(ξ_t − g_t(x₁))), the time-t analogue of
/// `map_to_strip` recentred at the current tip.
pub fn chordal_strip_image(g_z: Complex64, xi: f64, x1_img: f64) -> Complex64 {
    ((g_z - Complex64::new(x1_img, 0.0)) / Complex64::new(xi - x1_img, 0.0)).ln()
}
