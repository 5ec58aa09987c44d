//! Chordal Loewner dynamics for SLE(κ;ρ̲): the driving SDE coupled to the
//! half-plane flow, marked-point images and derivatives, stopping/swallowing
//! detection, and trace reconstruction.
//!
//! Each accepted step is operator-split: an Euler–Maruyama update of the
//! driving value, then the *exact* constant-driving slit advance of every
//! tracked image over the same interval. The slit advance composes exactly
//! across any step partition, so all discretization error lives in the
//! driving update.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::cft::SleParams;
use crate::error::{Error, Result};
use crate::math;
use crate::rng::SplitRng;

/// Why a path stopped before its horizon.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// Ran to the requested horizon.
    Horizon,
    /// |ξ − X_j| fell to the collision guard for the given marked point.
    Collision { point: usize },
    /// A step was rejected through all allowed halvings; contact is closer
    /// than the scheme can resolve.
    RejectExhausted,
}

/// Evolution state: capacity time, driving value, marked-point images
/// g_t(x_j), their derivatives g_t′(x_j), and liveness flags.
#[derive(Debug, Clone, PartialEq)]
pub struct ChordalState {
    pub t: f64,
    pub xi: f64,
    pub x_img: Vec<f64>,
    pub xprime: Vec<f64>,
    pub alive: Vec<bool>,
    pub stopped: bool,
    pub stop_reason: Option<StopReason>,
}

impl ChordalState {
    pub fn initial(params: &SleParams) -> Self {
        let n = params.n_marked();
        Self {
            t: 0.0,
            xi: params.xi0(),
            x_img: params.x().to_vec(),
            xprime: vec![1.0; n],
            alive: vec![true; n],
            stopped: false,
            stop_reason: None,
        }
    }

    /// Smallest |ξ − X_j| over alive points, or +∞ with no marked points.
    pub fn min_distance(&self) -> (f64, Option<usize>) {
        let mut best = f64::INFINITY;
        let mut idx = None;
        for (j, (&x, &alive)) in self.x_img.iter().zip(&self.alive).enumerate() {
            if alive {
                let d = math::abs(self.xi - x);
                if d < best {
                    best = d;
                    idx = Some(j);
                }
            }
        }
        (best, idx)
    }
}

/// One recorded sample path of the driving process: the accepted time grid,
/// driving values at each node, and the Brownian increments consumed. Steps
/// may be shorter than the base step `dt` where the adaptive controller or
/// the rejection loop shrank them; the exact accepted step sizes are kept in
/// `dts` (times are their running sums) so that replaying `db` through the
/// stepper reproduces `xi_values` bit-for-bit.
#[derive(Debug, Clone, PartialEq)]
pub struct DrivingPath {
    pub dt: f64,
    pub times: Vec<f64>,
    pub xi_values: Vec<f64>,
    pub db: Vec<f64>,
    pub dts: Vec<f64>,
}

impl DrivingPath {
    pub fn n_steps(&self) -> usize {
        self.db.len()
    }
    pub fn duration(&self) -> f64 {
        *self.times.last().unwrap_or(&0.0)
    }
    pub fn step_dt(&self, k: usize) -> f64 {
        self.dts[k]
    }
}

/// Supplier of the driving drift term; evaluation failure (`None`) rejects
/// the step.
pub trait DriftProvider {
    fn drift(&self, xi: f64, x_img: &[f64], alive: &[bool]) -> Option<f64>;
}

/// The standard SLE(κ;ρ̲) drift Σ_j ρ_j/(ξ − X_j) over alive points.
pub struct RhoDrift<'a>(pub &'a SleParams);

impl DriftProvider for RhoDrift<'_> {
    fn drift(&self, xi: f64, x_img: &[f64], alive: &[bool]) -> Option<f64> {
        let mut sum = 0.0;
        for ((&x, &rho), &live) in x_img.iter().zip(self.0.rho()).zip(alive) {
            if live {
                let d = xi - x;
                if d == 0.0 {
                    return None;
                }
                sum += rho / d;
            }
        }
        Some(sum)
    }
}

/// Drift κ·∂_ξ log D for an arbitrary user-supplied conformal block,
/// differentiated by central differences with step `fd_step`.
pub struct GeneralizedDrift<F> {
    pub kappa: f64,
    pub fd_step: f64,
    pub log_d: F,
}

impl<F: Fn(f64, &[f64]) -> Option<f64>> DriftProvider for GeneralizedDrift<F> {
    fn drift(&self, xi: f64, x_img: &[f64], _alive: &[bool]) -> Option<f64> {
        let h = self.fd_step;
        let plus = (self.log_d)(xi + h, x_img)?;
        let minus = (self.log_d)(xi - h, x_img)?;
        Some(self.kappa * (plus - minus) / (2.0 * h))
    }
}

/// Signal from a single step attempt.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepError {
    /// The collision guard (or a drift evaluation failure) vetoed the step;
    /// retry with a smaller dt.
    Rejected,
    /// The state was already stopped.
    Stopped,
}

/// Exact constant-driving slit advance of one boundary image.
#[inline]
pub fn slit_advance_boundary(x: f64, xi: f64, dt: f64) -> f64 {
    let d = x - xi;
    xi + math::signum_nonzero(d) * math::sqrt(d * d + 4.0 * dt)
}

/// Multiplier picked up by g′ at a boundary image over the same advance:
/// |X − ξ| / √((X − ξ)² + 4dt), the derivative of the slit map at X.
#[inline]
pub fn slit_derivative_factor(x: f64, xi: f64, dt: f64) -> f64 {
    let d = x - xi;
    math::abs(d) / math::sqrt(d * d + 4.0 * dt)
}

/// Exact constant-driving slit advance of an interior (or boundary) point,
/// z ↦ ξ + √((z−ξ)² + 4dt) with the root in the closed upper half-plane.
#[inline]
pub fn slit_advance_point(z: Complex64, xi: f64, dt: f64) -> Complex64 {
    if z.im == 0.0 {
        return Complex64::new(slit_advance_boundary(z.re, xi, dt), 0.0);
    }
    let d = z - Complex64::new(xi, 0.0);
    Complex64::new(xi, 0.0) + math::sqrt_upper(d * d + Complex64::new(4.0 * dt, 0.0))
}

/// Closest approach of an interior point to the driving value during one
/// frozen-ξ advance: min over dt′ ∈ [0, dt] of |(z−ξ)² + 4dt′|^{1/2}.
#[inline]
pub fn slit_min_distance(z: Complex64, xi: f64, dt: f64) -> (f64, f64) {
    let d = z - Complex64::new(xi, 0.0);
    let q = d * d;
    let mut best = q.norm();
    let mut at = 0.0;
    let end = (q + Complex64::new(4.0 * dt, 0.0)).norm();
    if end < best {
        best = end;
        at = dt;
    }
    let interior = -q.re / 4.0;
    if interior > 0.0 && interior < dt {
        let v = math::abs(q.im);
        if v < best {
            best = v;
            at = interior;
        }
    }
    (math::sqrt(best), at)
}

/// Advance the tracked images over `dt` with the driving value frozen at its
/// step-start value. Exact for constant driving; composes exactly across
/// partitions.
pub fn ode_advance(state: &ChordalState, dt: f64) -> Result<ChordalState> {
    if state.stopped {
        return Err(Error::Stopped);
    }
    let mut next = state.clone();
    for j in 0..next.x_img.len() {
        if next.alive[j] {
            let x_old = state.x_img[j];
            next.xprime[j] *= slit_derivative_factor(x_old, state.xi, dt);
            next.x_img[j] = slit_advance_boundary(x_old, state.xi, dt);
        }
    }
    next.t += dt;
    Ok(next)
}

/// One operator-split step: Euler–Maruyama driving update from the
/// step-start state, exact slit advance of the images over the same
/// interval, then the collision-guard veto on the trial state.
pub fn sde_step<D: DriftProvider + ?Sized>(
    state: &ChordalState,
    kappa: f64,
    db: f64,
    dt: f64,
    guard: f64,
    drift: &D,
) -> core::result::Result<ChordalState, StepError> {
    if state.stopped {
        return Err(StepError::Stopped);
    }
    let f = drift
        .drift(state.xi, &state.x_img, &state.alive)
        .ok_or(StepError::Rejected)?;
    let mut next = ode_advance(state, dt).map_err(|_| StepError::Stopped)?;
    next.xi = state.xi + math::sqrt(kappa) * db + f * dt;
    for (j, (&x, &alive)) in next.x_img.iter().zip(&next.alive).enumerate() {
        let _ = j;
        if alive && math::abs(next.xi - x) <= guard {
            return Err(StepError::Rejected);
        }
    }
    Ok(next)
}

/// Default collision guard: 1e−4 × the smallest initial |ξ₀ − x_j|, or zero
/// with no marked points (the guard then never triggers).
pub fn default_guard(params: &SleParams) -> f64 {
    let mut dmin = f64::INFINITY;
    for &x in params.x() {
        dmin = dmin.min(math::abs(params.xi0() - x));
    }
    if dmin.is_finite() {
        1e-4 * dmin
    } else {
        0.0
    }
}

/// Maximum dt halvings after a rejection before declaring the path stopped.
pub const MAX_HALVINGS: u32 = 20;

/// Simulate one path to min(horizon, τ): Euler–Maruyama driving with the
/// adaptive step dt_eff = dt·min(1, d²/4), exact slit advances, the
/// collision guard, and reject-and-halve retry (one Gaussian per accepted
/// grid step, rescaled on retries, so replays are bit-exact).
pub fn run_path(
    params: &SleParams,
    horizon: f64,
    dt: f64,
    guard: Option<f64>,
    seed: u64,
    stream: u64,
) -> Result<(ChordalState, DrivingPath)> {
    if !(horizon > 0.0) || !(dt > 0.0) {
        return Err(Error::Domain("run_path: horizon and dt must be positive"));
    }
    let guard = guard.unwrap_or_else(|| default_guard(params));
    let drift = RhoDrift(params);
    let mut rng = SplitRng::new(seed, stream);
    let mut state = ChordalState::initial(params);
    let mut path = DrivingPath {
        dt,
        times: vec![0.0],
        xi_values: vec![params.xi0()],
        db: Vec::new(),
        dts: Vec::new(),
    };
    while state.t < horizon && !state.stopped {
        let (dmin, at) = state.min_distance();
        if dmin <= guard {
            state.stopped = true;
            state.stop_reason = Some(StopReason::Collision { point: at.unwrap_or(0) });
            break;
        }
        let mut dt_try = dt;
        if dmin.is_finite() {
            dt_try *= (dmin * dmin / 4.0).min(1.0);
        }
        dt_try = dt_try.min(horizon - state.t);
        let z = rng.normal();
        let mut accepted = false;
        for _ in 0..=MAX_HALVINGS {
            let db = z * math::sqrt(dt_try);
            match sde_step(&state, params.kappa(), db, dt_try, guard, &drift) {
                Ok(next) => {
                    state = next;
                    path.times.push(state.t);
                    path.xi_values.push(state.xi);
                    path.db.push(db);
                    path.dts.push(dt_try);
                    accepted = true;
                    break;
                }
                Err(StepError::Rejected) => dt_try *= 0.5,
                Err(StepError::Stopped) => return Err(Error::Stopped),
            }
        }
        if !accepted {
            state.stopped = true;
            state.stop_reason = Some(StopReason::RejectExhausted);
        }
    }
    if !state.stopped {
        state.stopped = true;
        state.stop_reason = Some(StopReason::Horizon);
    }
    Ok((state, path))
}

/// Recompute the state trajectory along a recorded path (step-start driving
/// values feed each slit advance, exactly as in the forward run). Row k is
/// the state after k accepted steps.
pub fn replay_states(path: &DrivingPath, params: &SleParams) -> Vec<ChordalState> {
    let mut state = ChordalState::initial(params);
    let mut rows = Vec::with_capacity(path.times.len());
    rows.push(state.clone());
    for k in 0..path.n_steps() {
        let dt = path.step_dt(k);
        for j in 0..state.x_img.len() {
            if state.alive[j] {
                let x_old = state.x_img[j];
                state.xprime[j] *= slit_derivative_factor(x_old, path.xi_values[k], dt);
                state.x_img[j] = slit_advance_boundary(x_old, path.xi_values[k], dt);
            }
        }
        state.t = path.times[k + 1];
        state.xi = path.xi_values[k + 1];
        rows.push(state.clone());
    }
    rows
}

/// Estimated trace points via backward composition of the exact slit
/// inverses, seeded at ξ_k + i·tip_offset.
#[derive(Debug, Clone, PartialEq)]
pub struct TracePath {
    pub times: Vec<f64>,
    pub points: Vec<Complex64>,
}

/// Tolerance for intermediate backward-composition points dipping below the
/// real axis through roundoff.
pub const BRANCH_TOL: f64 = 1e-9;

/// Default tip offset for trace extraction.
pub fn default_tip_offset(dt: f64) -> f64 {
    2.0 * math::sqrt(dt)
}

pub fn trace_points(
    path: &DrivingPath,
    sample_times: &[f64],
    tip_offset: f64,
) -> Result<TracePath> {
    if !(tip_offset > 0.0) {
        return Err(Error::Domain("trace_points: tip_offset must be positive"));
    }
    let duration = path.duration();
    let mut out = TracePath {
        times: Vec::with_capacity(sample_times.len()),
        points: Vec::with_capacity(sample_times.len()),
    };
    for &t in sample_times {
        if !(0.0..=duration * (1.0 + 1e-12) + 1e-300).contains(&t) {
            return Err(Error::Domain("trace_points: sample time outside path duration"));
        }
        // Snap down to the last grid node <= t.
        let k = match path.times.binary_search_by(|a| a.partial_cmp(&t).unwrap()) {
            Ok(i) => i,
            Err(i) => i.saturating_sub(1),
        };
        let gamma = if k == 0 {
            Complex64::new(path.xi_values[0], 0.0)
        } else {
            let mut w = Complex64::new(path.xi_values[k], tip_offset);
            for j in (0..k).rev() {
                let xi_j = Complex64::new(path.xi_values[j], 0.0);
                let d = w - xi_j;
                w = xi_j + math::sqrt_upper(d * d - Complex64::new(4.0 * path.step_dt(j), 0.0));
                if w.im < -BRANCH_TOL {
                    return Err(Error::Branch("trace composition left the upper half-plane"));
                }
                if w.im < 0.0 {
                    w.im = 0.0;
                }
            }
            w
        };
        out.times.push(path.times[k]);
        out.points.push(gamma);
    }
    Ok(out)
}

/// Fate of an interior (or boundary) point evolved under a recorded path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PointFate {
    /// First time the flowed point came within `guard` of the driving value.
    Swallowed { tau: f64 },
    /// Still bounded away from the driving value at the end of the path.
    Alive,
}

/// Evolve z under the flow of a recorded path and detect swallowing: the
/// first time |g_s(z) − ξ_s| reaches `guard`, including closest approaches
/// inside a step (the frozen-ξ advance has a closed-form minimum).
pub fn swallow_classify(path: &DrivingPath, z: Complex64, guard: f64) -> PointFate {
    if z.im == 0.0 {
        // Boundary point: distance to xi can only grow within a frozen-xi
        // advance, so checking step starts suffices.
        let mut g = z.re;
        for k in 0..path.n_steps() {
            let xi = path.xi_values[k];
            if math::abs(g - xi) <= guard {
                return PointFate::Swallowed { tau: path.times[k] };
            }
            g = slit_advance_boundary(g, xi, path.step_dt(k));
        }
        if let Some(&xi_last) = path.xi_values.last() {
            if math::abs(g - xi_last) <= guard {
                return PointFate::Swallowed { tau: path.duration() };
            }
        }
        return PointFate::Alive;
    }
    let mut g = z;
    for k in 0..path.n_steps() {
        let xi = path.xi_values[k];
        let dt = path.step_dt(k);
        let (dmin, at) = slit_min_distance(g, xi, dt);
        if dmin <= guard {
            return PointFate::Swallowed { tau: path.times[k] + at };
        }
        g = slit_advance_point(g, xi, dt);
    }
    PointFate::Alive
}

/// g_t(z) for a tracked point under a recorded path (no swallow check).
pub fn flow_point(path: &DrivingPath, z: Complex64, upto_step: usize) -> Complex64 {
    let mut g = z;
    for k in 0..upto_step.min(path.n_steps()) {
        g = slit_advance_point(g, path.xi_values[k], path.step_dt(k));
    }
    g
}
