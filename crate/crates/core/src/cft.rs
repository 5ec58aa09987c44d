//! Closed-form CFT arithmetic: central charge, Kac weights, the ρ ↦ weight
//! and ρ ↦ charge maps, charge-neutrality bookkeeping, the product-form
//! partition function with its log-gradient drift, and free-field
//! boundary-condition data.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Full problem instance: κ, the weight vector ρ̲, the marked boundary
/// points, and the start point of the curve.
#[derive(Debug, Clone, PartialEq)]
pub struct SleParams {
    kappa: f64,
    rho: Vec<f64>,
    x: Vec<f64>,
    xi0: f64,
}

impl SleParams {
    /// Validates: κ > 0 and finite, `rho`/`x` of equal length, marked points
    /// strictly increasing and distinct from the start point.
    pub fn new(kappa: f64, rho: Vec<f64>, x: Vec<f64>, xi0: f64) -> Result<Self> {
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(Error::Domain("kappa must be positive and finite"));
        }
        if rho.len() != x.len() {
            return Err(Error::Domain("rho and x must have equal length"));
        }
        if !xi0.is_finite() {
            return Err(Error::Domain("xi0 must be finite"));
        }
        for w in x.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::Domain("marked points must be strictly increasing"));
            }
        }
        for (&xj, &rj) in x.iter().zip(&rho) {
            if !xj.is_finite() || !rj.is_finite() {
                return Err(Error::Domain("rho and x entries must be finite"));
            }
            if xj == xi0 {
                return Err(Error::Domain("marked points must differ from xi0"));
            }
        }
        Ok(Self { kappa, rho, x, xi0 })
    }

    /// Chordal SLE(κ) with no marked points.
    pub fn plain(kappa: f64, xi0: f64) -> Result<Self> {
        Self::new(kappa, Vec::new(), Vec::new(), xi0)
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }
    pub fn rho(&self) -> &[f64] {
        &self.rho
    }
    pub fn x(&self) -> &[f64] {
        &self.x
    }
    pub fn xi0(&self) -> f64 {
        self.xi0
    }
    pub fn n_marked(&self) -> usize {
        self.x.len()
    }
}

/// c(κ) = (6 − κ)(3κ − 8)/(2κ).
pub fn central_charge(kappa: f64) -> Result<f64> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::Domain("central_charge: kappa must be positive"));
    }
    Ok((6.0 - kappa) * (3.0 * kappa - 8.0) / (2.0 * kappa))
}

/// Kac weight h_{r,s}(κ) = (κ²(r²−1) − 8κ(rs−1) + 16(s²−1)) / (16κ).
pub fn kac_weight(r: u32, s: u32, kappa: f64) -> Result<f64> {
    if r < 1 || s < 1 {
        return Err(Error::Domain("kac_weight: r and s must be >= 1"));
    }
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::Domain("kac_weight: kappa must be positive"));
    }
    let (r, s) = (r as f64, s as f64);
    Ok((kappa * kappa * (r * r - 1.0) - 8.0 * kappa * (r * s - 1.0) + 16.0 * (s * s - 1.0))
        / (16.0 * kappa))
}

/// Weight of the boundary operator attached to weight ρ:
/// δ(ρ) = ρ(ρ + 4 − κ)/(4κ).
pub fn delta_from_rho(rho: f64, kappa: f64) -> Result<f64> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::Domain("delta_from_rho: kappa must be positive"));
    }
    Ok(rho * (rho + 4.0 - kappa) / (4.0 * kappa))
}

/// The effective weight at infinity, ρ∞ = κ − 6 − Σ_j ρ_j.
pub fn rho_infinity(params: &SleParams) -> f64 {
    params.kappa - 6.0 - params.rho.iter().sum::<f64>()
}

/// Coulomb-gas charge bookkeeping. The background carries −2α₀, the curve
/// interface α_{1,2} = 1/√κ, and each boundary weight ρ (including the
/// derived ρ∞) carries ρ/(2√κ). The total vanishes identically.
#[derive(Debug, Clone, PartialEq)]
pub struct ChargeLedger {
    /// −2α₀ = (4 − κ)/(2√κ).
    pub background: f64,
    /// α_{1,2} = 1/√κ.
    pub interface: f64,
    /// ρ_j/(2√κ) for j = 1..n, followed by the ρ∞ entry.
    pub boundary: Vec<f64>,
}

impl ChargeLedger {
    pub fn total(&self) -> f64 {
        self.background + self.interface + self.boundary.iter().sum::<f64>()
    }
}

pub fn charge_ledger(params: &SleParams) -> ChargeLedger {
    let sk = math::sqrt(params.kappa);
    let mut boundary: Vec<f64> = params.rho.iter().map(|r| r / (2.0 * sk)).collect();
    boundary.push(rho_infinity(params) / (2.0 * sk));
    ChargeLedger {
        background: (4.0 - params.kappa) / (2.0 * sk),
        interface: 1.0 / sk,
        boundary,
    }
}

fn pairwise_scale(xi: f64, params: &SleParams) -> f64 {
    let mut scale: f64 = 1.0;
    for &xj in &params.x {
        scale = scale.max(math::abs(xj - xi));
        for &xk in &params.x {
            scale = scale.max(math::abs(xj - xk));
        }
    }
    scale
}

/// log D(ξ; x̲) = Σ_j (ρ_j/κ) log|x_j − ξ| + Σ_{j<k} (ρ_j ρ_k / 2κ) log|x_k − x_j|,
/// a real logarithm of absolute values: only the real log-derivative in ξ is
/// consumed downstream, so ordering phases are dropped.
///
/// Distances below `floor` (default 1e−12 × the largest pairwise scale) are a
/// coincidence error rather than ±∞.
pub fn log_correlator_d(xi: f64, params: &SleParams) -> Result<f64> {
    let floor = 1e-12 * pairwise_scale(xi, params);
    log_correlator_d_with_floor(xi, params, floor)
}

pub fn log_correlator_d_with_floor(xi: f64, params: &SleParams, floor: f64) -> Result<f64> {
    let kappa = params.kappa;
    let mut sum = 0.0;
    for (j, (&xj, &rj)) in params.x.iter().zip(&params.rho).enumerate() {
        let d = math::abs(xj - xi);
        if d <= floor {
            return Err(Error::CoincidentPoints);
        }
        sum += rj / kappa * math::ln(d);
        for (&xk, &rk) in params.x[j + 1..].iter().zip(&params.rho[j + 1..]) {
            let djk = math::abs(xk - xj);
            if djk <= floor {
                return Err(Error::CoincidentPoints);
            }
            sum += rj * rk / (2.0 * kappa) * math::ln(djk);
        }
    }
    Ok(sum)
}

/// The drift f(ξ) = Σ_j ρ_j/(ξ − x_j) = κ ∂_ξ log D.
pub fn drift_f(xi: f64, params: &SleParams) -> Result<f64> {
    let floor = 1e-12 * pairwise_scale(xi, params);
    let mut sum = 0.0;
    for (&xj, &rj) in params.x.iter().zip(&params.rho) {
        let d = xi - xj;
        if math::abs(d) <= floor {
            return Err(Error::CoincidentPoints);
        }
        sum += rj / d;
    }
    Ok(sum)
}

/// Free-field boundary data: Dirichlet jump sizes λ_j with δ_j = g λ_j², and
/// the derivative-direction angles (π/2)ρ_j. Entries run over j = 1..n and
/// then ρ∞. A negative δ_j has no real jump; the entry records that instead
/// of fabricating one.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeFieldBc {
    pub coupling_g: f64,
    /// √(δ_j/g) taken nonnegative, or None where δ_j < 0.
    pub jumps: Vec<Option<f64>>,
    /// (π/2)·ρ_j, same order as `jumps`.
    pub angles: Vec<f64>,
    /// (π/2)(Σ_j ρ_j + ρ∞) = (π/2)(κ − 6).
    pub total_angle: f64,
}

pub fn free_field_bc(params: &SleParams, coupling_g: f64) -> Result<FreeFieldBc> {
    if !(coupling_g > 0.0) || !coupling_g.is_finite() {
        return Err(Error::Domain("free_field_bc: coupling g must be positive"));
    }
    let rho_inf = rho_infinity(params);
    let all_rho = params.rho.iter().copied().chain(core::iter::once(rho_inf));
    let mut jumps = Vec::with_capacity(params.rho.len() + 1);
    let mut angles = Vec::with_capacity(params.rho.len() + 1);
    for rho in all_rho {
        let delta = delta_from_rho(rho, params.kappa)?;
        jumps.push(if delta >= 0.0 {
            Some(math::sqrt(delta / coupling_g))
        } else {
            None
        });
        angles.push(core::f64::consts::FRAC_PI_2 * rho);
    }
    let total_angle = core::f64::consts::FRAC_PI_2 * (params.kappa - 6.0);
    Ok(FreeFieldBc {
        coupling_g,
        jumps,
        angles,
        total_angle,
    })
}
