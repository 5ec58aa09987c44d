//! Adaptive Gauss–Kronrod quadrature (G7/K15) for complex-valued integrands
//! along straight segments between complex endpoints.
//!
//! The error indicator is the raw |K15 − G7| difference per panel — a
//! deliberate overestimate — and refinement always bisects the worst panel,
//! so tolerance reports are conservative.

use alloc::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Kronrod-15 abscissae (positive half, descending), shared with the
/// embedded Gauss-7 rule at the odd indices.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub abs_error: f64,
    pub panels: usize,
}

fn finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// One G7/K15 panel on the straight segment [a, b].
fn gk15_panel<F: Fn(Complex64) -> Complex64>(
    f: &F,
    a: Complex64,
    b: Complex64,
) -> Result<(Complex64, f64)> {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(mid);
    if !finite(fc) {
        return Err(Error::Domain("quadrature: integrand not finite"));
    }
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (j, &x) in XGK.iter().enumerate().take(7) {
        let f1 = f(mid - half * x);
        let f2 = f(mid + half * x);
        if !finite(f1) || !finite(f2) {
            return Err(Error::Domain("quadrature: integrand not finite"));
        }
        let pair = f1 + f2;
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = half * kronrod;
    let err = (half * (kronrod - gauss)).norm();
    Ok((value, err))
}

struct Panel {
    err: f64,
    a: Complex64,
    b: Complex64,
    value: Complex64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Adaptively integrate f along the straight segment from a to b until the
/// accumulated error estimate drops below max(abs_tol, rel_tol·|value|),
/// always splitting the worst panel. Errors out (tolerance not met) if
/// `max_panels` bisections cannot reach the target.
pub fn integrate_segment<F: Fn(Complex64) -> Complex64>(
    f: &F,
    a: Complex64,
    b: Complex64,
    rel_tol: f64,
    abs_tol: f64,
    max_panels: usize,
) -> Result<QuadResult> {
    if !(rel_tol >= 0.0) || !(abs_tol >= 0.0) || rel_tol + abs_tol == 0.0 {
        return Err(Error::Domain("quadrature: need a positive tolerance"));
    }
    if a == b {
        return Ok(QuadResult { value: Complex64::new(0.0, 0.0), abs_error: 0.0, panels: 0 });
    }
    let (v0, e0) = gk15_panel(f, a, b)?;
    let mut total_value = v0;
    let mut total_err = e0;
    let mut heap = BinaryHeap::new();
    heap.push(Panel { err: e0, a, b, value: v0 });
    let mut panels = 1usize;
    while total_err > abs_tol.max(rel_tol * total_value.norm()) {
        if panels >= max_panels {
            return Err(Error::Tolerance("quadrature: panel budget exhausted"));
        }
        let worst = heap.pop().expect("heap cannot be empty while error remains");
        let mid = 0.5 * (worst.a + worst.b);
        let (vl, el) = gk15_panel(f, worst.a, mid)?;
        let (vr, er) = gk15_panel(f, mid, worst.b)?;
        total_value += vl + vr - worst.value;
        total_err += el + er - worst.err;
        heap.push(Panel { err: el, a: worst.a, b: mid, value: vl });
        heap.push(Panel { err: er, a: mid, b: worst.b, value: vr });
        panels += 1;
    }
    Ok(QuadResult { value: total_value, abs_error: total_err, panels })
}

/// Integrate along a polyline through the given nodes; per-leg results are
/// summed and the error estimates add.
pub fn integrate_polyline<F: Fn(Complex64) -> Complex64>(
    f: &F,
    nodes: &[Complex64],
    rel_tol: f64,
    abs_tol: f64,
    max_panels: usize,
) -> Result<QuadResult> {
    if nodes.len() < 2 {
        return Err(Error::Domain("quadrature: polyline needs at least two nodes"));
    }
    let mut value = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut panels = 0;
    for pair in nodes.windows(2) {
        let r = integrate_segment(f, pair[0], pair[1], rel_tol, abs_tol, max_panels)?;
        value += r.value;
        err += r.abs_error;
        panels += r.panels;
    }
    Ok(QuadResult { value, abs_error: err, panels })
}
