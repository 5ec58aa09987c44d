//! Scalar math shim (std intrinsics vs libm) and the complex helper
//! functions shared by the Loewner steppers and the quadrature code.

use num_complex::Complex64;

macro_rules! shim1 {
    ($name:ident, $method:ident, $libm:ident) => {
        #[cfg(feature = "std")]
        #[inline(always)]
        pub fn $name(x: f64) -> f64 {
            x.$method()
        }
        #[cfg(not(feature = "std"))]
        #[inline(always)]
        pub fn $name(x: f64) -> f64 {
            libm::$libm(x)
        }
    };
}

shim1!(sqrt, sqrt, sqrt);
shim1!(exp, exp, exp);
shim1!(ln, ln, log);
shim1!(log1p, ln_1p, log1p);
shim1!(expm1, exp_m1, expm1);
shim1!(sinh, sinh, sinh);
shim1!(cosh, cosh, cosh);
shim1!(abs, abs, fabs);
shim1!(floor, floor, floor);
shim1!(asinh, asinh, asinh);

#[cfg(feature = "std")]
#[inline(always)]
pub fn atan2(y: f64, x: f64) -> f64 {
    y.atan2(x)
}
#[cfg(not(feature = "std"))]
#[inline(always)]
pub fn atan2(y: f64, x: f64) -> f64 {
    libm::atan2(y, x)
}

#[cfg(feature = "std")]
#[inline(always)]
pub fn powf(x: f64, p: f64) -> f64 {
    x.powf(p)
}
#[cfg(not(feature = "std"))]
#[inline(always)]
pub fn powf(x: f64, p: f64) -> f64 {
    libm::pow(x, p)
}

#[inline(always)]
pub fn signum_nonzero(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Square root with image in the closed upper half-plane.
///
/// The principal branch already lands in Im ≥ 0 for Im z ≥ 0; arguments that
/// drift infinitesimally below the real axis through roundoff get their root
/// reflected back up, which is the branch every slit-map update needs.
#[inline]
pub fn sqrt_upper(z: Complex64) -> Complex64 {
    let s = z.sqrt();
    if s.im < 0.0 {
        -s
    } else {
        s
    }
}

/// ln(1 + z) without cancellation for small |z|.
#[inline]
pub fn ln_1p_complex(z: Complex64) -> Complex64 {
    let x = z.re;
    let y = z.im;
    // |1+z|^2 - 1 = 2x + x^2 + y^2, fed through the scalar log1p.
    let m = 2.0 * x + x * x + y * y;
    Complex64::new(0.5 * log1p(m), atan2(y, 1.0 + x))
}

/// acosh(1 + w) evaluated stably near w = 0: log1p(w + √(w(2+w))).
///
/// The principal complex square root puts the result in Re ≥ 0; callers pick
/// the sign branch themselves.
#[inline]
pub fn acosh_1p(w: Complex64) -> Complex64 {
    let s = (w * (Complex64::new(2.0, 0.0) + w)).sqrt();
    ln_1p_complex(w + s)
}

/// coth(z/2) via the real/imaginary split
/// (sinh x − i sin y)/(cosh x − cos y) for z = x + iy.
///
/// Saturates to ±1 for |x| ≥ 60 (relative error < e^{−60}), which also keeps
/// the hyperbolics out of overflow territory.
#[inline]
pub fn coth_half(z: Complex64) -> Complex64 {
    let x = z.re;
    if abs(x) >= 60.0 {
        return Complex64::new(signum_nonzero(x), 0.0);
    }
    let (sy, cy) = sin_cos(z.im);
    let denom = cosh(x) - cy;
    Complex64::new(sinh(x) / denom, -sy / denom)
}

#[cfg(feature = "std")]
#[inline(always)]
pub fn sin_cos(x: f64) -> (f64, f64) {
    x.sin_cos()
}
#[cfg(not(feature = "std"))]
#[inline(always)]
pub fn sin_cos(x: f64) -> (f64, f64) {
    libm::sincos(x)
}
