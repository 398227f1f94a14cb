//! Thin wrappers over `libm` so the numerics behave identically with and
//! without `std`.

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub(crate) fn ln1p(x: f64) -> f64 {
    libm::log1p(x)
}

#[inline]
pub(crate) fn tanh(x: f64) -> f64 {
    libm::tanh(x)
}

#[inline]
pub(crate) fn atanh(x: f64) -> f64 {
    libm::atanh(x)
}

#[inline]
pub(crate) fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

#[inline]
pub(crate) fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub(crate) fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub(crate) fn acos(x: f64) -> f64 {
    libm::acos(x)
}


/// `ln|Γ(x)|` together with the sign of `Γ(x)`.
#[inline]
pub(crate) fn ln_gamma(x: f64) -> (f64, i32) {
    libm::lgamma_r(x)
}

/// `sech²(ξ)` in a form that neither overflows nor loses relative accuracy
/// in the tails.
#[inline]
pub(crate) fn sech2(xi: f64) -> f64 {
    let e = exp(-2.0 * xi.abs());
    4.0 * e / ((1.0 + e) * (1.0 + e))
}

/// `ln cosh(ξ)`, exact in the tails where `cosh` itself would overflow.
#[inline]
pub(crate) fn ln_cosh(xi: f64) -> f64 {
    let a = xi.abs();
    a + ln1p(exp(-2.0 * a)) - core::f64::consts::LN_2
}

#[inline]
pub(crate) fn round(x: f64) -> f64 {
    libm::round(x)
}
