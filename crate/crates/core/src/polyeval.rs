//! Gegenbauer polynomials and the gamma-ratio factors of the bound-state
//! series.
//!
//! Every gamma expression is formed in log space; the ratios that appear in
//! the wavefunction overflow in direct form long before the series is
//! truncated.

use crate::error::{domain, Result};
use crate::math;

fn check_order(lam: f64) -> Result<()> {
    if !(lam > -0.5) || !lam.is_finite() {
        return Err(domain!("Gegenbauer order must satisfy lam > -1/2, got {lam}"));
    }
    if lam == 0.0 {
        return Err(domain!("Gegenbauer order lam = 0 (Chebyshev limit) is not supported"));
    }
    Ok(())
}

fn check_mu(mu: f64) -> Result<()> {
    if !(mu > -0.5) || !mu.is_finite() {
        return Err(domain!("basis parameter must satisfy mu > -1/2, got {mu}"));
    }
    Ok(())
}

/// `C_n^lam(z)` by forward three-term recurrence.
pub fn gegenbauer(n: usize, lam: f64, z: f64) -> Result<f64> {
    check_order(lam)?;
    Ok(GegenbauerSeq::new_unchecked(lam, z).nth(n).unwrap_or(0.0))
}

/// Successive values `C_0^lam(z), C_1^lam(z), ...` with O(1) state.
#[derive(Debug, Clone)]
pub struct GegenbauerSeq {
    lam: f64,
    z: f64,
    n: usize,
    prev: f64,
    cur: f64,
}

impl GegenbauerSeq {
    pub fn new(lam: f64, z: f64) -> Result<Self> {
        check_order(lam)?;
        Ok(Self::new_unchecked(lam, z))
    }

    pub(crate) fn new_unchecked(lam: f64, z: f64) -> Self {
        GegenbauerSeq {
            lam,
            z,
            n: 0,
            prev: 0.0,
            cur: 1.0,
        }
    }
}

impl Iterator for GegenbauerSeq {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let out = self.cur;
        let n = self.n as f64;
        // (n+1) C_{n+1} = 2(n+lam) z C_n - (n+2lam-1) C_{n-1}
        let next = if self.n == 0 {
            2.0 * self.lam * self.z
        } else {
            (2.0 * (n + self.lam) * self.z * self.cur - (n + 2.0 * self.lam - 1.0) * self.prev)
                / (n + 1.0)
        };
        self.prev = self.cur;
        self.cur = next;
        self.n += 1;
        Some(out)
    }
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    math::ln_gamma(x).0
}

/// `√[(m+μ+½) Γ(m+1) / Γ(m+2μ+1)]`, the per-term factor of the bound-state
/// series.
///
/// Underflows to zero once `m^{−μ}` drops below the subnormal range; use
/// [`ln_series_coefficient`] there.
pub fn series_coefficient(m: usize, mu: f64) -> Result<f64> {
    Ok(math::exp(ln_series_coefficient(m, mu)?))
}

/// Natural log of [`series_coefficient`].
pub fn ln_series_coefficient(m: usize, mu: f64) -> Result<f64> {
    check_mu(mu)?;
    let m = m as f64;
    let log_ratio = ln_gamma(m + 1.0) - ln_gamma(m + 2.0 * mu + 1.0);
    Ok(0.5 * (math::ln(m + mu + 0.5) + log_ratio))
}

/// `π^{-1/2} 2^μ Γ(μ+½)`, the overall factor of the bound-state series.
pub fn prefactor(mu: f64) -> Result<f64> {
    check_mu(mu)?;
    let log = mu * core::f64::consts::LN_2 + ln_gamma(mu + 0.5)
        - 0.5 * math::ln(core::f64::consts::PI);
    Ok(math::exp(log))
}
