//! Bound-state wavefunctions as truncated Gegenbauer series.
//!
//! With `f_n = ω P_n` the expansion coefficients obey the three-term
//! recursion of the `ν = +μ` basis, started from `P_0 = 1`. Forward
//! recursion follows the minimal (decaying) solution only until rounding
//! error excites the dominant one, so the series is cut at the minimum of
//! the coefficient tail. That cut (`N*`) and the divergence flag come from
//! the forward sequence; the terms actually summed come from backward
//! recurrence, which reaches the same solution without the `√(energy
//! error)` floor in the tail.

use alloc::vec::Vec;

use crate::error::{domain, Error, Result};
use crate::math;
use crate::polyeval::{self, GegenbauerSeq};
use crate::potential::PotentialParams;
use crate::quadrature::integrate;
use crate::waveop::{recursion_coeffs, Branch};

const OVERFLOW_GUARD: f64 = 1e200;

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSequence {
    pub mu: f64,
    pub gamma: f64,
    pub c: f64,
    /// `P_0, P_1, ...`; generation stops early once `|P_n|` exceeds 1e200.
    pub values: Vec<f64>,
    /// `N*`: number of leading terms that are trusted.
    pub stable_len: usize,
    pub diverged: bool,
    /// Smallest tail magnitude relative to the largest earlier one.
    pub tail_ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationOptions {
    /// Growth over the running minimum that counts as instability.
    pub growth_factor: f64,
    /// Consecutive indices the growth must persist.
    pub window: usize,
    /// `tail_ratio` above this marks the parameters as off-spectrum.
    pub divergence_ratio: f64,
}

impl Default for TruncationOptions {
    fn default() -> Self {
        TruncationOptions {
            growth_factor: 10.0,
            window: 5,
            divergence_ratio: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncation {
    pub n_star: usize,
    pub diverged: bool,
    pub tail_ratio: f64,
}

/// Cut point of a coefficient sequence.
///
/// Works on the pair magnitude `r_n = hypot(P_n, P_{n+1})`, which does not
/// dip at sign changes. `N* = argmin r + 1` once `r` has stayed at least
/// `growth_factor` above its running minimum for `window` indices.
pub fn select_truncation(values: &[f64], opts: &TruncationOptions) -> Truncation {
    if values.len() < 2 {
        return Truncation {
            n_star: values.len(),
            diverged: false,
            tail_ratio: 0.0,
        };
    }
    let mut min = f64::INFINITY;
    let mut argmin = 0;
    let mut max_before_min = 0.0f64;
    let mut max_seen = 0.0f64;
    let mut run = 0;
    for n in 0..values.len() - 1 {
        let r = math::hypot(values[n], values[n + 1]);
        if r < min {
            min = r;
            argmin = n;
            max_before_min = max_seen;
        }
        max_seen = max_seen.max(r);
        if r >= opts.growth_factor * min {
            run += 1;
            if run >= opts.window {
                break;
            }
        } else {
            run = 0;
        }
    }
    let tail_ratio = if max_before_min > 0.0 {
        min / max_before_min
    } else {
        1.0
    };
    Truncation {
        n_star: argmin + 1,
        diverged: tail_ratio > opts.divergence_ratio,
        tail_ratio,
    }
}

/// `P_0 .. P_{N−1}` for `(μ, γ, C)` by forward recursion.
pub fn expansion_coefficients(
    mu: f64,
    gamma: f64,
    c: f64,
    n: usize,
    opts: &TruncationOptions,
) -> Result<CoefficientSequence> {
    if c == 0.0 || !c.is_finite() || !gamma.is_finite() {
        return Err(domain!("coefficients need finite C != 0 and finite gamma"));
    }
    if n < 2 {
        return Err(domain!("need at least 2 coefficients, got {n}"));
    }
    let mut values = Vec::with_capacity(n);
    values.push(1.0);
    let (mut a_prev, mut b_prev) = recursion_coeffs(Branch::Plus, mu, 0)?;
    let mut b_prev2 = 0.0;
    for k in 1..n {
        if b_prev == 0.0 {
            return Err(domain!("b_{} vanishes", k - 1));
        }
        let p1 = values[k - 1];
        let p2 = if k >= 2 { values[k - 2] } else { 0.0 };
        let p = -((gamma + a_prev / c) * p1 + b_prev2 * p2) / b_prev;
        if !p.is_finite() || p.abs() > OVERFLOW_GUARD {
            break;
        }
        values.push(p);
        let (a, b) = recursion_coeffs(Branch::Plus, mu, k)?;
        b_prev2 = b_prev;
        a_prev = a;
        b_prev = b;
    }
    let t = select_truncation(&values, opts);
    Ok(CoefficientSequence {
        mu,
        gamma,
        c,
        values,
        stable_len: t.n_star,
        diverged: t.diverged,
        tail_ratio: t.tail_ratio,
    })
}

/// Minimal (decaying) solution of the same recursion, normalized to
/// `P_0 = 1`, by backward recurrence from index `top`.
///
/// On the spectrum it coincides with the forward sequence; unlike forward
/// recursion its tail is not limited by the square root of the energy
/// error.
pub fn minimal_coefficients(mu: f64, gamma: f64, c: f64, top: usize) -> Result<Vec<f64>> {
    if c == 0.0 || !c.is_finite() || !gamma.is_finite() {
        return Err(domain!("coefficients need finite C != 0 and finite gamma"));
    }
    if top < 2 {
        return Err(domain!("backward recurrence needs top >= 2, got {top}"));
    }
    let coeffs = (0..=top)
        .map(|n| recursion_coeffs(Branch::Plus, mu, n))
        .collect::<Result<Vec<_>>>()?;
    let mut p = alloc::vec![0.0; top + 2];
    p[top] = 1.0;
    for n in (1..=top).rev() {
        let (a_n, b_n) = coeffs[n];
        let b_prev = coeffs[n - 1].1;
        // row n: b_{n−1} P_{n−1} + (γ + a_n/C) P_n + b_n P_{n+1} = 0
        p[n - 1] = -((gamma + a_n / c) * p[n] + b_n * p[n + 1]) / b_prev;
        if p[n - 1].abs() > 1e100 {
            for v in &mut p[n - 1..] {
                *v *= 1e-100;
            }
        }
    }
    if p[0] == 0.0 || !p[0].is_finite() {
        return Err(Error::Divergent("minimal solution vanishes at n = 0".into()));
    }
    let p0 = p[0];
    p.truncate(top + 1);
    p.iter_mut().for_each(|v| *v /= p0);
    Ok(p)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundStateWavefunction {
    pub params: PotentialParams,
    pub epsilon: f64,
    pub mu: f64,
    /// Forward-recursion coefficients with the `N*` and divergence
    /// diagnostics.
    pub coeffs: CoefficientSequence,
    /// Coefficients summed in the series: the minimal solution, cut where
    /// the bound `|P_m|·c_m·C_m(1)` on its terms falls below 1e-17 of
    /// the largest.
    pub series: Vec<f64>,
    pub omega: f64,
    // prefactor(μ) · series_coefficient(m, μ) · P_m
    weights: Vec<f64>,
}

/// Defaults for building a wavefunction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavefunctionOptions {
    /// Coefficients generated before truncation.
    pub max_terms: usize,
    pub truncation: TruncationOptions,
    /// Quadrature covers `|ξ| ≤ cutoff / μ`.
    pub cutoff: f64,
    pub quad_tol: f64,
}

impl Default for WavefunctionOptions {
    fn default() -> Self {
        WavefunctionOptions {
            max_terms: 4000,
            truncation: TruncationOptions::default(),
            cutoff: 40.0,
            quad_tol: 1e-13,
        }
    }
}

impl BoundStateWavefunction {
    /// Unnormalized (`ω = 1`) series at energy `ε`. Off-spectrum energies
    /// produce a sequence with the divergence flag set; evaluation then
    /// fails.
    pub fn new(params: PotentialParams, epsilon: f64, opts: &WavefunctionOptions) -> Result<Self> {
        if params.strength == 0.0 {
            return Err(Error::NotApplicable("the zero potential has no bound states".into()));
        }
        if !(epsilon < 0.0) {
            return Err(domain!("bound state needs epsilon < 0, got {epsilon}"));
        }
        let mu = math::sqrt(-epsilon);
        let coeffs = expansion_coefficients(
            mu,
            params.gamma,
            params.strength,
            opts.max_terms,
            &opts.truncation,
        )?;
        let series = if coeffs.diverged {
            coeffs.values[..coeffs.stable_len].to_vec()
        } else {
            let top = (4 * coeffs.stable_len + 60).min(opts.max_terms.max(coeffs.stable_len + 2));
            let mut p = minimal_coefficients(mu, params.gamma, params.strength, top)?;
            // ln of |term m| bounded over z ∈ [−1, 1]: |C_m^λ(z)| ≤ C_m^λ(1)
            let lam2 = 2.0 * mu + 1.0;
            let ln_bound = p
                .iter()
                .enumerate()
                .map(|(m, v)| {
                    let mf = m as f64;
                    let ln_c1 = polyeval::ln_gamma(mf + lam2) - polyeval::ln_gamma(mf + 1.0) - polyeval::ln_gamma(lam2);
                    Ok(math::ln(v.abs()) + polyeval::ln_series_coefficient(m, mu)? + ln_c1)
                })
                .collect::<Result<Vec<_>>>()?;
            let peak = ln_bound.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let keep = ln_bound
                .iter()
                .rposition(|&v| v > peak + math::ln(1e-17))
                .map_or(1, |i| i + 1)
                .max(coeffs.stable_len);
            p.truncate(keep);
            p
        };
        let pre = polyeval::prefactor(mu)?;
        let weights = series
            .iter()
            .enumerate()
            .map(|(m, pm)| {
                let ln_w = polyeval::ln_series_coefficient(m, mu)?;
                Ok(pre * math::exp(ln_w) * pm)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BoundStateWavefunction {
            params,
            epsilon,
            mu,
            coeffs,
            series,
            omega: 1.0,
            weights,
        })
    }

    /// Built and normalized in one step; off-spectrum energies are an error.
    pub fn normalized(params: PotentialParams, epsilon: f64, opts: &WavefunctionOptions) -> Result<Self> {
        let mut ws = Self::new(params, epsilon, opts)?;
        normalize(&mut ws, opts)?;
        Ok(ws)
    }

    pub fn n_star(&self) -> usize {
        self.coeffs.stable_len
    }

    /// Number of series terms summed.
    pub fn terms(&self) -> usize {
        self.series.len()
    }

    pub fn diverged(&self) -> bool {
        self.coeffs.diverged
    }

    fn check(&self) -> Result<()> {
        if self.coeffs.diverged {
            return Err(Error::Divergent(alloc::format!(
                "coefficient tail ratio {:e} at epsilon = {}: parameters are off the spectrum",
                self.coeffs.tail_ratio,
                self.epsilon
            )));
        }
        Ok(())
    }

    fn series(&self, y: f64, with_derivative: bool) -> (f64, f64) {
        let lam = self.mu + 0.5;
        let mut s = 0.0;
        let mut ds = 0.0;
        let mut c0 = GegenbauerSeq::new_unchecked(lam, y);
        let mut c1 = GegenbauerSeq::new_unchecked(lam + 1.0, y);
        for (m, w) in self.weights.iter().enumerate() {
            s += w * c0.next().unwrap_or(0.0);
            if with_derivative && m > 0 {
                // d/dy C_m^λ = 2λ C_{m−1}^{λ+1}
                ds += w * 2.0 * lam * c1.next().unwrap_or(0.0);
            }
        }
        (s, ds)
    }

    /// Dimensionless `ψ(ξ)`, normalized so that `∫ψ² dξ = 1`.
    pub fn eval_xi(&self, xi: f64) -> Result<f64> {
        self.check()?;
        Ok(self.eval_xi_unchecked(xi))
    }

    fn eval_xi_unchecked(&self, xi: f64) -> f64 {
        let (s, _) = self.series(math::tanh(xi), false);
        self.omega * math::exp(-self.mu * math::ln_cosh(xi)) * s
    }

    /// `(ψ(ξ), dψ/dξ)`.
    pub fn eval_xi_with_derivative(&self, xi: f64) -> Result<(f64, f64)> {
        self.check()?;
        let y = math::tanh(xi);
        let (s, ds) = self.series(y, true);
        let env = self.omega * math::exp(-self.mu * math::ln_cosh(xi));
        Ok((env * s, env * (-self.mu * y * s + math::sech2(xi) * ds)))
    }

    /// `ψ(x)` in physical units, normalized so that `∫ψ² dx = 1`.
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        let lam = self.params.lambda;
        Ok(math::sqrt(lam) * self.eval_xi(lam * x)?)
    }

    fn half_width(&self, opts_cutoff: f64) -> f64 {
        (opts_cutoff / self.mu).max(10.0)
    }
}

/// `ψ(x)` at physical position `x`.
pub fn evaluate_wavefunction(ws: &BoundStateWavefunction, x: f64) -> Result<f64> {
    ws.evaluate(x)
}

/// Sets `ω` so that `∫ψ² dx = 1`; returns the new `ω`.
pub fn normalize(ws: &mut BoundStateWavefunction, opts: &WavefunctionOptions) -> Result<f64> {
    ws.check()?;
    ws.omega = 1.0;
    let l = ws.half_width(opts.cutoff);
    let norm = integrate(
        |xi| {
            let v = ws.eval_xi_unchecked(xi);
            v * v
        },
        -l,
        l,
        0.0,
        opts.quad_tol,
    )?;
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::Quadrature(alloc::format!("wavefunction norm {norm}")));
    }
    ws.omega = 1.0 / math::sqrt(norm);
    Ok(ws.omega)
}

/// Uniform grid for residual checks, in `ξ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualGrid {
    pub xi_min: f64,
    pub xi_max: f64,
    pub h: f64,
}

impl ResidualGrid {
    /// `|ξ| ≤ min(40/μ, 400)` with step 2e-3.
    pub fn for_state(ws: &BoundStateWavefunction) -> Self {
        let l = ws.half_width(40.0).min(400.0);
        ResidualGrid {
            xi_min: -l,
            xi_max: l,
            h: 2e-3,
        }
    }
}

/// `‖(−d²/dξ² + U − ε)ψ‖₂ / ‖ψ‖₂` with a five-point second difference.
pub fn hamiltonian_residual(ws: &BoundStateWavefunction, grid: &ResidualGrid) -> Result<f64> {
    ws.check()?;
    if !(grid.h > 0.0) || !(grid.xi_min < grid.xi_max) {
        return Err(Error::Grid(alloc::format!("invalid residual grid {grid:?}")));
    }
    let count = math::round((grid.xi_max - grid.xi_min) / grid.h) as usize + 1;
    if count < 5 {
        return Err(Error::Grid("residual grid needs at least 5 points".into()));
    }
    let u = PotentialParams::dimensionless(ws.params.strength, ws.params.gamma);
    let psi: Vec<f64> = (0..count)
        .map(|i| ws.eval_xi_unchecked(grid.xi_min + grid.h * i as f64))
        .collect();
    let h2 = 12.0 * grid.h * grid.h;
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 2..count - 2 {
        let d2 = (-psi[i - 2] + 16.0 * psi[i - 1] - 30.0 * psi[i] + 16.0 * psi[i + 1] - psi[i + 2]) / h2;
        let xi = grid.xi_min + grid.h * i as f64;
        let r = -d2 + (u.at_xi(xi) - ws.epsilon) * psi[i];
        num += r * r;
        den += psi[i] * psi[i];
    }
    Ok(math::sqrt(num / den))
}

/// Series sums against quadrature for the two quadratic forms that are
/// diagonal in the basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelNorms {
    /// `ω² Σ P_m²`.
    pub series_weighted: f64,
    /// `∫ ψ² sech²ξ dξ`.
    pub quad_weighted: f64,
    /// `ω² Σ a_m P_m²`.
    pub series_kinetic: f64,
    /// `∫ (ψ'² + μ²ψ²) dξ`.
    pub quad_kinetic: f64,
}

pub fn discrete_kernel_norms(ws: &BoundStateWavefunction, opts: &WavefunctionOptions) -> Result<KernelNorms> {
    ws.check()?;
    let w2 = ws.omega * ws.omega;
    let mut series_weighted = 0.0;
    let mut series_kinetic = 0.0;
    for (m, p) in ws.series.iter().enumerate() {
        let (a, _) = recursion_coeffs(Branch::Plus, ws.mu, m)?;
        series_weighted += p * p;
        series_kinetic += a * p * p;
    }
    let l = ws.half_width(opts.cutoff);
    let quad_weighted = integrate(
        |xi| {
            let v = ws.eval_xi_unchecked(xi);
            v * v * math::sech2(xi)
        },
        -l,
        l,
        0.0,
        opts.quad_tol,
    )?;
    let mu2 = ws.mu * ws.mu;
    let quad_kinetic = integrate(
        |xi| {
            let (v, d) = ws.eval_xi_with_derivative(xi).unwrap_or((0.0, 0.0));
            d * d + mu2 * v * v
        },
        -l,
        l,
        0.0,
        opts.quad_tol,
    )?;
    Ok(KernelNorms {
        series_weighted: w2 * series_weighted,
        quad_weighted,
        series_kinetic: w2 * series_kinetic,
        quad_kinetic,
    })
}
