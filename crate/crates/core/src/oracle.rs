//! Direct integration of `−ψ'' + U ψ = ε ψ` for cross-checking.
//!
//! Bound states use Numerov's scheme with node counting: the solution that
//! decays to the left has as many zeros on the whole line as there are
//! eigenvalues below `ε`. Zeros beyond the box are recovered by splitting
//! the solution at the right end into the two free discrete modes.
//! Scattering integrates the complex equation backwards from a pure
//! transmitted wave.

use alloc::vec::Vec;

use crate::boundstate::{BoundStateWavefunction, WavefunctionOptions};
use crate::error::{domain, Error, Result};
use crate::math;
use crate::potential::{potential_floor, PotentialParams};
use crate::spectra::{energy_spectrum, EnergyOptions};

const RESCALE_AT: f64 = 1e100;

/// Uniform grid in `ξ`; both ends are grid points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub xi_min: f64,
    pub xi_max: f64,
    pub h: f64,
}

impl Grid1D {
    pub fn new(xi_min: f64, xi_max: f64, h: f64) -> Result<Self> {
        if !(xi_min < 0.0 && 0.0 < xi_max) || !(h > 0.0) || !xi_max.is_finite() || !xi_min.is_finite() {
            return Err(Error::Grid(alloc::format!(
                "grid needs xi_min < 0 < xi_max and h > 0, got [{xi_min}, {xi_max}] h = {h}"
            )));
        }
        let steps = math::round((xi_max - xi_min) / h).max(4.0);
        Ok(Grid1D {
            xi_min,
            xi_max,
            h: (xi_max - xi_min) / steps,
        })
    }

    /// Symmetric box wide enough that `|U| < 1e-12` at both ends, at least
    /// `|ξ| ≤ 25`, with `h = 1e-3`.
    pub fn for_potential(params: &PotentialParams) -> Self {
        let amp = 4.0 * params.strength.abs() * (1.0 + params.gamma.abs());
        let l = if amp > 0.0 {
            (0.5 * math::ln(amp / 1e-12) + 1.0).max(25.0)
        } else {
            25.0
        };
        Grid1D::new(-l, l, 1e-3).expect("default grid")
    }

    /// Grid wide enough to hold the tail of a bound state at `epsilon < 0`:
    /// at least 40 decay lengths `1/μ`, capped at |ξ| = 2000.
    pub fn for_state(params: &PotentialParams, epsilon: f64) -> Result<Self> {
        if !(epsilon < 0.0) {
            return Err(domain!("bound-state grid needs epsilon < 0, got {epsilon}"));
        }
        let base = Self::for_potential(params);
        let l = (40.0 / math::sqrt(-epsilon)).min(2000.0).max(base.xi_max);
        Grid1D::new(-l, l, base.h)
    }

    pub fn len(&self) -> usize {
        math::round((self.xi_max - self.xi_min) / self.h) as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn xi(&self, i: usize) -> f64 {
        let last = (self.len() - 1) as f64;
        let t = i as f64;
        (self.xi_min * (last - t) + self.xi_max * t) / last
    }
}

// Potential sampled once per grid.
struct Sampled {
    grid: Grid1D,
    u: Vec<f64>,
    floor: f64,
}

impl Sampled {
    fn new(params: &PotentialParams, grid: &Grid1D) -> Result<Self> {
        let u0 = PotentialParams::dimensionless(params.strength, params.gamma);
        let n = grid.len();
        let u: Vec<f64> = (0..n).map(|i| u0.at_xi(grid.xi(i))).collect();
        if u[0].abs() >= 1e-12 || u[n - 1].abs() >= 1e-12 {
            return Err(Error::Grid(alloc::format!(
                "box [{}, {}] too narrow: |U| at the ends is {:e}, {:e}",
                grid.xi_min,
                grid.xi_max,
                u[0].abs(),
                u[n - 1].abs()
            )));
        }
        Ok(Sampled {
            grid: *grid,
            u,
            floor: potential_floor(&u0),
        })
    }

    fn check_step(&self, epsilon: f64) -> Result<()> {
        let umax = self.u.iter().fold(0.0f64, |m, &v| m.max((v - epsilon).abs()));
        let s = self.grid.h * self.grid.h * umax;
        if s >= 0.01 {
            return Err(Error::Grid(alloc::format!(
                "step h = {} too coarse: h^2 max|U - eps| = {s}",
                self.grid.h
            )));
        }
        Ok(())
    }

    fn weights(&self, epsilon: f64) -> Vec<f64> {
        let c = self.grid.h * self.grid.h / 12.0;
        self.u.iter().map(|&u| 1.0 - c * (u - epsilon)).collect()
    }
}

// Growth factor ρ > 1 of the free discrete mode: ρ + 1/ρ = (12 − 10w)/w.
fn discrete_rho(w: f64) -> f64 {
    let t = 0.5 * (12.0 - 10.0 * w) / w;
    t + math::sqrt((t - 1.0) * (t + 1.0))
}

// Zeros of the left-decaying solution, including one past the right end.
fn count_nodes(s: &Sampled, epsilon: f64) -> usize {
    let w = s.weights(epsilon);
    let n = w.len();
    let (mut p0, mut p1) = if epsilon < 0.0 {
        (1.0, discrete_rho(w[0]))
    } else {
        (1.0, 1.0)
    };
    let mut nodes = 0;
    for i in 1..n - 1 {
        let p2 = ((12.0 - 10.0 * w[i]) * p1 - w[i - 1] * p0) / w[i + 1];
        if (p2 == 0.0 || (p2 < 0.0) != (p1 < 0.0)) && p1 != 0.0 {
            nodes += 1;
        }
        p0 = p1;
        p1 = p2;
        if p1.abs() > RESCALE_AT {
            p0 /= RESCALE_AT;
            p1 /= RESCALE_AT;
        }
    }
    // p0 = ψ_{M−1}, p1 = ψ_M
    let beyond = if epsilon < 0.0 {
        let rho = discrete_rho(w[n - 1]);
        let a = (p0 - p1 / rho) / (rho - 1.0 / rho);
        let b = p1 - a;
        a * b < 0.0 && a.abs() > b.abs()
    } else {
        p1 * (p1 - p0) < 0.0
    };
    nodes + beyond as usize
}

/// Number of bound states with energy below `ε ≤ 0`.
pub fn numerov_count_below(params: &PotentialParams, epsilon: f64, grid: &Grid1D) -> Result<usize> {
    if epsilon > 0.0 {
        return Err(domain!("node counting needs epsilon <= 0"));
    }
    let s = Sampled::new(params, grid)?;
    s.check_step(epsilon.max(s.floor))?;
    Ok(count_nodes(&s, epsilon))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumerovState {
    pub epsilon: f64,
    pub nodes: usize,
}

/// Bound-state energies by bisection on the node count, ground state first.
pub fn numerov_bound_states(
    params: &PotentialParams,
    max_states: usize,
    grid: &Grid1D,
) -> Result<Vec<NumerovState>> {
    let s = Sampled::new(params, grid)?;
    if !(s.floor < 0.0) {
        return Ok(Vec::new());
    }
    s.check_step(s.floor)?;
    let total = count_nodes(&s, 0.0).min(max_states);
    let mut out = Vec::with_capacity(total);
    for k in 0..total {
        let (mut lo, mut hi) = (s.floor, 0.0f64);
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if count_nodes(&s, mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let epsilon = 0.5 * (lo + hi);
        let psi = eigenfunction_on(&s, epsilon)?;
        out.push(NumerovState {
            epsilon,
            nodes: sign_changes(&psi),
        });
    }
    Ok(out)
}

fn sign_changes(psi: &[f64]) -> usize {
    let max = psi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = 1e-12 * max;
    let mut last = 0.0;
    let mut count = 0;
    for &v in psi {
        if v.abs() <= floor {
            continue;
        }
        if last != 0.0 && (v < 0.0) != (last < 0.0) {
            count += 1;
        }
        last = v;
    }
    count
}

// Integrates one decaying solution from `start` towards `end` (inclusive).
fn integrate_from_end(w: &[f64], forward: bool) -> Vec<f64> {
    let n = w.len();
    let idx = |k: usize| if forward { k } else { n - 1 - k };
    let mut psi = alloc::vec![0.0; n];
    psi[idx(0)] = 1.0;
    psi[idx(1)] = discrete_rho(w[idx(0)]);
    for k in 1..n - 1 {
        let (i0, i1, i2) = (idx(k - 1), idx(k), idx(k + 1));
        psi[i2] = ((12.0 - 10.0 * w[i1]) * psi[i1] - w[i0] * psi[i0]) / w[i2];
        if psi[i2].abs() > RESCALE_AT {
            for j in 0..=k + 1 {
                psi[idx(j)] /= RESCALE_AT;
            }
        }
    }
    psi
}

fn eigenfunction_on(s: &Sampled, epsilon: f64) -> Result<Vec<f64>> {
    if !(epsilon < 0.0) {
        return Err(domain!("eigenfunction needs epsilon < 0"));
    }
    let w = s.weights(epsilon);
    let n = w.len();
    let left = integrate_from_end(&w, true);
    let right = integrate_from_end(&w, false);
    // match where both solutions are large relative to their peaks, inside
    // the classically allowed region
    let lmax = left.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let rmax = right.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut best = None;
    let mut best_score = 0.0;
    for i in 1..n - 1 {
        if s.u[i] >= epsilon {
            continue;
        }
        let score = (left[i] / lmax).abs().min((right[i] / rmax).abs());
        if score > best_score {
            best_score = score;
            best = Some(i);
        }
    }
    let m = best.ok_or_else(|| Error::NotApplicable(alloc::format!("no allowed region at epsilon = {epsilon}")))?;
    let scale = left[m] / right[m];
    let mut psi: Vec<f64> = (0..n).map(|i| if i <= m { left[i] } else { scale * right[i] }).collect();
    let h = s.grid.h;
    let norm = math::sqrt(psi.iter().map(|v| v * v).sum::<f64>() * h);
    // sign fixed by the left tail
    let sign = if psi[1] < 0.0 { -1.0 } else { 1.0 };
    psi.iter_mut().for_each(|v| *v *= sign / norm);
    Ok(psi)
}

/// Eigenfunction at a converged energy, sampled on `grid` and normalized
/// with `h Σ ψ² = 1`; positive in the left tail.
pub fn numerov_eigenfunction(params: &PotentialParams, epsilon: f64, grid: &Grid1D) -> Result<Vec<f64>> {
    let s = Sampled::new(params, grid)?;
    s.check_step(epsilon)?;
    eigenfunction_on(&s, epsilon)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterPoint {
    pub epsilon: f64,
    pub r2: f64,
    pub t2: f64,
}

/// Reflection and transmission probabilities for waves incident from the
/// left.
pub fn transmission_reflection(
    params: &PotentialParams,
    eps_grid: &[f64],
    grid: &Grid1D,
) -> Result<Vec<ScatterPoint>> {
    if let Some(e) = eps_grid.iter().find(|e| !(**e > 0.0) || !e.is_finite()) {
        return Err(domain!("scattering energies must be positive, got {e}"));
    }
    let s = Sampled::new(params, grid)?;
    let zero = params.strength == 0.0;
    eps_grid
        .iter()
        .map(|&epsilon| {
            if zero {
                // free propagation
                return Ok(ScatterPoint { epsilon, r2: 0.0, t2: 1.0 });
            }
            s.check_step(epsilon)?;
            Ok(scatter_one(&s, epsilon))
        })
        .collect()
}

fn scatter_one(s: &Sampled, epsilon: f64) -> ScatterPoint {
    let w = s.weights(epsilon);
    let n = w.len();
    let h = s.grid.h;
    let w_free = 1.0 + h * h * epsilon / 12.0;
    let kappa = math::acos(0.5 * (12.0 - 10.0 * w_free) / w_free) / h;
    let xi = |i: usize| s.grid.xi(i);
    // ψ = e^{iκξ} at the two right-most points
    let mut re = alloc::vec![0.0; n];
    let mut im = alloc::vec![0.0; n];
    for i in [n - 1, n - 2] {
        re[i] = math::cos(kappa * xi(i));
        im[i] = math::sin(kappa * xi(i));
    }
    for i in (1..n - 1).rev() {
        let f = 12.0 - 10.0 * w[i];
        re[i - 1] = (f * re[i] - w[i + 1] * re[i + 1]) / w[i - 1];
        im[i - 1] = (f * im[i] - w[i + 1] * im[i + 1]) / w[i - 1];
    }
    // ψ_j = A e^{iκξ_j} + B e^{−iκξ_j} for j = 0, 1
    let (x0, x1) = (xi(0), xi(1));
    let e = |phase: f64| (math::cos(phase), math::sin(phase));
    let mul = |a: (f64, f64), b: (f64, f64)| (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0);
    let sub = |a: (f64, f64), b: (f64, f64)| (a.0 - b.0, a.1 - b.1);
    let p0 = (re[0], im[0]);
    let p1 = (re[1], im[1]);
    // det = −2i sin(κh); divide by multiplying with i / (2 sin κh)
    let inv_det = |z: (f64, f64)| {
        let d = 2.0 * math::sin(kappa * (x1 - x0));
        (-z.1 / d, z.0 / d)
    };
    let a = inv_det(sub(mul(p0, e(-kappa * x1)), mul(p1, e(-kappa * x0))));
    let b = inv_det(sub(mul(p1, e(kappa * x0)), mul(p0, e(kappa * x1))));
    let a2 = a.0 * a.0 + a.1 * a.1;
    let b2 = b.0 * b.0 + b.1 * b.1;
    ScatterPoint {
        epsilon,
        r2: b2 / a2,
        t2: 1.0 / a2,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub energy_tol: f64,
    pub wavefunction_tol: f64,
    pub oracle_tol: f64,
    /// Truncation of the tridiagonal spectra.
    pub truncation: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            energy_tol: 1e-9,
            wavefunction_tol: 1e-8,
            oracle_tol: 1e-6,
            truncation: 4000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CpGammaReport {
    pub strength: f64,
    pub gamma: f64,
    pub energies: Vec<f64>,
    pub oracle_energies: Vec<f64>,
    /// Between the tridiagonal spectra of `(C, γ)` and `(−C, −γ)`.
    pub max_energy_diff: f64,
    /// `max |ψ_{−C,−γ}(−ξ) ∓ ψ_{C,γ}(ξ)|` over `|ξ| ≤ 10`.
    pub max_wavefunction_diff: f64,
    /// Between tridiagonal and Numerov energies, both parameter sets.
    pub max_oracle_diff: f64,
    pub counts_match: bool,
    pub within_tolerance: bool,
}

/// Checks the `C → −C, γ → −γ, x → −x` invariance with both solvers.
pub fn cpgamma_verify(params: &PotentialParams, opts: &VerifyOptions) -> Result<CpGammaReport> {
    let a = PotentialParams::dimensionless(params.strength, params.gamma);
    let b = a.conjugate();
    let grid = Grid1D::for_potential(&a);
    let eopts = EnergyOptions {
        truncation: opts.truncation,
        ..EnergyOptions::default()
    };
    let spectra = |p: &PotentialParams| -> Result<Vec<f64>> {
        if p.strength == 0.0 {
            Ok(Vec::new())
        } else {
            Ok(energy_spectrum(p.strength, p.gamma, &eopts)?.energies)
        }
    };
    let ea = spectra(&a)?;
    let eb = spectra(&b)?;
    let na = numerov_bound_states(&a, usize::MAX, &grid)?;
    let nb = numerov_bound_states(&b, usize::MAX, &grid)?;
    let nodes_ok = [&na, &nb]
        .iter()
        .all(|states| states.iter().enumerate().all(|(i, s)| s.nodes == i));
    let counts_match = ea.len() == eb.len() && ea.len() == na.len() && na.len() == nb.len() && nodes_ok;
    let max_abs_diff = |x: &[f64], y: &[f64]| {
        if x.len() != y.len() {
            return f64::INFINITY;
        }
        x.iter().zip(y).fold(0.0f64, |m, (p, q)| m.max((p - q).abs()))
    };
    let max_energy_diff = max_abs_diff(&ea, &eb);
    let oracle = |s: &[NumerovState]| s.iter().map(|v| v.epsilon).collect::<Vec<_>>();
    let max_oracle_diff = max_abs_diff(&ea, &oracle(&na)).max(max_abs_diff(&eb, &oracle(&nb)));

    let wopts = WavefunctionOptions::default();
    let mut max_wavefunction_diff: f64 = 0.0;
    for (e1, e2) in ea.iter().zip(&eb) {
        let wa = BoundStateWavefunction::normalized(a, *e1, &wopts)?;
        let wb = BoundStateWavefunction::normalized(b, *e2, &wopts)?;
        let mut plus: f64 = 0.0;
        let mut minus: f64 = 0.0;
        for i in 0..=2000 {
            let xi = -10.0 + 0.01 * i as f64;
            let va = wa.eval_xi(xi)?;
            let vb = wb.eval_xi(-xi)?;
            plus = plus.max((vb - va).abs());
            minus = minus.max((vb + va).abs());
        }
        max_wavefunction_diff = max_wavefunction_diff.max(plus.min(minus));
    }
    if ea.len() != eb.len() {
        max_wavefunction_diff = f64::INFINITY;
    }
    let within_tolerance = counts_match
        && max_energy_diff <= opts.energy_tol
        && max_wavefunction_diff <= opts.wavefunction_tol
        && max_oracle_diff <= opts.oracle_tol;
    Ok(CpGammaReport {
        strength: a.strength,
        gamma: a.gamma,
        energies: ea,
        oracle_energies: oracle(&na),
        max_energy_diff,
        max_wavefunction_diff,
        max_oracle_diff,
        counts_match,
        within_tolerance,
    })
}
