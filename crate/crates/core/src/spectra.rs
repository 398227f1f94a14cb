//! Parameter spectra, critical strengths and energy spectra from `T_γ`.
//!
//! An eigenvalue `θ` of `T_γ(μ)` is a strength `C = −1/θ` for which
//! `ε = −μ²` is a bound-state energy. Negative `θ` give `C > 0`, positive
//! `θ` give `C < 0`; on each side the values are indexed by increasing `|C|`.

use alloc::vec::Vec;

use crate::eigen::{kth_largest, kth_smallest, sturm_count};
use crate::error::{domain, Error, Result};
use crate::math;
use crate::potential::{potential_floor, PotentialParams};
use crate::waveop::{build_t_gamma, Branch, TridiagMatrix};

/// Sign of the strength `C`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Positive,
    Negative,
}

impl Side {
    pub fn of(c: f64) -> Side {
        if c < 0.0 {
            Side::Negative
        } else {
            Side::Positive
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Side::Positive => "positive",
            Side::Negative => "negative",
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            Side::Positive => 1.0,
            Side::Negative => -1.0,
        }
    }
}

// k-th eigenvalue of `t` on `side`, ordered by decreasing |θ|.
fn side_theta(t: &TridiagMatrix, side: Side, k: usize) -> Result<f64> {
    match side {
        Side::Positive => kth_smallest(t, k),
        Side::Negative => kth_largest(t, k),
    }
}

// Up to `count` eigenvalues on `side` whose magnitude exceeds `threshold`.
fn side_thetas(t: &TridiagMatrix, side: Side, count: usize, threshold: f64) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(count);
    for k in 0..count.min(t.len()) {
        let theta = side_theta(t, side, k)?;
        if theta * side.sign() >= -threshold {
            break;
        }
        out.push(theta);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumOptions {
    pub truncation: usize,
    /// Values reported per sign of `C`.
    pub per_side: usize,
    /// Relative movement allowed between `N` and `2N` for a converged value.
    pub rel_tol: f64,
    /// `|θ| < zero_threshold·‖T‖` is treated as `C → ∞` and dropped.
    pub zero_threshold: f64,
    pub branch: Branch,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions {
            truncation: 4000,
            per_side: 8,
            rel_tol: 1e-8,
            zero_threshold: 1e-12,
            branch: Branch::Plus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumValue {
    pub side: Side,
    /// Index on its side, by increasing `|C|`.
    pub k: usize,
    pub c: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParameterSpectrum {
    pub epsilon: f64,
    pub gamma: f64,
    pub branch: Branch,
    pub truncation: usize,
    /// μ-regularization used (0 when none).
    pub delta_mu: f64,
    /// Ascending in `C`.
    pub values: Vec<SpectrumValue>,
}

impl ParameterSpectrum {
    pub fn c_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.c).collect()
    }

    pub fn side(&self, side: Side) -> impl DoubleEndedIterator<Item = &SpectrumValue> {
        self.values.iter().filter(move |v| v.side == side)
    }
}

/// Strengths `C` whose spectrum contains `ε`.
pub fn parameter_spectrum(
    epsilon: f64,
    gamma: f64,
    opts: &SpectrumOptions,
) -> Result<ParameterSpectrum> {
    if !(epsilon < 0.0) || !epsilon.is_finite() {
        return Err(domain!("parameter spectrum needs epsilon < 0, got {epsilon}"));
    }
    let mu = math::sqrt(-epsilon);
    let t = build_t_gamma(gamma, mu, opts.branch, opts.truncation).map_err(|e| match e {
        Error::DegenerateBasis { .. } => domain!(
            "epsilon = {epsilon} leaves a degenerate basis; use critical strengths for the zero-energy limit"
        ),
        other => other,
    })?;
    let t2 = build_t_gamma(gamma, mu, opts.branch, 2 * opts.truncation)?;
    let threshold = opts.zero_threshold * t.norm_bound();
    let mut values = Vec::new();
    for side in [Side::Negative, Side::Positive] {
        let thetas = side_thetas(&t, side, opts.per_side, threshold)?;
        for (k, &theta) in thetas.iter().enumerate() {
            let c = -1.0 / theta;
            let c2 = -1.0 / side_theta(&t2, side, k)?;
            values.push(SpectrumValue {
                side,
                k,
                c,
                converged: (c - c2).abs() <= opts.rel_tol * c.abs(),
            });
        }
    }
    values.sort_by(|a, b| a.c.total_cmp(&b.c));
    Ok(ParameterSpectrum {
        epsilon,
        gamma,
        branch: opts.branch,
        truncation: opts.truncation,
        delta_mu: 0.0,
        values,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalOptions {
    /// Entries per side, including the `Ĉ_0 = 0` entry where present.
    pub n_max: usize,
    pub truncation: usize,
    pub delta: f64,
    /// Relative size of the extrapolation correction above which a third
    /// regularization point is used.
    pub tol: f64,
    pub branch: Branch,
}

impl Default for CriticalOptions {
    fn default() -> Self {
        CriticalOptions {
            n_max: 6,
            truncation: 4000,
            delta: 1e-7,
            tol: 1e-12,
            branch: Branch::Minus,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalSet {
    pub gamma: f64,
    pub branch: Branch,
    /// Ascending, `C ≥ 0`.
    pub positive: Vec<f64>,
    /// Descending, `C ≤ 0`.
    pub negative: Vec<f64>,
    pub truncation: usize,
    /// Regularization finally used.
    pub delta: f64,
    /// Largest relative change of any value between `N` and `2N`.
    pub truncation_shift: f64,
}

impl CriticalSet {
    pub fn side(&self, side: Side) -> &[f64] {
        match side {
            Side::Positive => &self.positive,
            Side::Negative => &self.negative,
        }
    }
}

struct SideLimit {
    thetas: Vec<f64>,
    zero_entry: bool,
}

fn side_limit(
    gamma: f64,
    side: Side,
    want: usize,
    truncation: usize,
    delta: f64,
    tol: f64,
    branch: Branch,
) -> Result<SideLimit> {
    let take = want + 2;
    let eval = |mu: f64| -> Result<Vec<f64>> {
        let t = build_t_gamma(gamma, mu, branch, truncation)?;
        side_thetas(&t, side, take, 0.0)
    };
    let th1 = eval(delta)?;
    let th2 = eval(0.5 * delta)?;
    let len = th1.len().min(th2.len());
    // branches that blow up as μ → 0 (like 1/μ or 1/√μ) map to C → 0
    let diverging = (0..len)
        .take_while(|&k| th2[k] / th1[k] > 1.2)
        .count();
    let zero_entry = match branch {
        Branch::Plus => diverging > 0,
        Branch::Minus => gamma == 0.0 || side.sign() * gamma < 0.0,
    };
    let c1 = &th1[diverging..len];
    let c2 = &th2[diverging..len];
    for k in 0..c1.len() {
        let mut gap = f64::INFINITY;
        if k > 0 {
            gap = gap.min((c1[k] - c1[k - 1]).abs());
        } else if diverging > 0 {
            gap = gap.min((c1[k] - th1[diverging - 1]).abs());
        }
        if k + 1 < c1.len() {
            gap = gap.min((c1[k + 1] - c1[k]).abs());
        }
        if !((c2[k] - c1[k]).abs() < 0.25 * gap) {
            return Err(Error::BranchTracking(alloc::format!(
                "{} side branch {k} moves {} against a gap of {gap} between mu = {delta} and {}",
                side.name(),
                (c2[k] - c1[k]).abs(),
                0.5 * delta
            )));
        }
    }
    let r1: Vec<f64> = c1.iter().zip(c2).map(|(a, b)| 2.0 * b - a).collect();
    let needs_third = r1
        .iter()
        .zip(c2)
        .any(|(r, b)| (r - b).abs() > tol * r.abs());
    let thetas = if needs_third {
        let th3 = eval(0.25 * delta)?;
        let c3 = &th3[diverging.min(th3.len())..];
        r1.iter()
            .zip(c2)
            .zip(c3)
            .map(|((r1, b), c)| {
                let r2 = 2.0 * c - b;
                (4.0 * r2 - r1) / 3.0
            })
            .collect()
    } else {
        r1
    };
    Ok(SideLimit { thetas, zero_entry })
}

fn critical_at(
    gamma: f64,
    opts: &CriticalOptions,
    truncation: usize,
    delta: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut sides = [Vec::new(), Vec::new()];
    for (i, side) in [Side::Positive, Side::Negative].into_iter().enumerate() {
        let lim = side_limit(gamma, side, opts.n_max, truncation, delta, opts.tol, opts.branch)?;
        let out = &mut sides[i];
        if lim.zero_entry {
            out.push(0.0);
        }
        out.extend(lim.thetas.iter().map(|&th| -1.0 / th));
        out.truncate(opts.n_max);
    }
    let [positive, negative] = sides;
    Ok((positive, negative))
}

/// Zero-energy strengths `Ĉ_n(γ)` by μ-regularization and extrapolation.
///
/// A branch that diverges as `μ → 0` is reported as the leading entry
/// `Ĉ_0 = 0` of its side.
pub fn critical_strengths(gamma: f64, opts: &CriticalOptions) -> Result<CriticalSet> {
    if opts.n_max < 1 {
        return Err(domain!("n_max must be at least 1"));
    }
    if !(opts.delta > 0.0) || opts.delta >= 0.5 {
        return Err(domain!("delta must lie in (0, 0.5), got {}", opts.delta));
    }
    if !gamma.is_finite() {
        return Err(domain!("gamma must be finite"));
    }
    if opts.truncation < opts.n_max + 4 {
        return Err(domain!("truncation {} too small for {} values", opts.truncation, opts.n_max));
    }
    let mut delta = opts.delta;
    let (positive, negative) = match critical_at(gamma, opts, opts.truncation, delta) {
        Err(Error::BranchTracking(_)) => {
            delta /= 10.0;
            critical_at(gamma, opts, opts.truncation, delta)?
        }
        other => other?,
    };
    let (p2, n2) = critical_at(gamma, opts, 2 * opts.truncation, delta)?;
    let mut shift: f64 = 0.0;
    for (a, b) in positive.iter().chain(&negative).zip(p2.iter().chain(&n2)) {
        if *a != 0.0 {
            shift = shift.max(((a - b) / a).abs());
        }
    }
    Ok(CriticalSet {
        gamma,
        branch: opts.branch,
        positive,
        negative,
        truncation: opts.truncation,
        delta,
        truncation_shift: shift,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyOptions {
    pub truncation: usize,
    pub branch: Branch,
    /// Lower end of the search; defaults to the potential minimum.
    pub eps_floor: Option<f64>,
    pub grid_points: usize,
    /// Smallest `μ` scanned; shallower states are not resolved.
    pub mu_min: f64,
}

impl Default for EnergyOptions {
    fn default() -> Self {
        EnergyOptions {
            truncation: 4000,
            branch: Branch::Plus,
            eps_floor: None,
            grid_points: 200,
            mu_min: 1e-7,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergySpectrum {
    pub c: f64,
    pub gamma: f64,
    pub branch: Branch,
    pub truncation: usize,
    /// Ascending (ground state first).
    pub energies: Vec<f64>,
    pub mu_values: Vec<f64>,
}

impl EnergySpectrum {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }
}

// Number of spectrum branches at μ with |C_k(μ)| < |C| on the side of C,
// i.e. the number of states with ε < −μ².
fn branches_inside(c: f64, gamma: f64, mu: f64, branch: Branch, n: usize) -> Result<usize> {
    let t = build_t_gamma(gamma, mu, branch, n)?;
    let theta = -1.0 / c;
    Ok(if theta > 0.0 {
        t.len() - sturm_count(&t, theta)
    } else {
        sturm_count(&t, theta)
    })
}

/// Bound-state energies of `(C, γ)` by inverting the parameter spectrum.
pub fn energy_spectrum(c: f64, gamma: f64, opts: &EnergyOptions) -> Result<EnergySpectrum> {
    if c == 0.0 || !c.is_finite() || !gamma.is_finite() {
        return Err(domain!("energy spectrum needs finite C != 0 and finite gamma"));
    }
    if opts.grid_points < 2 {
        return Err(domain!("grid needs at least 2 points"));
    }
    let floor = match opts.eps_floor {
        Some(f) => f,
        None => potential_floor(&PotentialParams::dimensionless(c, gamma)),
    };
    let empty = EnergySpectrum {
        c,
        gamma,
        branch: opts.branch,
        truncation: opts.truncation,
        energies: Vec::new(),
        mu_values: Vec::new(),
    };
    if !(floor < 0.0) {
        return Ok(empty);
    }
    let mut mu_max = math::sqrt(-floor);
    if opts.branch == Branch::Minus {
        mu_max = mu_max.min(1.0 - 1e-12);
    }
    let mu_min = opts.mu_min;
    if !(mu_min > 0.0) || mu_min >= mu_max {
        return Ok(empty);
    }
    let count = |mu: f64| branches_inside(c, gamma, mu, opts.branch, opts.truncation);

    let m = opts.grid_points;
    let ratio = math::ln(mu_max / mu_min);
    let grid: Vec<f64> = (0..m)
        .map(|i| {
            if i + 1 == m {
                mu_max
            } else {
                mu_min * math::exp(ratio * i as f64 / (m - 1) as f64)
            }
        })
        .collect();
    let counts = grid.iter().map(|&mu| count(mu)).collect::<Result<Vec<_>>>()?;
    for i in 1..m {
        if counts[i] > counts[i - 1] {
            return Err(Error::BranchTracking(alloc::format!(
                "branch count rises from {} to {} between mu = {} and {}",
                counts[i - 1],
                counts[i],
                grid[i - 1],
                grid[i]
            )));
        }
    }
    if counts[m - 1] != 0 {
        return Err(Error::BranchTracking(alloc::format!(
            "{} branches remain below the potential floor {floor}",
            counts[m - 1]
        )));
    }
    let total = counts[0];
    let mut mus = Vec::with_capacity(total);
    for j in 0..total {
        // largest grid interval where the count drops to ≤ j
        let i = (1..m).find(|&i| counts[i] <= j).unwrap_or(m - 1);
        let (mut lo, mut hi) = (grid[i - 1], grid[i]);
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if count(mid)? > j {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        mus.push(0.5 * (lo + hi));
    }
    // j = 0 has the largest μ, i.e. the ground state
    let energies = mus.iter().map(|mu| -mu * mu).collect();
    Ok(EnergySpectrum {
        energies,
        mu_values: mus,
        ..empty
    })
}

/// Number of bound states of `(C, γ)` from the bracket rule on `Ĉ_n(γ)`.
///
/// `opts.n_max` is the starting size of the critical set; it is doubled
/// until the set extends past `|C|`.
pub fn count_bound_states(c: f64, gamma: f64, opts: &CriticalOptions) -> Result<usize> {
    if c == 0.0 {
        return Ok(0);
    }
    if !c.is_finite() {
        return Err(domain!("strength must be finite"));
    }
    let side = Side::of(c);
    let mut o = opts.clone();
    o.n_max = o.n_max.max(4);
    loop {
        let set = critical_strengths(gamma, &o)?;
        let vals = set.side(side);
        let exhausted = vals.len() < o.n_max;
        if exhausted || vals.last().is_none_or(|v| v.abs() > c.abs()) {
            return Ok(vals.iter().filter(|v| v.abs() < c.abs()).count());
        }
        if 2 * o.n_max + 4 > o.truncation / 2 {
            return Err(Error::NotApplicable(alloc::format!(
                "|C| = {} exceeds the critical values resolvable at truncation {}",
                c.abs(),
                o.truncation
            )));
        }
        o.n_max *= 2;
    }
}

/// One tracked curve `C_k(ε)` of the spectral map.
#[derive(Debug, Clone, PartialEq)]
pub struct MapCurve {
    pub side: Side,
    pub k: usize,
    /// `(ε, C)` pairs in the order of the input grid.
    pub points: Vec<(f64, f64)>,
}

/// Groups per-energy spectra into branch curves and checks that each curve
/// is monotone (`|C|` grows as `ε` decreases).
pub fn track_branches(spectra: &[ParameterSpectrum]) -> Result<Vec<MapCurve>> {
    let mut curves: Vec<MapCurve> = Vec::new();
    for s in spectra {
        for v in &s.values {
            let pos = curves.iter().position(|c| c.side == v.side && c.k == v.k);
            let curve = match pos {
                Some(i) => &mut curves[i],
                None => {
                    curves.push(MapCurve {
                        side: v.side,
                        k: v.k,
                        points: Vec::new(),
                    });
                    curves.last_mut().unwrap()
                }
            };
            curve.points.push((s.epsilon, v.c));
        }
    }
    for curve in &curves {
        let mut pts = curve.points.clone();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in pts.windows(2) {
            if w[1].1.abs() > w[0].1.abs() * (1.0 + 1e-12) {
                return Err(Error::BranchTracking(alloc::format!(
                    "{} branch {} is not monotone between epsilon = {} and {}",
                    curve.side.name(),
                    curve.k,
                    w[0].0,
                    w[1].0
                )));
            }
        }
    }
    curves.sort_by_key(|a| (a.side, a.k));
    Ok(curves)
}

/// Branch curves `C_k(ε)` over an energy grid.
pub fn spectral_map(gamma: f64, eps_grid: &[f64], opts: &SpectrumOptions) -> Result<Vec<MapCurve>> {
    let spectra = eps_grid
        .iter()
        .map(|&e| parameter_spectrum(e, gamma, opts))
        .collect::<Result<Vec<_>>>()?;
    track_branches(&spectra)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn small() -> SpectrumOptions {
        SpectrumOptions {
            truncation: 400,
            ..SpectrumOptions::default()
        }
    }

    #[test]
    fn spectrum_rejects_non_negative_energy() {
        assert!(parameter_spectrum(0.0, 0.2, &small()).is_err());
        assert!(parameter_spectrum(0.3, 0.2, &small()).is_err());
    }

    #[test]
    fn zero_gamma_spectrum_is_symmetric() {
        let s = parameter_spectrum(-0.7, 0.0, &small()).unwrap();
        let pos: Vec<f64> = s.side(Side::Positive).map(|v| v.c).collect();
        let neg: Vec<f64> = s.side(Side::Negative).map(|v| v.c).rev().collect();
        assert_eq!(pos.len(), neg.len());
        for (p, n) in pos.iter().zip(&neg) {
            assert_relative_eq!(*p, -n, max_relative = 1e-12);
        }
    }

    #[test]
    fn gamma_flip_negates_spectrum() {
        let a = parameter_spectrum(-1.3, 0.45, &small()).unwrap();
        let b = parameter_spectrum(-1.3, -0.45, &small()).unwrap();
        let mut bc: Vec<f64> = b.c_values().iter().map(|c| -c).collect();
        bc.sort_by(f64::total_cmp);
        for (x, y) in a.c_values().iter().zip(&bc) {
            assert_relative_eq!(*x, *y, max_relative = 1e-12);
        }
    }

    #[test]
    fn low_values_converge() {
        let s = parameter_spectrum(-0.5, 0.2, &small()).unwrap();
        assert!(s.values.iter().filter(|v| v.k < 3).all(|v| v.converged));
        assert!(s.values.windows(2).all(|w| w[0].c < w[1].c));
    }

    #[test]
    fn critical_anchor_values() {
        let set = critical_strengths(0.2, &CriticalOptions::default()).unwrap();
        assert_relative_eq!(set.positive[0], 9.4299992413, max_relative = 1e-9);
        assert_eq!(set.negative[0], 0.0);
        assert_relative_eq!(set.negative[1], -4.4155383280, max_relative = 1e-9);
        assert_eq!(set.positive.len(), 6);
    }

    #[test]
    fn critical_set_validates_options() {
        let bad = CriticalOptions {
            delta: 0.0,
            ..CriticalOptions::default()
        };
        assert!(critical_strengths(0.2, &bad).is_err());
        let bad = CriticalOptions {
            n_max: 0,
            ..CriticalOptions::default()
        };
        assert!(critical_strengths(0.2, &bad).is_err());
    }

    #[test]
    fn no_states_for_shallow_floor() {
        let s = energy_spectrum(
            5.0,
            0.2,
            &EnergyOptions {
                eps_floor: Some(0.0),
                ..EnergyOptions::default()
            },
        )
        .unwrap();
        assert!(s.is_empty());
        assert!(energy_spectrum(0.0, 0.2, &EnergyOptions::default()).is_err());
    }

    #[test]
    fn bracket_counts() {
        let opts = CriticalOptions {
            branch: Branch::Plus,
            truncation: 1000,
            ..CriticalOptions::default()
        };
        assert_eq!(count_bound_states(20.0, 0.2, &opts).unwrap(), 1);
        assert_eq!(count_bound_states(-10.0, 0.2, &opts).unwrap(), 2);
        assert_eq!(count_bound_states(-1e-6, 0.2, &opts).unwrap(), 1);
        assert_eq!(count_bound_states(0.0, 0.2, &opts).unwrap(), 0);
    }

    #[test]
    fn energies_reinsert_into_parameter_spectrum() {
        let opts = EnergyOptions {
            truncation: 1000,
            ..EnergyOptions::default()
        };
        let es = energy_spectrum(-10.0, 0.2, &opts).unwrap();
        assert_eq!(es.len(), 2);
        for &e in &es.energies {
            let ps = parameter_spectrum(
                e,
                0.2,
                &SpectrumOptions {
                    truncation: 1000,
                    ..SpectrumOptions::default()
                },
            )
            .unwrap();
            let best = ps
                .c_values()
                .iter()
                .map(|c| ((c + 10.0) / 10.0).abs())
                .fold(f64::INFINITY, f64::min);
            assert!(best < 1e-10, "epsilon {e}: {best}");
        }
    }

    #[test]
    fn map_curves_are_monotone() {
        let grid: Vec<f64> = (1..=20).map(|i| -0.1 * i as f64).collect();
        let curves = spectral_map(-0.5, &grid, &small()).unwrap();
        assert!(curves.iter().any(|c| c.side == Side::Positive));
        assert!(curves.iter().any(|c| c.side == Side::Negative));
        for c in &curves {
            assert!(!c.points.is_empty());
        }
    }
}
