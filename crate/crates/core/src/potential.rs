//! The hyperbolic single-wave potential `V(x) = V₀ (tanh λx + γ) sech² λx`.
//!
//! In dimensionless form `U = V/E₀ = C (y + γ)(1 − y²)` with `y = tanh ξ`.
//! The underlying three-parameter family has `A = 0`, `B = γC` and
//! `D = B − ε/2`; those are never stored.

use alloc::vec::Vec;

use crate::error::{domain, Result};
use crate::math;

/// Strength `C`, shape `γ` and inverse length `λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialParams {
    pub strength: f64,
    pub gamma: f64,
    pub lambda: f64,
}

impl PotentialParams {
    pub fn new(strength: f64, gamma: f64, lambda: f64) -> Result<Self> {
        if !strength.is_finite() || !gamma.is_finite() {
            return Err(domain!("strength and gamma must be finite"));
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(domain!("lambda must be positive, got {lambda}"));
        }
        Ok(PotentialParams {
            strength,
            gamma,
            lambda,
        })
    }

    /// Parameters with `λ = 1`, so `x` and `ξ` coincide.
    pub fn dimensionless(strength: f64, gamma: f64) -> Self {
        PotentialParams {
            strength,
            gamma,
            lambda: 1.0,
        }
    }

    /// Image under `C → −C, γ → −γ` (combined with `x → −x` this leaves the
    /// potential unchanged).
    pub fn conjugate(&self) -> Self {
        PotentialParams {
            strength: -self.strength,
            gamma: -self.gamma,
            lambda: self.lambda,
        }
    }

    /// `U(ξ)` in units of `E₀`.
    #[inline]
    pub fn at_xi(&self, xi: f64) -> f64 {
        self.strength * (math::tanh(xi) + self.gamma) * math::sech2(xi)
    }
}

/// `U = V/E₀` at physical position `x`.
pub fn evaluate(params: &PotentialParams, x: f64) -> f64 {
    params.at_xi(params.lambda * x)
}

/// A stationary point of the potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub x: f64,
    pub value: f64,
}

/// The two stationary points `x₊` and `x₋`, in that order.
///
/// `x± = atanh[−(γ ± √(γ²+3))/3] / λ`; a point whose `tanh` value falls
/// outside `(−1, 1)` does not exist and is returned as `None`.
pub fn extrema(params: &PotentialParams) -> [Option<Extremum>; 2] {
    let s = math::sqrt(params.gamma * params.gamma + 3.0);
    let ys = [-(params.gamma + s) / 3.0, -(params.gamma - s) / 3.0];
    ys.map(|y| {
        if y.abs() < 1.0 {
            let x = math::atanh(y) / params.lambda;
            Some(Extremum {
                x,
                value: params.strength * (y + params.gamma) * (1.0 - y * y),
            })
        } else {
            None
        }
    })
}

/// Lowest value of `U`; no bound state lies at or below it.
pub fn potential_floor(params: &PotentialParams) -> f64 {
    extrema(params)
        .iter()
        .flatten()
        .map(|e| e.value)
        .fold(0.0, f64::min)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialKind {
    SingleWave,
    Well,
    Barrier,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PotentialClass {
    pub kind: PotentialKind,
    /// `C = 0`: reported as a degenerate well.
    pub zero_potential: bool,
}

pub fn classify(params: &PotentialParams) -> PotentialClass {
    let (c, g) = (params.strength, params.gamma);
    let kind = if c == 0.0 {
        PotentialKind::Well
    } else if g.abs() < 1.0 {
        PotentialKind::SingleWave
    } else if g * c < 0.0 {
        PotentialKind::Well
    } else {
        PotentialKind::Barrier
    };
    PotentialClass {
        kind,
        zero_potential: c == 0.0,
    }
}

/// `count` uniformly spaced samples `(x, U)` on `[x_min, x_max]`, both ends
/// included exactly.
pub fn sample_grid(
    params: &PotentialParams,
    x_min: f64,
    x_max: f64,
    count: usize,
) -> Result<Vec<(f64, f64)>> {
    if !(x_min < x_max) || !x_min.is_finite() || !x_max.is_finite() {
        return Err(domain!("grid range requires x_min < x_max, got [{x_min}, {x_max}]"));
    }
    if count < 2 {
        return Err(domain!("grid needs at least 2 points, got {count}"));
    }
    let last = (count - 1) as f64;
    Ok((0..count)
        .map(|i| {
            // weighted form keeps symmetric ranges exactly symmetric
            let x = (x_min * (last - i as f64) + x_max * i as f64) / last;
            (x, evaluate(params, x))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn value_at_origin() {
        let p = PotentialParams::dimensionless(10.0, 0.2);
        assert_relative_eq!(evaluate(&p, 0.0), 2.0, max_relative = 1e-15);
    }

    #[test]
    fn decays_at_infinity() {
        let p = PotentialParams::new(37.0, 0.4, 1.3).unwrap();
        for &x in &[-800.0, -60.0, 60.0, 800.0, 1e6] {
            assert!(evaluate(&p, x).abs() < 1e-30);
        }
        assert_eq!(evaluate(&p, f64::INFINITY), 0.0);
    }

    #[test]
    fn value_at_inflection_argument() {
        let p = PotentialParams::dimensionless(1.0, 0.0);
        let x = (1.0f64 / 3.0f64.sqrt()).atanh();
        assert_relative_eq!(evaluate(&p, x), 2.0 / (3.0 * 3.0f64.sqrt()), max_relative = 1e-14);
    }

    #[test]
    fn symmetric_extrema_at_zero_gamma() {
        let p = PotentialParams::new(1.0, 0.0, 2.0).unwrap();
        let [plus, minus] = extrema(&p);
        let (plus, minus) = (plus.unwrap(), minus.unwrap());
        let x0 = (1.0f64 / 3.0f64.sqrt()).atanh() / 2.0;
        assert_relative_eq!(plus.x, -x0, max_relative = 1e-14);
        assert_relative_eq!(minus.x, x0, max_relative = 1e-14);
        let u0 = 2.0 / (3.0 * 3.0f64.sqrt());
        assert_relative_eq!(minus.value, u0, max_relative = 1e-14);
        assert_relative_eq!(plus.value, -u0, max_relative = 1e-14);
    }

    #[test]
    fn extrema_are_stationary() {
        for &g in &[0.5, -0.3, 0.95, 0.0] {
            let p = PotentialParams::dimensionless(3.0, g);
            for e in extrema(&p).iter().flatten() {
                let h = 1e-5;
                let d = (evaluate(&p, e.x + h) - evaluate(&p, e.x - h)) / (2.0 * h);
                assert!(d.abs() < 1e-8, "gamma {g}: dU/dx = {d}");
                assert_relative_eq!(evaluate(&p, e.x), e.value, max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn extremum_absent_outside_single_wave() {
        let [plus, minus] = extrema(&PotentialParams::dimensionless(1.0, 1.5));
        assert!(plus.is_none());
        assert!(minus.is_some());
        let [plus, minus] = extrema(&PotentialParams::dimensionless(1.0, -1.5));
        assert!(plus.is_some());
        assert!(minus.is_none());
    }

    #[test]
    fn classification() {
        let c = |s, g| classify(&PotentialParams::dimensionless(s, g));
        assert_eq!(c(5.0, 0.3).kind, PotentialKind::SingleWave);
        assert_eq!(c(5.0, 1.5).kind, PotentialKind::Barrier);
        assert_eq!(c(-5.0, 1.5).kind, PotentialKind::Well);
        assert_eq!(c(5.0, -1.0).kind, PotentialKind::Well);
        let zero = c(0.0, 0.3);
        assert!(zero.zero_potential);
        assert_eq!(zero.kind, PotentialKind::Well);
        assert!(!c(5.0, 0.3).zero_potential);
    }

    #[test]
    fn grid_endpoints_and_errors() {
        let p = PotentialParams::dimensionless(1.0, 0.0);
        let g = sample_grid(&p, -6.0, 6.0, 2).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g[0].0, -6.0);
        assert_eq!(g[1].0, 6.0);
        assert!(g[0].1.abs() < 1e-4 && g[1].1.abs() < 1e-4);
        assert!(sample_grid(&p, 1.0, 1.0, 5).is_err());
        assert!(sample_grid(&p, 0.0, 1.0, 1).is_err());
    }

    #[test]
    fn grid_is_antisymmetric_for_zero_gamma() {
        let p = PotentialParams::new(4.0, 0.0, 0.7).unwrap();
        let g = sample_grid(&p, -9.0, 9.0, 301).unwrap();
        for i in 0..g.len() {
            let j = g.len() - 1 - i;
            assert_eq!(g[i].0, -g[j].0);
            assert_eq!(g[i].1, -g[j].1);
        }
    }

    #[test]
    fn gamma_flip_mirrors_grid() {
        // U_{C,−γ}(−x) = −U_{C,γ}(x)
        let a = sample_grid(&PotentialParams::dimensionless(2.0, 0.9), -5.0, 5.0, 201).unwrap();
        let b = sample_grid(&PotentialParams::dimensionless(2.0, -0.9), -5.0, 5.0, 201).unwrap();
        for i in 0..a.len() {
            let j = a.len() - 1 - i;
            assert_relative_eq!(b[j].1, -a[i].1, epsilon = 1e-15, max_relative = 1e-14);
        }
    }

    #[test]
    fn integral_is_two_gamma_c() {
        let p = PotentialParams::dimensionless(7.0, 0.35);
        let total = integrate(|x| evaluate(&p, x), -40.0, 40.0, 1e-13, 1e-13).unwrap();
        assert_relative_eq!(total, 2.0 * 0.35 * 7.0, max_relative = 1e-10);
        // physical x: ∫V dx / E₀ = 2γC/λ
        let q = PotentialParams::new(7.0, 0.35, 2.5).unwrap();
        let total = integrate(|x| evaluate(&q, x), -20.0, 20.0, 1e-13, 1e-13).unwrap();
        assert_relative_eq!(total, 2.0 * 0.35 * 7.0 / 2.5, max_relative = 1e-10);
    }

    #[test]
    fn floor_is_minimum_over_samples() {
        for &(c, g) in &[(5.0, 0.2), (-5.0, 0.2), (3.0, -0.7), (2.0, 1.4), (-2.0, 1.4)] {
            let p = PotentialParams::dimensionless(c, g);
            let floor = potential_floor(&p);
            let sampled = sample_grid(&p, -10.0, 10.0, 20001)
                .unwrap()
                .into_iter()
                .map(|(_, u)| u)
                .fold(0.0, f64::min);
            assert!(floor <= sampled + 1e-12);
            assert!(sampled - floor < 1e-6, "{c} {g}: {floor} vs {sampled}");
        }
    }

    proptest! {
        #[test]
        fn cp_gamma_leaves_potential_invariant(
            c in -200.0f64..200.0, g in -0.99f64..0.99, x in -30.0f64..30.0
        ) {
            let p = PotentialParams::dimensionless(c, g);
            prop_assert_eq!(evaluate(&p.conjugate(), -x), evaluate(&p, x));
        }
    }
}
