//! Adaptive Gauss–Kronrod (7/15) quadrature on a finite interval.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

// nodes and weights as tabulated, beyond f64 precision
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

#[allow(clippy::excessive_precision)]
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

// Gauss weights for the odd Kronrod nodes XGK[1], XGK[3], XGK[5], XGK[7].
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const MAX_SEGMENTS: usize = 20_000;

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let sum = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * sum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// `∫_a^b f` to within `max(abs_tol, rel_tol·|I|)`.
///
/// Segments are bisected greedily by largest error estimate.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return integrate(f, b, a, abs_tol, rel_tol).map(|v| -v);
    }
    let (value, err) = gk15(&mut f, a, b);
    if !value.is_finite() || !err.is_finite() {
        return Err(Error::Quadrature(format!("non-finite integrand on [{a}, {b}]")));
    }
    let mut segments: Vec<(f64, f64, f64, f64)> = Vec::with_capacity(64);
    segments.push((a, b, value, err));
    let mut total = value;
    let mut total_err = err;

    while total_err > abs_tol.max(rel_tol * total.abs()) {
        if segments.len() >= MAX_SEGMENTS {
            return Err(Error::Quadrature(format!(
                "error estimate {total_err:e} after {MAX_SEGMENTS} segments on [{a}, {b}]"
            )));
        }
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let (lo, hi, v, e) = segments.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // interval exhausted at machine resolution
            return Err(Error::Quadrature(format!(
                "interval [{lo}, {hi}] cannot be subdivided further"
            )));
        }
        let (v1, e1) = gk15(&mut f, lo, mid);
        let (v2, e2) = gk15(&mut f, mid, hi);
        total += v1 + v2 - v;
        total_err += e1 + e2 - e;
        segments.push((lo, mid, v1, e1));
        segments.push((mid, hi, v2, e2));
        if !total.is_finite() || !total_err.is_finite() {
            return Err(Error::Quadrature(format!("non-finite integrand on [{lo}, {hi}]")));
        }
    }
    // re-add to limit drift from the running updates
    Ok(segments.iter().map(|s| s.2).sum())
}
