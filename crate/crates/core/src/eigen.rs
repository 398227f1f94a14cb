//! Eigenvalues of symmetric tridiagonal matrices.
//!
//! Full spectra use implicit QL with Wilkinson shifts. Selected eigenvalues
//! use Sturm-count bisection, which keeps high relative accuracy on the
//! strongly graded `T_γ` matrices and is exactly odd under `diag → −diag`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::waveop::TridiagMatrix;

const MAX_QL_ITERATIONS: usize = 60;

/// All eigenvalues in ascending order.
pub fn eigenvalues_tridiag(t: &TridiagMatrix) -> Result<Vec<f64>> {
    let n = t.len();
    let mut d = t.diag().to_vec();
    let mut e = t.off().to_vec();
    e.push(0.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_ITERATIONS {
                return Err(Error::NoConvergence {
                    what: "implicit QL",
                    index: l,
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = math::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = math::hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Number of eigenvalues strictly below `x`.
pub fn sturm_count(t: &TridiagMatrix, x: f64) -> usize {
    let d = t.diag();
    let e = t.off();
    let mut count = 0;
    let mut q = d[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..d.len() {
        let denom = if q == 0.0 {
            // perturb a zero pivot to the nearest representable side
            f64::EPSILON * (e[i - 1].abs() + f64::MIN_POSITIVE)
        } else {
            q
        };
        q = d[i] - x - e[i - 1] * e[i - 1] / denom;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// The `k`-th smallest eigenvalue (0-based) by bisection on the Sturm count.
pub fn kth_smallest(t: &TridiagMatrix, k: usize) -> Result<f64> {
    if k >= t.len() {
        return Err(Error::NotApplicable(alloc::format!(
            "eigenvalue index {k} out of range for size {}",
            t.len()
        )));
    }
    let (mut lo, mut hi) = t.gershgorin();
    let pad = f64::EPSILON * lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    lo -= pad;
    hi += pad;
    // invariant: count(lo) <= k < count(hi)
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= f64::MIN_POSITIVE {
            break;
        }
        if sturm_count(t, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The `k`-th largest eigenvalue (0-based).
pub fn kth_largest(t: &TridiagMatrix, k: usize) -> Result<f64> {
    if k >= t.len() {
        return Err(Error::NotApplicable(alloc::format!(
            "eigenvalue index {k} out of range for size {}",
            t.len()
        )));
    }
    kth_smallest(t, t.len() - 1 - k)
}

/// Shifted inverse iteration at `theta`; returns the unit eigenvector and
/// the residual `‖T v − θ v‖`.
pub fn inverse_iteration(t: &TridiagMatrix, theta: f64, steps: usize) -> (Vec<f64>, f64) {
    let n = t.len();
    let scale = t.norm_bound().max(f64::MIN_POSITIVE);
    let shift = theta + 4.0 * f64::EPSILON * scale;
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7 % 13) as f64)).collect();
    for _ in 0..steps {
        v = solve_shifted(t, shift, &v);
        let norm = math::sqrt(v.iter().map(|x| x * x).sum::<f64>());
        v.iter_mut().for_each(|x| *x /= norm);
    }
    let tv = t.apply(&v);
    let res = tv
        .iter()
        .zip(&v)
        .map(|(a, b)| (a - theta * b) * (a - theta * b))
        .sum::<f64>();
    (v, math::sqrt(res))
}

// Gaussian elimination with partial pivoting on (T − shift I) x = rhs.
fn solve_shifted(t: &TridiagMatrix, shift: f64, rhs: &[f64]) -> Vec<f64> {
    let n = t.len();
    let tiny = f64::EPSILON * t.norm_bound().max(f64::MIN_POSITIVE);
    let mut dl = t.off().to_vec();
    let mut d: Vec<f64> = t.diag().iter().map(|x| x - shift).collect();
    let mut du = t.off().to_vec();
    let mut du2 = alloc::vec![0.0; n.saturating_sub(2)];
    let mut b = rhs.to_vec();
    for i in 0..n - 1 {
        if d[i].abs() >= dl[i].abs() {
            if d[i] == 0.0 {
                d[i] = tiny;
            }
            let f = dl[i] / d[i];
            d[i + 1] -= f * du[i];
            b[i + 1] -= f * b[i];
        } else {
            let f = d[i] / dl[i];
            d[i] = dl[i];
            let tmp = d[i + 1];
            d[i + 1] = du[i] - f * tmp;
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] = -f * du2[i];
            }
            du[i] = tmp;
            b.swap(i, i + 1);
            b[i + 1] -= f * b[i];
        }
        dl[i] = 0.0;
    }
    if d[n - 1] == 0.0 {
        d[n - 1] = tiny;
    }
    let mut x = alloc::vec![0.0; n];
    for i in (0..n).rev() {
        let mut v = b[i];
        if i + 1 < n {
            v -= du[i] * x[i + 1];
        }
        if i + 2 < n {
            v -= du2[i] * x[i + 2];
        }
        x[i] = v / d[i];
    }
    x
}
