//! Tridiagonal representation of the wave operator.
//!
//! The basis is `φ_n = A_n (1+y)^{ν/2} (1−y)^{μ/2} P_n^{(μ,ν)}(y)` with
//! `y = tanh ξ`; it is orthonormal with weight `(1 − y²)`. For the
//! short-range potential `μ² = ν² = −ε`, giving two branches:
//!
//! * [`Branch::Plus`] (`ν = +μ`): `a_n = (n+μ)(n+μ+1)`,
//!   `b_n = ½√[(n+1)(n+2μ+1) / ((n+μ+½)(n+μ+3/2))]`;
//! * [`Branch::Minus`] (`ν = −μ`, `−1 < μ < 1`): `a_n = n(n+1)`,
//!   `b_n = ½√[((n+1)² − μ²) / ((n+½)(n+3/2))]`.
//!
//! Dividing the three-term recursion by `√(a_n a_{n+1})` turns it into the
//! symmetric eigenproblem `T_γ g = −C⁻¹ g` with `A_n = γ/a_n` and
//! `B_n = b_n/√(a_n a_{n+1})`.

use alloc::vec::Vec;

use crate::error::{domain, Error, Result};
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// `ν = +μ`.
    Plus,
    /// `ν = −μ`; requires `−1 < μ < 1`.
    Minus,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
        }
    }

    /// First basis index kept in `T_γ` (the minus branch has `a_0 = 0`).
    pub fn first_row(self) -> usize {
        match self {
            Branch::Plus => 0,
            Branch::Minus => 1,
        }
    }

    fn check_mu(self, mu: f64) -> Result<()> {
        let ok = match self {
            Branch::Plus => mu > -0.5 && mu.is_finite(),
            Branch::Minus => mu > -1.0 && mu < 1.0,
        };
        if ok {
            Ok(())
        } else {
            Err(domain!("mu = {mu} outside the {} branch domain", self.name()))
        }
    }
}

/// Basis parameters; `α = ν/2`, `β = μ/2` are the exponents of `(1+y)` and
/// `(1−y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisSpec {
    pub mu: f64,
    pub nu: f64,
    pub branch: Branch,
}

impl BasisSpec {
    pub fn new(mu: f64, branch: Branch) -> Result<Self> {
        branch.check_mu(mu)?;
        let nu = match branch {
            Branch::Plus => mu,
            Branch::Minus => -mu,
        };
        Ok(BasisSpec { mu, nu, branch })
    }

    /// Basis tied to a bound-state energy through `μ = √(−ε)`.
    pub fn for_energy(epsilon: f64, branch: Branch) -> Result<Self> {
        if !(epsilon < 0.0) {
            return Err(domain!("bound-state basis needs epsilon < 0, got {epsilon}"));
        }
        Self::new(math::sqrt(-epsilon), branch)
    }

    pub fn alpha(&self) -> f64 {
        self.nu / 2.0
    }

    pub fn beta(&self) -> f64 {
        self.mu / 2.0
    }
}

/// `(a_n, b_n)` of the three-term recursion `−γ f_n = C⁻¹ a_n f_n + b_{n−1} f_{n−1} + b_n f_{n+1}`.
pub fn recursion_coeffs(branch: Branch, mu: f64, n: usize) -> Result<(f64, f64)> {
    branch.check_mu(mu)?;
    let nf = n as f64;
    let (a, num, den) = match branch {
        Branch::Plus => (
            (nf + mu) * (nf + mu + 1.0),
            (nf + 1.0) * (nf + 2.0 * mu + 1.0),
            (nf + mu + 0.5) * (nf + mu + 1.5),
        ),
        Branch::Minus => (
            nf * (nf + 1.0),
            (nf + 1.0 - mu) * (nf + 1.0 + mu),
            (nf + 0.5) * (nf + 1.5),
        ),
    };
    let arg = num / den;
    if !(arg > 0.0) || !arg.is_finite() {
        return Err(domain!(
            "b_{n} radicand {arg} is not positive: mu = {mu} outside the {} branch domain",
            branch.name()
        ));
    }
    Ok((a, 0.5 * math::sqrt(arg)))
}

/// `⟨n|y|m⟩ = ⟨φ_n|(1−y²) y|φ_m⟩` for general `(μ, ν)`.
pub fn y_matrix_element(mu: f64, nu: f64, n: usize, m: usize) -> f64 {
    let s = mu + nu;
    if n == m {
        let nf = n as f64;
        if n == 0 {
            // (ν²−μ²)/(s(s+2)) with the common factor s cancelled
            return (nu - mu) / (s + 2.0);
        }
        return (nu * nu - mu * mu) / ((2.0 * nf + s) * (2.0 * nf + s + 2.0));
    }
    let (hi, lo) = if n > m { (n, m) } else { (m, n) };
    if hi - lo != 1 {
        return 0.0;
    }
    // element (lo, lo+1), written with k = lo
    let k = lo as f64;
    let t = 2.0 * k + s;
    let radicand = (k + 1.0) * (k + mu + 1.0) * (k + nu + 1.0) * (k + s + 1.0)
        / ((t + 1.0) * (t + 3.0));
    2.0 / (t + 2.0) * math::sqrt(radicand)
}

/// `J_nm = [γC + (n + s/2)(n + s/2 + 1)] δ_nm + C ⟨n|y|m⟩`, `s = μ + ν`.
pub fn j_matrix_element(n: usize, m: usize, c: f64, gamma: f64, mu: f64, nu: f64) -> f64 {
    let diag = if n == m {
        let h = n as f64 + 0.5 * (mu + nu);
        gamma * c + h * (h + 1.0)
    } else {
        0.0
    };
    diag + c * y_matrix_element(mu, nu, n, m)
}

/// Symmetric tridiagonal matrix stored as its diagonal and one off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagMatrix {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl TridiagMatrix {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(domain!(
                "tridiagonal shape mismatch: {} diagonal vs {} off-diagonal entries",
                diag.len(),
                off.len()
            ));
        }
        if diag.iter().chain(off.iter()).any(|v| !v.is_finite()) {
            return Err(domain!("tridiagonal matrix has non-finite entries"));
        }
        Ok(TridiagMatrix { diag, off })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    /// Gershgorin interval containing every eigenvalue.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// Upper bound on the spectral norm.
    pub fn norm_bound(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs())
    }

    /// `y = T x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut v = self.diag[i] * x[i];
                if i > 0 {
                    v += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    v += self.off[i] * x[i + 1];
                }
                v
            })
            .collect()
    }
}

/// `T_γ` truncated to `n` rows: `diag = γ/a_k`, `off = b_k/√(a_k a_{k+1})`.
///
/// The plus branch starts at `k = 0` and needs `μ > 0`; the minus branch
/// starts at `k = 1` because `a_0 = 0` identically.
pub fn build_t_gamma(gamma: f64, mu: f64, branch: Branch, n: usize) -> Result<TridiagMatrix> {
    if n < 2 {
        return Err(domain!("truncation must be at least 2, got {n}"));
    }
    if !gamma.is_finite() {
        return Err(domain!("gamma must be finite"));
    }
    branch.check_mu(mu)?;
    let first = branch.first_row();
    let mut a = Vec::with_capacity(n + 1);
    let mut b = Vec::with_capacity(n);
    for k in first..first + n + 1 {
        let (ak, bk) = recursion_coeffs(branch, mu, k)?;
        if !(ak > 0.0) {
            return Err(Error::DegenerateBasis { index: k });
        }
        a.push(ak);
        b.push(bk);
    }
    let diag = (0..n).map(|i| gamma / a[i]).collect();
    let off = (0..n - 1)
        .map(|i| b[i] / math::sqrt(a[i] * a[i + 1]))
        .collect();
    TridiagMatrix::new(diag, off)
}
