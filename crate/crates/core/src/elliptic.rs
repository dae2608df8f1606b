//! Jacobi `cn` and the complete elliptic integral of the first kind.
//!
//! Both take the elliptic **modulus** `k`, never the parameter `m = k²`.
//! Mathematica's `JacobiCN[u, m]` uses the parameter, so `cn(u, k)` here equals
//! `JacobiCN[u, k^2]` there ("cn_k in [Wa] is equivalent to cn_{k²} in
//! Mathematica").

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const AGM_TOL: f64 = 1e-15;
const AGM_MAX_ITER: usize = 40;

/// Elliptic modulus `0 ≤ k < 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Modulus(f64);

impl Modulus {
    pub fn new(k: f64) -> Result<Self> {
        if !k.is_finite() || !(0.0..1.0).contains(&k) {
            return Err(Error::Domain(format!(
                "elliptic modulus must satisfy 0 <= k < 1, got {k}"
            )));
        }
        Ok(Modulus(k))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Complementary modulus `k' = √(1 - k²)`.
    pub fn complement(self) -> f64 {
        ((1.0 - self.0) * (1.0 + self.0)).sqrt()
    }
}

/// Complete elliptic integral of the first kind,
/// `K(k) = ∫₀^{π/2} dφ / √(1 - k² sin² φ)`, via `K = π / (2 AGM(1, k'))`.
pub fn elliptic_k(k: Modulus) -> f64 {
    let mut a = 1.0;
    let mut b = k.complement();
    for _ in 0..AGM_MAX_ITER {
        if (a - b).abs() <= AGM_TOL * a {
            break;
        }
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
    }
    PI / (a + b)
}

/// `cn(u, k)`; builds the Landen ladder on every call. Use [`JacobiCn`] when
/// evaluating many points at one modulus.
pub fn jacobi_cn(u: f64, k: Modulus) -> Result<f64> {
    if !u.is_finite() {
        return Err(Error::Domain(format!(
            "cn argument must be finite, got {u}"
        )));
    }
    Ok(JacobiCn::new(k).cn(u))
}

/// Precomputed descending Landen (AGM) ladder for one modulus.
///
/// Evaluation follows the classical scheme: run the AGM of `(1, k')` to
/// convergence at step `N`, set `φ_N = 2^N a_N u`, then walk back with
/// `φ_{j-1} = (φ_j + asin((c_j / a_j) sin φ_j)) / 2`; `cn = cos φ_0`.
#[derive(Debug, Clone)]
pub struct JacobiCn {
    k: Modulus,
    /// `c_j / a_j` for `j = 1..=N`.
    ratios: Vec<f64>,
    /// `2^N a_N`.
    scale: f64,
    quarter_period: f64,
}

impl JacobiCn {
    pub fn new(k: Modulus) -> Self {
        let mut a = 1.0;
        let mut b = k.complement();
        let mut c = k.value();
        let mut ratios = Vec::new();
        let mut pow2 = 1.0;
        while c.abs() > AGM_TOL * a && ratios.len() < AGM_MAX_ITER {
            let an = 0.5 * (a + b);
            let bn = (a * b).sqrt();
            c = 0.5 * (a - b);
            a = an;
            b = bn;
            pow2 *= 2.0;
            ratios.push(c / a);
        }
        JacobiCn {
            k,
            ratios,
            scale: pow2 * a,
            quarter_period: FRAC_PI_2 / a,
        }
    }

    pub fn modulus(&self) -> Modulus {
        self.k
    }

    /// `K(k)`, consistent with the ladder used for evaluation.
    pub fn quarter_period(&self) -> f64 {
        self.quarter_period
    }

    /// Amplitude `φ = am(u, k)` of the argument reduced to `[-2K, 2K]`.
    fn amplitude(&self, u: f64) -> f64 {
        let period = 4.0 * self.quarter_period;
        let reduced = u - period * (u / period).round();
        let mut phi = self.scale * reduced;
        for &r in self.ratios.iter().rev() {
            phi = 0.5 * (phi + (r * phi.sin()).asin());
        }
        phi
    }

    pub fn cn(&self, u: f64) -> f64 {
        self.amplitude(u).cos()
    }

    #[cfg(test)]
    fn sn_cn(&self, u: f64) -> (f64, f64) {
        self.amplitude(u).sin_cos()
    }
}
