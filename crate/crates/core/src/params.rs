//! Torus parameters: admissible fractions, the period problem for `θ`, the
//! derived Walter parameters, period lengths and the conformal lattice.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::elliptic::{elliptic_k, Modulus};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_1d, QuadratureConfig};
use crate::roots::brent;

/// Published value of `θ̄` in degrees. Its own period equation is not solved here.
pub const THETA_BAR_DEG: f64 = 65.354955;

/// Distance kept from the ends of `(0, π/2 - θ̄)` when bracketing `θ`.
pub const THETA_BRACKET_EPS: f64 = 1e-6;

/// Convergence tolerance on `θ` (radians).
pub const THETA_XTOL: f64 = 1e-12;

/// Tolerances for the period integral; far tighter than the default so the
/// solved `θ` is limited by the root finder, not by quadrature noise.
pub const PERIOD_QUADRATURE: QuadratureConfig = QuadratureConfig {
    abs_tol: 1e-14,
    rel_tol: 1e-13,
    max_subdivisions: 100_000,
};

/// `θ̄` in radians.
pub fn theta_bar_constant() -> f64 {
    THETA_BAR_DEG.to_radians()
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Reduced fraction `ℓ/n` with `1 < ℓ/n < 2`, labelling the torus `W_{ℓ/n}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "FractionRepr", into = "FractionRepr")]
pub struct Fraction {
    ell: u32,
    n: u32,
}

#[derive(Serialize, Deserialize)]
struct FractionRepr {
    ell: u32,
    n: u32,
}

impl TryFrom<FractionRepr> for Fraction {
    type Error = Error;
    fn try_from(r: FractionRepr) -> Result<Self> {
        Fraction::new(r.ell, r.n)
    }
}

impl From<Fraction> for FractionRepr {
    fn from(f: Fraction) -> Self {
        FractionRepr { ell: f.ell, n: f.n }
    }
}

impl Fraction {
    pub fn new(ell: u32, n: u32) -> Result<Self> {
        if n == 0 || ell == 0 {
            return Err(Error::Domain(format!(
                "{ell}/{n}: numerator and denominator must be positive"
            )));
        }
        if gcd(ell, n) != 1 {
            return Err(Error::Domain(format!("{ell}/{n} is not reduced")));
        }
        if !(ell > n && ell < 2 * n) {
            return Err(Error::Domain(format!("{ell}/{n} is not in (1, 2)")));
        }
        Ok(Fraction { ell, n })
    }

    pub fn ell(self) -> u32 {
        self.ell
    }

    pub fn n(self) -> u32 {
        self.n
    }

    pub fn ell_is_odd(self) -> bool {
        self.ell % 2 == 1
    }

    pub fn ratio(self) -> f64 {
        self.ell as f64 / self.n as f64
    }

    /// `(n, ℓ)` — the ordering used for every report.
    pub fn sort_key(self) -> (u32, u32) {
        (self.n, self.ell)
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.ell, self.n)
    }
}

impl FromStr for Fraction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (l, n) = s
            .split_once('/')
            .ok_or_else(|| Error::Domain(format!("expected ℓ/n, got {s:?}")))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| Error::Domain(format!("expected ℓ/n, got {s:?}")))
        };
        Fraction::new(parse(l)?, parse(n)?)
    }
}

/// Walter's parameter pack for one torus at mean curvature `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WenteParams {
    pub theta: f64,
    pub theta_bar: f64,
    pub h: f64,
    pub k: Modulus,
    pub k_bar: Modulus,
    pub gamma: f64,
    pub gamma_bar: f64,
    /// Frequency scale of `cn_k(αx)`.
    pub alpha: f64,
    /// Frequency scale of `cn_k̄(ᾱy)`.
    pub alpha_bar: f64,
}

impl WenteParams {
    pub fn new(theta: f64, theta_bar: f64, h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Domain(format!(
                "mean curvature must be positive, got {h}"
            )));
        }
        if !(theta > 0.0 && theta_bar > 0.0 && theta + theta_bar < FRAC_PI_2) {
            return Err(Error::Domain(format!(
                "need 0 < θ, θ̄ and θ + θ̄ < π/2 (θ = {theta}, θ̄ = {theta_bar})"
            )));
        }
        let product = theta.tan() * theta_bar.tan();
        if product >= 1.0 {
            return Err(Error::Domain(format!("tan θ tan θ̄ = {product} >= 1")));
        }
        let denom = (2.0 * (theta + theta_bar)).sin();
        Ok(WenteParams {
            theta,
            theta_bar,
            h,
            k: Modulus::new(theta.sin())?,
            k_bar: Modulus::new(theta_bar.sin())?,
            gamma: theta.tan().sqrt(),
            gamma_bar: theta_bar.tan().sqrt(),
            alpha: (4.0 * h * (2.0 * theta_bar).sin() / denom).sqrt(),
            alpha_bar: (4.0 * h * (2.0 * theta).sin() / denom).sqrt(),
        })
    }
}

/// Fundamental lattice `Γ = span_Z{v1, v2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub v1: (f64, f64),
    pub v2: (f64, f64),
    pub area: f64,
}

impl Lattice {
    pub fn new(v1: (f64, f64), v2: (f64, f64)) -> Result<Self> {
        let area = v1.0 * v2.1 - v1.1 * v2.0;
        if !(area > 0.0) {
            return Err(Error::Domain(format!(
                "lattice basis has non-positive area {area}"
            )));
        }
        Ok(Lattice { v1, v2, area })
    }
}

fn check_theta_domain(theta: f64, theta_bar: f64) -> Result<f64> {
    let product = theta.tan() * theta_bar.tan();
    if !(theta > 0.0) || product >= 1.0 || !product.is_finite() {
        return Err(Error::Domain(format!(
            "θ = {theta} outside (0, π/2 - θ̄): tan θ tan θ̄ = {product}"
        )));
    }
    Ok(product)
}

/// LHS − RHS of the period condition for `θ` at ratio `ℓ/n`.
pub fn period_residual_for_ratio(theta: f64, ratio: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let theta_bar = theta_bar_constant();
    let t = check_theta_domain(theta, theta_bar)?;
    let s2 = theta.sin().powi(2);
    let one_minus_t = 1.0 - t;
    let integrand = |phi: f64| {
        let (sin, cos) = phi.sin_cos();
        // 1 - t cos²φ written without cancellation near t = 1.
        let denom = one_minus_t + t * sin * sin;
        (1.0 + t * cos * cos) / denom / (1.0 - s2 * sin * sin).sqrt()
    };
    let lhs = integrate_1d(integrand, 0.0, FRAC_PI_2, cfg)?.value;
    let rhs =
        ratio * FRAC_PI_2 * ((2.0 * theta_bar).sin() / (2.0 * (theta + theta_bar)).sin()).sqrt();
    Ok(lhs - rhs)
}

/// Period residual for `W_{ℓ/n}`. The condition does not involve `h`; it is
/// accepted (and validated) so every stage shares one signature.
pub fn period_residual(theta: f64, frac: Fraction, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::Domain(format!(
            "mean curvature must be positive, got {h}"
        )));
    }
    period_residual_for_ratio(theta, frac.ratio(), &PERIOD_QUADRATURE)
}

/// Root of the period residual for an arbitrary ratio; fails with
/// [`Error::NoRoot`] when the ratio admits no torus.
pub fn solve_theta_for_ratio(ratio: f64) -> Result<f64> {
    solve_theta_for_ratio_with(ratio, THETA_XTOL)
}

/// As [`solve_theta_for_ratio`] with an explicit tolerance on `θ`.
pub fn solve_theta_for_ratio_with(ratio: f64, xtol: f64) -> Result<f64> {
    if !(xtol > 0.0) {
        return Err(Error::Config(format!(
            "θ tolerance must be positive, got {xtol}"
        )));
    }
    let lo = THETA_BRACKET_EPS;
    let hi = FRAC_PI_2 - theta_bar_constant() - THETA_BRACKET_EPS;
    brent(
        |theta| period_residual_for_ratio(theta, ratio, &PERIOD_QUADRATURE),
        lo,
        hi,
        xtol,
    )
}

pub fn solve_theta(frac: Fraction, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::Domain(format!(
            "mean curvature must be positive, got {h}"
        )));
    }
    solve_theta_for_ratio(frac.ratio())
}

/// Periods `(x_ℓn, y_ℓn)` of `cn_k(αx)` and `cn_k̄(ᾱy)`.
pub fn periods(params: &WenteParams) -> (f64, f64) {
    (
        4.0 / params.alpha * elliptic_k(params.k),
        4.0 / params.alpha_bar * elliptic_k(params.k_bar),
    )
}

/// Conformal lattice: rectangular for odd `ℓ`, sheared by half periods for even `ℓ`.
pub fn lattice(frac: Fraction, x_len: f64, y_len: f64) -> Result<Lattice> {
    if !(x_len > 0.0 && y_len > 0.0) {
        return Err(Error::Domain("period lengths must be positive".into()));
    }
    let n = frac.n() as f64;
    if frac.ell_is_odd() {
        Lattice::new((n * x_len, 0.0), (0.0, y_len))
    } else {
        Lattice::new((0.5 * n * x_len, 0.5 * y_len), (0.0, y_len))
    }
}

/// All reduced `ℓ/n ∈ (1, 2)` with `n ≤ n_max`, sorted by `(n, ℓ)`.
pub fn enumerate_fractions(n_max: u32) -> Vec<Fraction> {
    let mut out = Vec::new();
    for n in 2..=n_max {
        for ell in n + 1..2 * n {
            if let Ok(f) = Fraction::new(ell, n) {
                out.push(f);
            }
        }
    }
    out
}

/// Everything the downstream stages need about one torus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WenteSurface {
    pub frac: Fraction,
    pub params: WenteParams,
    pub x_len: f64,
    pub y_len: f64,
    pub lattice: Lattice,
}

impl WenteSurface {
    pub fn solve(frac: Fraction, h: f64) -> Result<Self> {
        Self::solve_with(frac, h, THETA_XTOL)
    }

    pub fn solve_with(frac: Fraction, h: f64, theta_xtol: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::Domain(format!(
                "mean curvature must be positive, got {h}"
            )));
        }
        let theta = solve_theta_for_ratio_with(frac.ratio(), theta_xtol)?;
        Self::from_theta(frac, theta, h)
    }

    /// Builds the surface from an already known `θ` (e.g. to rescale `h`
    /// without re-solving the period problem, which is `h`-independent).
    pub fn from_theta(frac: Fraction, theta: f64, h: f64) -> Result<Self> {
        let params = WenteParams::new(theta, theta_bar_constant(), h)?;
        let (x_len, y_len) = periods(&params);
        Ok(WenteSurface {
            frac,
            params,
            x_len,
            y_len,
            lattice: lattice(frac, x_len, y_len)?,
        })
    }

    pub fn h(&self) -> f64 {
        self.params.h
    }

    pub fn theta_deg(&self) -> f64 {
        self.params.theta * 180.0 / PI
    }
}
