//! Fourier–Galerkin discretisation of `L = -Δ - V` on the full flat
//! eigenbasis up to a box cutoff, used to count negative directions
//! independently of the 9×9 matrices.
//!
//! `V` has periods `x_len/2`, `y_len/2` and is even about every quarter-period
//! line, so `∫ V cos(k·r)` over a fundamental domain vanishes unless
//! `k = (4πj/x_len, 4πk/y_len)`, and all sine moments vanish. Each entry is
//! then a combination of the moments
//! `G(j, k) = ∫₀^{x/4}∫₀^{y/4} V cos(4πjx/x_len) cos(4πky/y_len)`,
//! computed once per `(j, k)`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigenvalues, SymMatrix};
use crate::operator::{default_integral_config, PotentialContext};
use crate::params::{Fraction, WenteSurface};
use crate::quadrature::{integrate_2d_with_breaks, QuadratureConfig};
use crate::spectrum::{flat_eigenpairs, FlatEigenpair, Parity};

/// Relative threshold below which a Galerkin eigenvalue counts as negative.
pub const NEGATIVE_REL_THRESHOLD: f64 = 1e-8;

pub const DEFAULT_CUTOFF: u32 = 6;

#[derive(Debug, Clone)]
pub struct GalerkinProblem {
    pub frac: Fraction,
    pub surface: WenteSurface,
    pub cutoff: u32,
    pub basis: Vec<FlatEigenpair>,
    pub matrix: SymMatrix,
}

impl GalerkinProblem {
    pub fn eigenvalues(&self) -> Vec<f64> {
        symmetric_eigenvalues(&self.matrix)
    }

    /// Position of `e` in the basis and the sign relating the two
    /// (`basis[i] = sign · e`).
    pub fn locate(&self, e: &FlatEigenpair) -> Option<(usize, f64)> {
        let tol = 1e-12;
        self.basis
            .iter()
            .position(|b| b.same_function(e, tol))
            .map(|i| {
                let b = &self.basis[i];
                let flipped = (b.phase_coeffs.0 - e.phase_coeffs.0).abs() > tol
                    || (b.phase_coeffs.1 - e.phase_coeffs.1).abs() > tol;
                let sign = if flipped && b.parity == Parity::Sin {
                    -1.0
                } else {
                    1.0
                };
                (i, sign)
            })
    }
}

/// Integer wavenumbers `(p, q)`: the function oscillates as
/// `2π(p x/(n x_len) + q y/y_len)`.
pub fn wavenumbers(frac: Fraction, e: &FlatEigenpair) -> (i64, i64) {
    let (m1, m2) = (i64::from(e.m1), i64::from(e.m2));
    if frac.ell_is_odd() {
        (m2, m1)
    } else {
        (2 * m2 - m1, m1)
    }
}

/// `(j, k)` if the frequency `(dp, dq)` is one `V` can see.
fn moment_index(n: i64, dp: i64, dq: i64) -> Option<(u32, u32)> {
    if dp % (2 * n) == 0 && dq % 2 == 0 {
        Some((
            (dp / (2 * n)).unsigned_abs() as u32,
            (dq / 2).unsigned_abs() as u32,
        ))
    } else {
        None
    }
}

fn pair_terms(
    frac: Fraction,
    a: &FlatEigenpair,
    b: &FlatEigenpair,
) -> [(Option<(u32, u32)>, f64); 2] {
    let n = i64::from(frac.n());
    let (pa, qa) = wavenumbers(frac, a);
    let (pb, qb) = wavenumbers(frac, b);
    let sum_sign = match (a.parity, b.parity) {
        (Parity::Cos, Parity::Cos) => 1.0,
        (Parity::Sin, Parity::Sin) => -1.0,
        _ => 0.0,
    };
    if sum_sign == 0.0 {
        return [(None, 0.0), (None, 0.0)];
    }
    [
        (moment_index(n, pa - pb, qa - qb), 0.5),
        (moment_index(n, pa + pb, qa + qb), 0.5 * sum_sign),
    ]
}

/// `G(j, k)` for the potential in `ctx`.
pub fn potential_moment(
    ctx: &PotentialContext,
    j: u32,
    k: u32,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let (xl, yl) = (ctx.x_len, ctx.y_len);
    let (wx, wy) = (4.0 * PI * j as f64 / xl, 4.0 * PI * k as f64 / yl);
    let split = |len: f64, m: u32| -> Vec<f64> {
        let m = m.max(1);
        (0..=m).map(|i| 0.25 * len * i as f64 / m as f64).collect()
    };
    Ok(integrate_2d_with_breaks(
        |x, y| ctx.potential(x, y) * (wx * x).cos() * (wy * y).cos(),
        &split(xl, j),
        &split(yl, k),
        cfg,
    )?
    .value)
}

/// Galerkin matrix from an arbitrary moment function `G(j, k)`.
pub fn build_galerkin_with_moments<G>(
    surface: &WenteSurface,
    cutoff: u32,
    moment: G,
) -> Result<GalerkinProblem>
where
    G: Fn(u32, u32) -> Result<f64> + Sync,
{
    if cutoff == 0 {
        return Err(Error::Domain("Galerkin cutoff must be positive".into()));
    }
    let frac = surface.frac;
    let basis = flat_eigenpairs(&surface.lattice, cutoff);
    let dim = basis.len();

    let mut needed = BTreeMap::new();
    for i in 0..dim {
        for j in i..dim {
            for (idx, _) in pair_terms(frac, &basis[i], &basis[j]) {
                if let Some(key) = idx {
                    needed.insert(key, 0.0);
                }
            }
        }
    }
    let keys: Vec<(u32, u32)> = needed.keys().copied().collect();
    let values: Vec<f64> = keys
        .par_iter()
        .map(|&(j, k)| moment(j, k))
        .collect::<Result<_>>()?;
    let scale = 16.0 * surface.lattice.area / (surface.x_len * surface.y_len);
    let cos_moment: BTreeMap<(u32, u32), f64> = keys
        .into_iter()
        .zip(values)
        .map(|(key, g)| (key, scale * g))
        .collect();

    let matrix = SymMatrix::from_upper(dim, |i, j| {
        let (a, b) = (&basis[i], &basis[j]);
        let integral: f64 = pair_terms(frac, a, b)
            .iter()
            .filter_map(|&(idx, w)| idx.map(|key| w * cos_moment[&key]))
            .sum();
        let b_ij = a.norm_const * b.norm_const * integral;
        if i == j {
            a.alpha - b_ij
        } else {
            -b_ij
        }
    });
    Ok(GalerkinProblem {
        frac,
        surface: *surface,
        cutoff,
        basis,
        matrix,
    })
}

pub fn build_galerkin(
    ctx: &PotentialContext,
    surface: &WenteSurface,
    cutoff: u32,
    cfg: &QuadratureConfig,
) -> Result<GalerkinProblem> {
    cfg.validate()?;
    build_galerkin_with_moments(surface, cutoff, |j, k| potential_moment(ctx, j, k, cfg))
}

/// Eigenvalues below `-1e-8 · max|entry|`.
pub fn negative_count(problem: &GalerkinProblem) -> usize {
    let cut = -NEGATIVE_REL_THRESHOLD * problem.matrix.max_norm();
    problem.eigenvalues().iter().filter(|&&e| e < cut).count()
}

fn count_at(frac: Fraction, theta: f64, h: f64, cutoff: u32) -> Result<usize> {
    let s = WenteSurface::from_theta(frac, theta, h)?;
    let ctx = PotentialContext::new(&s)?;
    Ok(negative_count(&build_galerkin(
        &ctx,
        &s,
        cutoff,
        &default_integral_config(),
    )?))
}

/// Whether the negative count agrees at mean curvatures `h1` and `h2`.
pub fn h_invariance_between(frac: Fraction, cutoff: u32, h1: f64, h2: f64) -> Result<bool> {
    // The period condition for θ does not involve H.
    let theta = crate::params::solve_theta(frac, h1)?;
    Ok(count_at(frac, theta, h1, cutoff)? == count_at(frac, theta, h2, cutoff)?)
}

/// Negative count at `H = 1/2` equals the count at `H = 1`.
pub fn h_invariance_check(frac: Fraction, cutoff: u32) -> Result<bool> {
    h_invariance_between(frac, cutoff, 0.5, 1.0)
}
