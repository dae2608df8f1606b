//! The Jacobi operator `L = -Δ - V`: its potential, the basic integrals the
//! closed-form matrix entries are built from, both assembly paths for the
//! 9×9 matrices `M(ℓ,n)`, and the definiteness test.

use std::collections::BTreeMap;
use std::f64::consts::{PI, SQRT_2};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::elliptic::JacobiCn;
use crate::error::{Error, Result};
use crate::linalg::{cholesky, symmetric_eigenvalues, SymMatrix};
use crate::params::{Fraction, Lattice, WenteParams, WenteSurface};
use crate::quadrature::{integrate_2d_many, integrate_2d_with_breaks, QuadratureConfig};
use crate::spectrum::Table1Basis;

/// Largest admissible `|γγ̄ cn cn|`, the argument of `artanh`.
const ARTANH_LIMIT: f64 = 1.0 - 1e-12;

/// Everything needed to evaluate `F` and `V = 4H cosh F` on one torus.
#[derive(Debug, Clone)]
pub struct PotentialContext {
    pub params: WenteParams,
    pub x_len: f64,
    pub y_len: f64,
    pub lat: Lattice,
    cn_x: JacobiCn,
    cn_y: JacobiCn,
    gamma_prod: f64,
}

impl PotentialContext {
    pub fn new(surface: &WenteSurface) -> Result<Self> {
        let p = surface.params;
        let gamma_prod = p.gamma * p.gamma_bar;
        if !(gamma_prod < ARTANH_LIMIT) {
            return Err(Error::Domain(format!(
                "γγ̄ = {gamma_prod} leaves the domain of artanh"
            )));
        }
        Ok(PotentialContext {
            params: p,
            x_len: surface.x_len,
            y_len: surface.y_len,
            lat: surface.lattice,
            cn_x: JacobiCn::new(p.k),
            cn_y: JacobiCn::new(p.k_bar),
            gamma_prod,
        })
    }

    pub fn h(&self) -> f64 {
        self.params.h
    }

    /// `tanh(F/4)`.
    fn tanh_quarter(&self, x: f64, y: f64) -> f64 {
        self.gamma_prod
            * self.cn_x.cn(self.params.alpha * x)
            * self.cn_y.cn(self.params.alpha_bar * y)
    }

    pub fn eval_f(&self, x: f64, y: f64) -> Result<f64> {
        if !(x.is_finite() && y.is_finite()) {
            return Err(Error::Domain(format!("non-finite point ({x}, {y})")));
        }
        let t = self.tanh_quarter(x, y);
        if t.abs() >= ARTANH_LIMIT {
            return Err(Error::Domain(format!("artanh argument {t} at ({x}, {y})")));
        }
        Ok(4.0 * t.atanh())
    }

    pub fn eval_v(&self, x: f64, y: f64) -> Result<f64> {
        self.eval_f(x, y)?;
        Ok(self.potential(x, y))
    }

    /// `V` without argument checks, for use inside quadrature. With
    /// `t = tanh(F/4)`, `cosh(F/2) = (1 + t²)/(1 - t²)` and
    /// `cosh F = 2 cosh²(F/2) - 1`.
    pub fn potential(&self, x: f64, y: f64) -> f64 {
        let t2 = self.tanh_quarter(x, y).powi(2);
        let c = (1.0 + t2) / (1.0 - t2);
        4.0 * self.params.h * (2.0 * c * c - 1.0)
    }

    /// Largest `|V(p + v) - V(p)|` over a fixed set of sample points `p` and
    /// both lattice generators `v`.
    pub fn lattice_periodicity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..7 {
            for j in 0..5 {
                let x = self.x_len * (0.13 + 0.37 * i as f64);
                let y = self.y_len * (0.07 + 0.29 * j as f64);
                let v = self.potential(x, y);
                for (dx, dy) in [self.lat.v1, self.lat.v2] {
                    worst = worst.max((self.potential(x + dx, y + dy) - v).abs());
                }
            }
        }
        worst
    }
}

/// Names of the basic integrals. `I0 { a, b }` carries the even cosine powers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum IntegralLabel {
    I0 { a: u32, b: u32 },
    I1,
    I2,
    I3,
    I4,
    I5,
    I6,
    I7,
}

impl fmt::Display for IntegralLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntegralLabel::I0 { a, b } => write!(f, "I0({a},{b})"),
            IntegralLabel::I1 => f.write_str("I1"),
            IntegralLabel::I2 => f.write_str("I2"),
            IntegralLabel::I3 => f.write_str("I3"),
            IntegralLabel::I4 => f.write_str("I4"),
            IntegralLabel::I5 => f.write_str("I5"),
            IntegralLabel::I6 => f.write_str("I6"),
            IntegralLabel::I7 => f.write_str("I7"),
        }
    }
}

const fn i0(a: u32, b: u32) -> IntegralLabel {
    IntegralLabel::I0 { a, b }
}

/// Computed basic integrals for one torus.
#[derive(Debug, Clone, PartialEq)]
pub struct BasicIntegralTable {
    pub frac: Fraction,
    values: BTreeMap<IntegralLabel, f64>,
    errors: BTreeMap<IntegralLabel, f64>,
}

impl BasicIntegralTable {
    pub fn from_values(
        frac: Fraction,
        values: impl IntoIterator<Item = (IntegralLabel, f64)>,
    ) -> Self {
        let values: BTreeMap<_, _> = values.into_iter().collect();
        let errors = values.keys().map(|&l| (l, 0.0)).collect();
        BasicIntegralTable {
            frac,
            values,
            errors,
        }
    }

    pub fn get(&self, label: IntegralLabel) -> Result<f64> {
        self.values
            .get(&label)
            .copied()
            .ok_or(Error::MissingIntegral(label))
    }

    /// Quadrature error estimate for `label` (0 for values supplied directly).
    pub fn error(&self, label: IntegralLabel) -> Option<f64> {
        self.errors.get(&label).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (IntegralLabel, f64)> + '_ {
        self.values.iter().map(|(&l, &v)| (l, v))
    }
}

/// The eight tori left after both cheap bounds, sorted by `(n, ℓ)`.
pub const CANDIDATES: [(u32, u32); 8] = [
    (3, 2),
    (4, 3),
    (5, 3),
    (7, 4),
    (8, 5),
    (12, 7),
    (14, 9),
    (16, 9),
];

fn is_family(frac: Fraction) -> bool {
    matches!((frac.ell(), frac.n()), (8, 5) | (12, 7) | (14, 9) | (16, 9))
}

/// Basic integrals referenced by the closed-form entries for `frac`.
pub fn required_integrals(frac: Fraction) -> Result<Vec<IntegralLabel>> {
    use IntegralLabel::*;
    let v = match (frac.ell(), frac.n()) {
        (3, 2) => vec![i0(0, 0), i0(0, 2), i0(2, 0), i0(2, 2)],
        (4, 3) => vec![i0(0, 0), i0(0, 2), i0(0, 4), I1, I2, I4],
        (5, 3) => vec![i0(0, 0), i0(0, 2), i0(2, 0), I1, I2, I4],
        (7, 4) => vec![i0(0, 0)],
        _ if is_family(frac) => vec![i0(0, 0), I1, I2, I3, I4, I5, I6, I7],
        _ => return Err(Error::UnknownSurface(frac)),
    };
    Ok(v)
}

/// Indices into the 17-function table spanning the 9-dimensional space for
/// `frac`.
pub fn table3_selection(frac: Fraction) -> Result<[usize; 9]> {
    match (frac.ell(), frac.n()) {
        (3, 2) => Ok([1, 2, 3, 4, 5, 7, 8, 9, 17]),
        (4, 3) => Ok([1, 2, 3, 4, 5, 6, 7, 8, 9]),
        (5, 3) => Ok([1, 2, 3, 5, 6, 7, 8, 9, 15]),
        (7, 4) => Ok([1, 2, 3, 6, 7, 8, 9, 14, 15]),
        _ if is_family(frac) => Ok([1, 2, 3, 4, 5, 10, 11, 12, 13]),
        _ => Err(Error::UnknownSurface(frac)),
    }
}

/// Default tolerances for the basic integrals and the direct assembly.
pub fn default_integral_config() -> QuadratureConfig {
    QuadratureConfig {
        abs_tol: 1e-10,
        rel_tol: 1e-10,
        max_subdivisions: 200_000,
    }
}

fn breaks(step: f64, count: u32) -> Vec<f64> {
    (0..=count).map(|k| step * k as f64).collect()
}

fn one_integral(
    ctx: &PotentialContext,
    frac: Fraction,
    label: IntegralLabel,
    cfg: &QuadratureConfig,
) -> Result<(f64, f64)> {
    let (xl, yl) = (ctx.x_len, ctx.y_len);
    let n = frac.n();
    let nx = n as f64 * xl;
    if let IntegralLabel::I0 { a, b } = label {
        if a % 2 != 0 || b % 2 != 0 {
            return Err(Error::Domain(format!(
                "{label}: cosine powers must be even"
            )));
        }
        let (wx, wy) = (2.0 * PI / xl, 2.0 * PI / yl);
        let r = integrate_2d_with_breaks(
            |x, y| {
                ctx.potential(x, y) * (wx * x).cos().powi(a as i32) * (wy * y).cos().powi(b as i32)
            },
            &[0.0, 0.25 * xl],
            &[0.0, 0.25 * yl],
            cfg,
        )?;
        let s = 1.0 / (nx * yl);
        return Ok((s * r.value, s * r.error));
    }
    let (kx, ky) = (PI / nx, 2.0 * PI / yl);
    let weight: Box<dyn Fn(f64, f64) -> f64 + Sync> = match label {
        IntegralLabel::I1 => Box::new(move |x, _| (4.0 * kx * x).cos()),
        IntegralLabel::I2 => Box::new(move |x, _| (8.0 * kx * x).cos()),
        IntegralLabel::I3 => Box::new(move |x, _| (16.0 * kx * x).cos()),
        IntegralLabel::I4 => Box::new(move |x, y| (4.0 * kx * x).cos() * (2.0 * ky * y).cos()),
        IntegralLabel::I5 => Box::new(move |x, _| (4.0 * kx * x).cos() * (8.0 * kx * x).cos()),
        IntegralLabel::I6 => Box::new(move |x, y| (8.0 * kx * x).cos() * (2.0 * ky * y).cos()),
        IntegralLabel::I7 => Box::new(move |x, y| (12.0 * kx * x).cos() * (2.0 * ky * y).cos()),
        IntegralLabel::I0 { .. } => unreachable!(),
    };
    let r = integrate_2d_with_breaks(
        |x, y| ctx.potential(x, y) * weight(x, y),
        &breaks(0.25 * xl, n),
        &[0.0, 0.25 * yl],
        cfg,
    )?;
    let s = 8.0 / (nx * yl);
    Ok((s * r.value, s * r.error))
}

/// Computes the requested basic integrals (in parallel; the result does not
/// depend on scheduling).
pub fn basic_integrals(
    ctx: &PotentialContext,
    frac: Fraction,
    needed: &[IntegralLabel],
    cfg: &QuadratureConfig,
) -> Result<BasicIntegralTable> {
    cfg.validate()?;
    let results: Vec<(IntegralLabel, f64, f64)> = needed
        .par_iter()
        .map(|&l| one_integral(ctx, frac, l, cfg).map(|(v, e)| (l, v, e)))
        .collect::<Result<_>>()?;
    Ok(BasicIntegralTable {
        frac,
        values: results.iter().map(|&(l, v, _)| (l, v)).collect(),
        errors: results.iter().map(|&(l, _, e)| (l, e)).collect(),
    })
}

/// A 9×9 matrix `M(ℓ,n)` on the selected functions, stored in selection order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexMatrix {
    pub entries: SymMatrix,
    pub selection: [usize; 9],
    pub frac: Fraction,
}

impl IndexMatrix {
    pub fn size(&self) -> usize {
        9
    }

    /// Entry addressed by 17-function table indices.
    pub fn by_table_index(&self, i: usize, j: usize) -> Option<f64> {
        let a = self.selection.iter().position(|&s| s == i)?;
        let b = self.selection.iter().position(|&s| s == j)?;
        Some(self.entries.get(a, b))
    }

    pub fn max_abs_difference(&self, other: &IndexMatrix) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..9 {
            for j in 0..9 {
                worst = worst.max((self.entries.get(i, j) - other.entries.get(i, j)).abs());
            }
        }
        worst
    }
}

/// Closed-form entries, keyed by table indices `(i, j)` with `i <= j`.
fn closed_form_entries(
    frac: Fraction,
    t: &BasicIntegralTable,
    basis: &Table1Basis,
) -> Result<Vec<((usize, usize), f64)>> {
    use IntegralLabel::*;
    let g = |l: IntegralLabel| t.get(l);
    let a = |i: usize| basis.alpha(i);
    let mut e = Vec::new();
    match (frac.ell(), frac.n()) {
        (3, 2) => {
            let (c00, c02, c20, c22) = (g(i0(0, 0))?, g(i0(0, 2))?, g(i0(2, 0))?, g(i0(2, 2))?);
            e.push(((1, 1), -32.0 * c00));
            e.push(((4, 4), a(4) - 64.0 * (c00 - c02)));
            e.push(((5, 5), a(5) - 64.0 * c02));
            e.push(((7, 7), a(7) - 64.0 * c20));
            e.push(((17, 17), a(17) - 64.0 * (c00 - c02 - c20 + 2.0 * c22)));
            for i in [2, 3, 8, 9] {
                e.push(((i, i), a(i) - 32.0 * c00));
            }
        }
        (4, 3) => {
            let (c00, c02, c04) = (g(i0(0, 0))?, g(i0(0, 2))?, g(i0(0, 4))?);
            let (i1, i2, i4) = (g(I1)?, g(I2)?, g(I4)?);
            let base = 48.0 * c00;
            e.push(((1, 1), -base));
            e.push(((2, 2), a(2) - base + 2.0 * i2));
            e.push(((3, 3), a(3) - base - 2.0 * i2));
            e.push(((4, 4), a(4) - base + 2.0 * i4));
            e.push(((5, 5), a(5) - base - 2.0 * i4));
            e.push(((6, 6), a(6) - base + 2.0 * i4));
            e.push(((7, 7), a(7) - base - 2.0 * i4));
            e.push(((8, 8), a(8) - 384.0 * (c02 - c04)));
            e.push(((9, 9), a(9) - 96.0 * (4.0 * c04 - 4.0 * c02 + c00)));
            let cross = -48.0 * (-c00 + 2.0 * c02);
            e.push(((1, 3), -2.0 * SQRT_2 * i1));
            e.push(((1, 9), SQRT_2 * cross));
            e.push(((4, 6), cross + 2.0 * i1));
            e.push(((5, 7), cross - 2.0 * i1));
            e.push(((3, 9), -4.0 * i4));
        }
        (5, 3) => {
            let (c00, c02, c20) = (g(i0(0, 0))?, g(i0(0, 2))?, g(i0(2, 0))?);
            let (i1, i2, i4) = (g(I1)?, g(I2)?, g(I4)?);
            let base = 48.0 * c00;
            e.push(((1, 1), -base));
            e.push(((2, 2), a(2) - base + 2.0 * i1));
            e.push(((3, 3), a(3) - base - 2.0 * i1));
            e.push(((5, 5), a(5) - 96.0 * c02));
            e.push(((6, 6), a(6) - base + 2.0 * i2));
            e.push(((7, 7), a(7) - base - 2.0 * i2));
            e.push(((8, 8), a(8) - base + 2.0 * i4));
            e.push(((9, 9), a(9) - base - 2.0 * i4));
            e.push(((15, 15), a(15) - 96.0 * c20));
            e.push(((1, 7), -2.0 * SQRT_2 * i1));
            e.push(((3, 15), -2.0 * (i1 + i2)));
        }
        (7, 4) => {
            let c00 = g(i0(0, 0))?;
            for i in table3_selection(frac)? {
                e.push(((i, i), a(i) - 64.0 * c00));
            }
        }
        _ if is_family(frac) => {
            let base = 16.0 * frac.n() as f64 * g(i0(0, 0))?;
            let (i1, i2, i3, i4) = (g(I1)?, g(I2)?, g(I3)?, g(I4)?);
            let (i5, i6, i7) = (g(I5)?, g(I6)?, g(I7)?);
            e.push(((1, 1), -base));
            e.push(((2, 2), a(2) - base + 2.0 * i1));
            e.push(((3, 3), a(3) - base - 2.0 * i1));
            e.push(((4, 4), a(4) - base + 2.0 * i4));
            e.push(((5, 5), a(5) - base - 2.0 * i4));
            e.push(((10, 10), a(10) - base + 2.0 * i3));
            e.push(((11, 11), a(11) - base - 2.0 * i3));
            e.push(((12, 12), a(12) - base + 2.0 * i7));
            e.push(((13, 13), a(13) - base - 2.0 * i7));
            e.push(((1, 3), -2.0 * SQRT_2 * i1));
            e.push(((1, 11), -2.0 * SQRT_2 * i2));
            e.push(((2, 10), -4.0 * i1 + 4.0 * i5));
            e.push(((3, 11), -4.0 * i5));
            e.push(((4, 12), -2.0 * i1 + 2.0 * i6));
            e.push(((5, 13), -2.0 * i1 - 2.0 * i6));
        }
        _ => return Err(Error::UnknownSurface(frac)),
    }
    Ok(e)
}

/// `M(ℓ,n)` from the closed-form expressions in the basic integrals; every
/// entry not listed there is exactly zero.
pub fn assemble_matrix_table4(
    frac: Fraction,
    integrals: &BasicIntegralTable,
    basis: &Table1Basis,
) -> Result<IndexMatrix> {
    let selection = table3_selection(frac)?;
    let mut entries = SymMatrix::zeros(9);
    for ((i, j), v) in closed_form_entries(frac, integrals, basis)? {
        let a = selection.iter().position(|&s| s == i);
        let b = selection.iter().position(|&s| s == j);
        match (a, b) {
            (Some(a), Some(b)) => entries.set(a, b, v),
            _ => {
                return Err(Error::Domain(format!(
                    "entry ({i},{j}) is outside the selection for W_{frac}"
                )))
            }
        }
    }
    Ok(IndexMatrix {
        entries,
        selection,
        frac,
    })
}

/// Fundamental domain `[0, w] × [0, y_len]` of the lattice used for direct
/// quadrature, with the grid of quarter-period breakpoints.
pub fn fundamental_rectangle(frac: Fraction, x_len: f64, y_len: f64) -> (Vec<f64>, Vec<f64>) {
    let cells = if frac.ell_is_odd() {
        4 * frac.n()
    } else {
        2 * frac.n()
    };
    (breaks(0.25 * x_len, cells), breaks(0.25 * y_len, 4))
}

/// `M(ℓ,n)` by direct quadrature of `V u_i u_j` over a fundamental domain.
/// The 45 upper-triangle integrands share one adaptive partition, so `V` is
/// evaluated once per node; each entry still carries its own error control.
pub fn assemble_matrix_direct(
    frac: Fraction,
    ctx: &PotentialContext,
    basis: &Table1Basis,
    cfg: &QuadratureConfig,
) -> Result<IndexMatrix> {
    cfg.validate()?;
    let selection = table3_selection(frac)?;
    let defect = ctx.lattice_periodicity_defect();
    if defect > 1e-8 * ctx.potential(0.0, 0.0) {
        return Err(Error::Domain(format!(
            "V is not periodic under the lattice of W_{frac} (defect {defect:e})"
        )));
    }
    let (xb, yb) = fundamental_rectangle(frac, ctx.x_len, ctx.y_len);
    let funcs: Vec<_> = selection.iter().map(|&i| *basis.get(i)).collect();
    let pairs: Vec<(usize, usize)> = (0..9).flat_map(|a| (a..9).map(move |b| (a, b))).collect();
    let integrals = integrate_2d_many(
        |x, y, out| {
            let v = ctx.potential(x, y);
            let mut u = [0.0; 9];
            for (slot, e) in u.iter_mut().zip(&funcs) {
                *slot = e.eval(x, y);
            }
            for (o, &(a, b)) in out.iter_mut().zip(&pairs) {
                *o = v * u[a] * u[b];
            }
        },
        pairs.len(),
        &xb,
        &yb,
        cfg,
    )?;
    let mut entries = SymMatrix::zeros(9);
    for (&(a, b), r) in pairs.iter().zip(integrals) {
        let diag = if a == b { funcs[a].alpha } else { 0.0 };
        entries.set(a, b, diag - r.value);
    }
    Ok(IndexMatrix {
        entries,
        selection,
        frac,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefinitenessReport {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub max_eigenvalue: f64,
    pub negative_definite: bool,
    /// `-max_eigenvalue`.
    pub margin: f64,
    pub threshold: f64,
    /// Whether a Cholesky factorisation of `-M` exists.
    pub cholesky_certified: bool,
}

/// Default threshold: `1e-6` times the largest absolute entry.
pub fn default_threshold(m: &SymMatrix) -> f64 {
    1e-6 * m.max_norm()
}

/// Negative definite iff the largest eigenvalue is below `-threshold`.
pub fn definiteness(m: &SymMatrix, threshold: f64) -> DefinitenessReport {
    let eigenvalues = symmetric_eigenvalues(m);
    let max_eigenvalue = eigenvalues.last().copied().unwrap_or(f64::NEG_INFINITY);
    let mut neg = m.clone();
    neg.scale(-1.0);
    DefinitenessReport {
        max_eigenvalue,
        negative_definite: max_eigenvalue < -threshold,
        margin: -max_eigenvalue,
        threshold,
        cholesky_certified: cholesky(&neg).is_some(),
        eigenvalues,
    }
}

/// A negative definite `N×N` restriction gives index at least `N - 1`.
pub fn theorem1_bound(report: &DefinitenessReport) -> Option<u32> {
    if report.negative_definite && !report.eigenvalues.is_empty() {
        Some(report.eigenvalues.len() as u32 - 1)
    } else {
        None
    }
}
