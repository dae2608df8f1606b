//! Spectrum of the flat Laplacian on `C/Γ`, the fixed 17-function indexing
//! that the matrix tables refer to, and the two cheap index bounds.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::params::{enumerate_fractions, Fraction, Lattice, WenteSurface};
use crate::DEFAULT_H;

const TWO_PI: f64 = 2.0 * PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Sin,
    Cos,
}

impl Parity {
    fn apply(self, phase: f64) -> f64 {
        match self {
            Parity::Sin => phase.sin(),
            Parity::Cos => phase.cos(),
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Sin => "sin",
            Parity::Cos => "cos",
        })
    }
}

/// One L²-normalised eigenfunction `c · trig(c_x x + c_y y)` of `-Δ` on `C/Γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlatEigenpair {
    pub m1: i32,
    pub m2: i32,
    pub parity: Parity,
    pub alpha: f64,
    pub norm_const: f64,
    pub phase_coeffs: (f64, f64),
}

impl FlatEigenpair {
    /// Eigenpair attached to the dual-lattice label `(m1, m2)`.
    pub fn from_lattice(lat: &Lattice, m1: i32, m2: i32, parity: Parity) -> Self {
        let (a1, a2) = lat.v1;
        let (b1, b2) = lat.v2;
        let (m1f, m2f) = (m1 as f64, m2 as f64);
        let wx = m2f * b2 - m1f * a2;
        let wy = m1f * a1 - m2f * b1;
        let alpha = 4.0 * PI * PI / (lat.area * lat.area) * (wx * wx + wy * wy);
        let norm_const = if m1 == 0 && m2 == 0 {
            (1.0 / lat.area).sqrt()
        } else {
            (2.0 / lat.area).sqrt()
        };
        FlatEigenpair {
            m1,
            m2,
            parity,
            alpha,
            norm_const,
            phase_coeffs: (TWO_PI * wx / lat.area, TWO_PI * wy / lat.area),
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.norm_const
            * self
                .parity
                .apply(self.phase_coeffs.0 * x + self.phase_coeffs.1 * y)
    }

    pub fn is_constant(&self) -> bool {
        self.m1 == 0 && self.m2 == 0
    }

    /// Same eigenvalue and the same function up to sign.
    pub fn same_function(&self, other: &FlatEigenpair, tol: f64) -> bool {
        let close =
            |a: (f64, f64), b: (f64, f64)| (a.0 - b.0).abs() <= tol && (a.1 - b.1).abs() <= tol;
        let neg = (-other.phase_coeffs.0, -other.phase_coeffs.1);
        self.parity == other.parity
            && (self.alpha - other.alpha).abs() <= tol * self.alpha.max(1.0)
            && (self.norm_const - other.norm_const).abs() <= tol
            && (close(self.phase_coeffs, other.phase_coeffs) || close(self.phase_coeffs, neg))
    }
}

fn canonical(m1: i32, m2: i32) -> bool {
    m1 > 0 || (m1 == 0 && m2 >= 0)
}

/// Every eigenfunction with `|m1|, |m2| ≤ m_cutoff`, one per `±(m1, m2)` class
/// and parity (the constant only as cosine), sorted by
/// `(alpha, m1, m2, parity)`.
pub fn flat_eigenpairs(lat: &Lattice, m_cutoff: u32) -> Vec<FlatEigenpair> {
    let c = m_cutoff as i32;
    let mut out = Vec::new();
    for m1 in -c..=c {
        for m2 in -c..=c {
            if !canonical(m1, m2) {
                continue;
            }
            if m1 != 0 || m2 != 0 {
                out.push(FlatEigenpair::from_lattice(lat, m1, m2, Parity::Sin));
            }
            out.push(FlatEigenpair::from_lattice(lat, m1, m2, Parity::Cos));
        }
    }
    out.sort_by(|a, b| {
        a.alpha
            .total_cmp(&b.alpha)
            .then(a.m1.cmp(&b.m1))
            .then(a.m2.cmp(&b.m2))
            .then(a.parity.cmp(&b.parity))
    });
    out
}

/// Smallest eigenvalue of the quadratic form `m ↦ α(m)` per unit `|m|²`.
fn min_alpha_per_unit(lat: &Lattice) -> f64 {
    let (a1, a2) = lat.v1;
    let (b1, b2) = lat.v2;
    // α(m) = s |m1 w1 + m2 w2|², w1 = (-a2, a1), w2 = (b2, -b1).
    let s = 4.0 * PI * PI / (lat.area * lat.area);
    let g11 = a2 * a2 + a1 * a1;
    let g22 = b2 * b2 + b1 * b1;
    let g12 = -a2 * b2 - a1 * b1;
    let mean = 0.5 * (g11 + g22);
    let disc = (0.25 * (g11 - g22).powi(2) + g12 * g12).sqrt();
    s * (mean - disc)
}

/// `(x, y)` wavenumbers in units of `2π/(n x_ℓn)` and `2π/y_ℓn`, and parity,
/// for `u_1 … u_17`, odd-`ℓ` column.
///
/// The printed table repeats the `cos(2πx/(n x) - 2πy/y)` function for
/// `u_10` and `u_11`; `u_10` is its sine partner.
const TABLE1_ODD: [(i32, i32, Parity); 17] = [
    (0, 0, Parity::Cos),
    (1, 0, Parity::Sin),
    (1, 0, Parity::Cos),
    (0, 1, Parity::Sin),
    (0, 1, Parity::Cos),
    (2, 0, Parity::Sin),
    (2, 0, Parity::Cos),
    (1, 1, Parity::Sin),
    (1, 1, Parity::Cos),
    (1, -1, Parity::Sin),
    (1, -1, Parity::Cos),
    (0, 2, Parity::Sin),
    (0, 2, Parity::Cos),
    (3, 0, Parity::Sin),
    (3, 0, Parity::Cos),
    (2, 1, Parity::Sin),
    (2, 1, Parity::Cos),
];

/// Even-`ℓ` column. The printed `u_14`, `u_15` repeat `u_12`, `u_13`
/// verbatim; they are taken as the `(3, -1)` pair of equal eigenvalue.
const TABLE1_EVEN: [(i32, i32, Parity); 17] = [
    (0, 0, Parity::Cos),
    (2, 0, Parity::Sin),
    (2, 0, Parity::Cos),
    (1, 1, Parity::Sin),
    (1, 1, Parity::Cos),
    (1, -1, Parity::Sin),
    (1, -1, Parity::Cos),
    (0, 2, Parity::Sin),
    (0, 2, Parity::Cos),
    (4, 0, Parity::Sin),
    (4, 0, Parity::Cos),
    (3, 1, Parity::Sin),
    (3, 1, Parity::Cos),
    (3, -1, Parity::Sin),
    (3, -1, Parity::Cos),
    (2, 2, Parity::Sin),
    (2, 2, Parity::Cos),
];

/// The 17 indexed eigenpairs `u_1 … u_17` for one torus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Basis {
    pub frac: Fraction,
    pub entries: Vec<FlatEigenpair>,
}

impl Table1Basis {
    /// Entry `u_i`, 1-based as in the tables.
    pub fn get(&self, index: usize) -> &FlatEigenpair {
        assert!(
            (1..=17).contains(&index),
            "table index {index} outside 1..=17"
        );
        &self.entries[index - 1]
    }

    pub fn alpha(&self, index: usize) -> f64 {
        self.get(index).alpha
    }
}

/// Table of the first 17 eigenpairs, built directly from the closed forms
/// `α = 4π²(p²/(n x)² + q²/y²)`, `u ∝ trig(2πp x/(n x) + 2πq y/y)`.
pub fn table1_basis(frac: Fraction, x_len: f64, y_len: f64) -> Table1Basis {
    let n = frac.n() as f64;
    let nx = n * x_len;
    let odd = frac.ell_is_odd();
    let (rows, area) = if odd {
        (&TABLE1_ODD, nx * y_len)
    } else {
        (&TABLE1_EVEN, 0.5 * nx * y_len)
    };
    let entries = rows
        .iter()
        .map(|&(p, q, parity)| {
            let (pf, qf) = (p as f64, q as f64);
            let alpha = 4.0 * PI * PI * ((pf / nx).powi(2) + (qf / y_len).powi(2));
            let constant = p == 0 && q == 0;
            // odd: (m1, m2) = (q, p); even: m1 = q, 2 m2 - m1 = p.
            let (m1, m2) = if odd { (q, p) } else { (q, (p + q) / 2) };
            FlatEigenpair {
                m1,
                m2,
                parity,
                alpha,
                norm_const: if constant {
                    (1.0 / area).sqrt()
                } else {
                    (2.0 / area).sqrt()
                },
                phase_coeffs: (TWO_PI * pf / nx, TWO_PI * qf / y_len),
            }
        })
        .collect();
    Table1Basis { frac, entries }
}

/// Number of flat eigenvalues (with multiplicity) strictly below `threshold`,
/// enlarging the box until `min_alpha_per_unit·(cutoff+1)²` clears it.
pub fn count_below(lat: &Lattice, threshold: f64) -> usize {
    let per_unit = min_alpha_per_unit(lat);
    let mut cutoff = 8u32;
    while per_unit * f64::from(cutoff + 1).powi(2) <= threshold {
        cutoff *= 2;
    }
    flat_eigenpairs(lat, cutoff)
        .iter()
        .take_while(|e| e.alpha < threshold)
        .count()
}

/// Bound from the flat eigenvalues below `4H`: that count minus one.
pub fn lemma4_bound_for_surface(surface: &WenteSurface) -> usize {
    count_below(&surface.lattice, 4.0 * surface.h()) - 1
}

pub fn lemma4_bound(frac: Fraction, h: f64) -> Result<usize> {
    Ok(lemma4_bound_for_surface(&WenteSurface::solve(frac, h)?))
}

/// Nodal-domain bound: `2n - 2` for odd `ℓ`, `n - 2` for even `ℓ`.
pub fn lemma5_bound(frac: Fraction) -> u32 {
    if frac.ell_is_odd() {
        2 * frac.n() - 2
    } else {
        frac.n() - 2
    }
}

/// Largest denominator that can still have a nodal bound below 8: for
/// `n ≥ 10` both branches give at least 8.
pub const CANDIDATE_N_MAX: u32 = 9;

/// Fractions whose nodal bound is below 8.
pub fn lemma5_candidates() -> Vec<Fraction> {
    enumerate_fractions(CANDIDATE_N_MAX)
        .into_iter()
        .filter(|&f| lemma5_bound(f) < 8)
        .collect()
}

/// Tori not already settled by either cheap bound (at `H = 1/2`).
pub fn candidate_surfaces() -> Result<Vec<Fraction>> {
    let mut out = Vec::new();
    for f in lemma5_candidates() {
        if lemma4_bound(f, DEFAULT_H)? < 8 {
            out.push(f);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate_2d, QuadratureConfig, Rect};

    fn frac(l: u32, n: u32) -> Fraction {
        Fraction::new(l, n).unwrap()
    }

    fn square() -> Lattice {
        Lattice::new((1.0, 0.0), (0.0, 1.0)).unwrap()
    }

    #[test]
    fn constant_mode() {
        let lat = Lattice::new((2.0, 0.0), (0.0, 3.0)).unwrap();
        let e = flat_eigenpairs(&lat, 1);
        assert_eq!((e[0].m1, e[0].m2, e[0].alpha), (0, 0, 0.0));
        assert!((e[0].norm_const - (1.0f64 / 6.0).sqrt()).abs() < 1e-15);
        assert!(e.iter().filter(|p| p.is_constant()).count() == 1);
        // (2c+1)² - 1 non-constant labels, halved, times two parities, plus one.
        assert_eq!(e.len(), 9);
    }

    #[test]
    fn square_torus_multiplicities() {
        let e = flat_eigenpairs(&square(), 3);
        let four_pi2 = 4.0 * PI * PI;
        let alphas: Vec<f64> = e.iter().take(9).map(|p| p.alpha / four_pi2).collect();
        let expected = [0.0, 1.0, 1.0, 1.0, 1.0, 2.0, 2.0, 2.0, 2.0];
        for (a, b) in alphas.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(e.windows(2).all(|w| w[0].alpha <= w[1].alpha));
    }

    #[test]
    fn smallest_nonzero_eigenvalue_for_three_halves() {
        let lat = crate::params::lattice(frac(3, 2), 2.5556, 4.2131).unwrap();
        let e = flat_eigenpairs(&lat, 2);
        let expected = 4.0 * PI * PI / (5.1112f64 * 5.1112);
        assert!((e[1].alpha - expected).abs() < 1e-12);
        assert!((e[1].alpha - 1.511).abs() < 1e-3);
    }

    #[test]
    fn table1_printed_entries() {
        let (x, y) = (2.5556, 4.2131);
        let b = table1_basis(frac(3, 2), x, y);
        assert!((b.alpha(4) - 4.0 * PI * PI / (y * y)).abs() < 1e-12);
        assert_eq!(b.get(4).parity, Parity::Sin);
        assert!((b.get(4).phase_coeffs.1 - TWO_PI / y).abs() < 1e-15);
        assert!((b.alpha(2) - 4.0 * PI * PI / (4.0 * x * x)).abs() < 1e-12);

        let (x, y) = (3.2767, 6.3355);
        let b = table1_basis(frac(4, 3), x, y);
        assert!((b.alpha(2) - 16.0 * PI * PI / (9.0 * x * x)).abs() < 1e-12);
        assert!((b.get(2).phase_coeffs.0 - 4.0 * PI / (3.0 * x)).abs() < 1e-15);
        assert!((b.get(2).norm_const - 1.0 / (3.0 * x * y / 4.0).sqrt()).abs() < 1e-15);
        assert!((b.get(1).norm_const - 2f64.sqrt() / (3.0 * x * y).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn table1_entries_are_lattice_eigenpairs() {
        for f in [
            frac(3, 2),
            frac(4, 3),
            frac(5, 3),
            frac(7, 4),
            frac(8, 5),
            frac(16, 9),
        ] {
            let s = WenteSurface::solve(f, 0.5).unwrap();
            let basis = table1_basis(f, s.x_len, s.y_len);
            let all = flat_eigenpairs(&s.lattice, 4);
            for (i, e) in basis.entries.iter().enumerate() {
                assert!(
                    all.iter().any(|g| g.same_function(e, 1e-12)),
                    "{f}: u_{} not found",
                    i + 1
                );
                let direct = FlatEigenpair::from_lattice(&s.lattice, e.m1, e.m2, e.parity);
                assert!(direct.same_function(e, 1e-12), "{f}: u_{} label", i + 1);
            }
        }
    }

    #[test]
    fn table1_orthonormal_over_fundamental_domain() {
        let cfg = QuadratureConfig::default();
        for f in [frac(3, 2), frac(4, 3)] {
            let s = WenteSurface::solve(f, 0.5).unwrap();
            let b = table1_basis(f, s.x_len, s.y_len);
            let width = if f.ell_is_odd() { 1.0 } else { 0.5 } * f.n() as f64 * s.x_len;
            let rect = Rect::new(0.0, width, 0.0, s.y_len);
            for i in 0..17 {
                for j in i..17 {
                    let (ui, uj) = (b.entries[i], b.entries[j]);
                    let v = integrate_2d(|x, y| ui.eval(x, y) * uj.eval(x, y), rect, &cfg)
                        .unwrap()
                        .value;
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!(
                        (v - expected).abs() < 1e-8,
                        "{f}: <u_{}, u_{}> = {v}",
                        i + 1,
                        j + 1
                    );
                }
            }
        }
    }

    #[test]
    fn count_below_uses_a_large_enough_box() {
        // Square torus: eigenvalues below 4π²·5.5 are |m|² ∈ {0,1,2,4,5}.
        let n = count_below(&square(), 4.0 * PI * PI * 5.5);
        assert_eq!(n, 1 + 4 + 4 + 4 + 8);
        // Forces doubling past the initial box.
        let n = count_below(&square(), 4.0 * PI * PI * 100.5);
        let brute = (-11i32..=11)
            .flat_map(|a| (-11i32..=11).map(move |b| a * a + b * b))
            .filter(|&r| (r as f64) < 100.5)
            .count();
        assert_eq!(n, brute);
    }

    #[test]
    fn lemma5_values() {
        assert_eq!(lemma5_bound(frac(3, 2)), 2);
        assert_eq!(lemma5_bound(frac(4, 3)), 1);
        assert_eq!(lemma5_bound(frac(16, 9)), 7);
        assert_eq!(lemma5_bound(frac(7, 5)), 8);
    }

    #[test]
    fn lemma4_values() {
        assert_eq!(lemma4_bound(frac(7, 4), 0.5).unwrap(), 2);
        assert_eq!(lemma4_bound(frac(4, 3), 0.5).unwrap(), 6);
        assert_eq!(lemma4_bound(frac(14, 9), 0.5).unwrap(), 4);
    }

    #[test]
    fn lemma4_is_scale_invariant() {
        let base = lemma4_bound(frac(3, 2), 0.5).unwrap();
        for c in [2.0, 4.0] {
            assert_eq!(lemma4_bound(frac(3, 2), 0.5 * c).unwrap(), base);
        }
    }

    #[test]
    fn candidates() {
        let pre: Vec<String> = lemma5_candidates()
            .iter()
            .map(ToString::to_string)
            .collect();
        assert_eq!(
            pre,
            [
                "3/2", "4/3", "5/3", "5/4", "7/4", "6/5", "8/5", "8/7", "10/7", "12/7", "10/9",
                "14/9", "16/9"
            ]
        );
        let c: Vec<String> = candidate_surfaces()
            .unwrap()
            .iter()
            .map(ToString::to_string)
            .collect();
        assert_eq!(
            c,
            ["3/2", "4/3", "5/3", "7/4", "8/5", "12/7", "14/9", "16/9"]
        );
        assert!(lemma4_bound(frac(5, 4), 0.5).unwrap() >= 8);
    }
}
