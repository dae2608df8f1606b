//! Globally adaptive Gauss–Kronrod quadrature on intervals and rectangles.
//!
//! Both drivers keep a max-heap of regions keyed by their local error
//! estimate (`|K15 - G7|`, tensorised in 2D) and bisect the worst region until
//! the summed error meets `max(abs_tol, rel_tol·|I|)`. Rectangles are split
//! along the axis whose one-dimensional error component dominates.
//!
//! Everything runs sequentially inside one integral, so results are
//! bit-reproducible for a fixed configuration; callers parallelise across
//! independent integrals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Kronrod abscissae on [-1, 1] (non-negative half, descending).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

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

/// Gauss weights for the odd-indexed Kronrod nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const NODES: usize = 15;

struct Rule {
    nodes: [f64; NODES],
    kronrod: [f64; NODES],
    gauss: [f64; NODES],
}

const fn build_rule() -> Rule {
    let mut nodes = [0.0; NODES];
    let mut kronrod = [0.0; NODES];
    let mut gauss = [0.0; NODES];
    let mut i = 0;
    while i < 7 {
        nodes[i] = -XGK[i];
        nodes[NODES - 1 - i] = XGK[i];
        kronrod[i] = WGK[i];
        kronrod[NODES - 1 - i] = WGK[i];
        if i % 2 == 1 {
            gauss[i] = WG[i / 2];
            gauss[NODES - 1 - i] = WG[i / 2];
        }
        i += 1;
    }
    nodes[7] = 0.0;
    kronrod[7] = WGK[7];
    gauss[7] = WG[3];
    Rule {
        nodes,
        kronrod,
        gauss,
    }
}

const RULE: Rule = build_rule();

/// Tolerances and work limit for the adaptive drivers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            abs_tol: 1e-9,
            rel_tol: 1e-9,
            max_subdivisions: 1_000_000,
        }
    }
}

impl QuadratureConfig {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let cfg = QuadratureConfig {
            abs_tol,
            rel_tol,
            max_subdivisions,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::Config(format!(
                "abs_tol must be > 0, got {}",
                self.abs_tol
            )));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::Config(format!(
                "rel_tol must be > 0, got {}",
                self.rel_tol
            )));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::Config("max_subdivisions must be >= 1".into()));
        }
        Ok(())
    }

    fn tolerance(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
    pub subdivisions: usize,
}

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Rect { x0, x1, y0, y1 }
    }

    pub fn area(&self) -> f64 {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }
}

/// Heap entry; ordered by error, ties broken by creation order so the
/// refinement sequence never depends on anything but the inputs.
struct Region {
    error: f64,
    id: usize,
    value: f64,
    roundoff: f64,
}

impl PartialEq for Region {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Region {}
impl PartialOrd for Region {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Region {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.id.cmp(&self.id))
    }
}

/// Shared driver: `estimate` returns `(value, error, roundoff, children)` for a
/// region, where `children` is the bisection to use if it needs refining.
fn adaptive<D: Copy>(
    initial: Vec<D>,
    cfg: &QuadratureConfig,
    evals_per_region: usize,
    mut estimate: impl FnMut(&D) -> (f64, f64, f64, [D; 2]),
) -> Result<Integral> {
    cfg.validate()?;
    let mut heap = BinaryHeap::new();
    let mut next_id = 0;
    let mut value = 0.0;
    let mut error = 0.0;
    let mut roundoff = 0.0;
    let mut children = Vec::new();
    for d in initial {
        let (v, e, r, kids) = estimate(&d);
        value += v;
        error += e;
        roundoff += r;
        heap.push(Region {
            error: e,
            id: next_id,
            value: v,
            roundoff: r,
        });
        children.push(kids);
        next_id += 1;
    }
    let mut evaluations = next_id * evals_per_region;
    let mut subdivisions = 0;
    let mut pending: Vec<Option<[D; 2]>> = children.into_iter().map(Some).collect();

    loop {
        if error <= cfg.tolerance(value).max(roundoff) {
            // Resum from scratch so the running totals carry no drift.
            let (v, e) = heap
                .iter()
                .fold((0.0, 0.0), |(v, e), r| (v + r.value, e + r.error));
            value = v;
            error = e;
            if error <= cfg.tolerance(value).max(roundoff) {
                break;
            }
        }
        if subdivisions >= cfg.max_subdivisions {
            return Err(Error::Quadrature {
                value,
                error,
                tolerance: cfg.tolerance(value),
                subdivisions,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let halves = pending[worst.id].take().expect("region split once");
        value -= worst.value;
        error -= worst.error;
        roundoff -= worst.roundoff;
        for d in halves {
            let (v, e, r, kids) = estimate(&d);
            value += v;
            error += e;
            roundoff += r;
            heap.push(Region {
                error: e,
                id: next_id,
                value: v,
                roundoff: r,
            });
            pending.push(Some(kids));
            next_id += 1;
        }
        evaluations += 2 * evals_per_region;
        subdivisions += 1;
    }

    Ok(Integral {
        value,
        error,
        evaluations,
        subdivisions,
    })
}

fn check_bounds(a: f64, b: f64, what: &str) -> Result<()> {
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain(format!("{what} bounds must be finite")));
    }
    if a > b {
        return Err(Error::Domain(format!("{what} bounds reversed: {a} > {b}")));
    }
    Ok(())
}

/// Adaptive G7/K15 integration of `f` over `[a, b]`.
pub fn integrate_1d<F>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Integral>
where
    F: Fn(f64) -> f64,
{
    check_bounds(a, b, "interval")?;
    integrate_1d_with_breaks(f, &[a, b], cfg)
}

/// As [`integrate_1d`] over `[breaks[0], breaks[last]]`, seeding the
/// adaptive partition with the given interior breakpoints.
pub fn integrate_1d_with_breaks<F>(f: F, breaks: &[f64], cfg: &QuadratureConfig) -> Result<Integral>
where
    F: Fn(f64) -> f64,
{
    let initial = intervals(breaks, "interval")?;
    if initial.is_empty() {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
            subdivisions: 0,
        });
    }
    adaptive(initial, cfg, NODES, |&(a, b)| {
        let centre = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let (mut k, mut g, mut abs) = (0.0, 0.0, 0.0);
        for i in 0..NODES {
            let fx = f(centre + half * RULE.nodes[i]);
            k += RULE.kronrod[i] * fx;
            g += RULE.gauss[i] * fx;
            abs += RULE.kronrod[i] * fx.abs();
        }
        let value = k * half;
        let error = ((k - g) * half).abs();
        let roundoff = 50.0 * f64::EPSILON * abs * half.abs();
        (value, error, roundoff, [(a, centre), (centre, b)])
    })
}

fn intervals(breaks: &[f64], what: &str) -> Result<Vec<(f64, f64)>> {
    if breaks.len() < 2 {
        return Err(Error::Domain(format!(
            "{what} needs at least two breakpoints"
        )));
    }
    let mut out = Vec::with_capacity(breaks.len() - 1);
    for w in breaks.windows(2) {
        check_bounds(w[0], w[1], what)?;
        if w[1] > w[0] {
            out.push((w[0], w[1]));
        }
    }
    Ok(out)
}

/// Adaptive tensor-product G7/K15 integration of `f` over `rect`.
pub fn integrate_2d<F>(f: F, rect: Rect, cfg: &QuadratureConfig) -> Result<Integral>
where
    F: Fn(f64, f64) -> f64,
{
    integrate_2d_with_breaks(f, &[rect.x0, rect.x1], &[rect.y0, rect.y1], cfg)
}

/// As [`integrate_2d`] over the rectangle spanned by the outer breakpoints,
/// starting from the grid of cells they define. Use this to split at known
/// symmetry lines of the integrand.
pub fn integrate_2d_with_breaks<F>(
    f: F,
    x_breaks: &[f64],
    y_breaks: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Integral>
where
    F: Fn(f64, f64) -> f64,
{
    let xs = intervals(x_breaks, "x range")?;
    let ys = intervals(y_breaks, "y range")?;
    let mut initial = Vec::with_capacity(xs.len() * ys.len());
    for &(x0, x1) in &xs {
        for &(y0, y1) in &ys {
            initial.push(Rect { x0, x1, y0, y1 });
        }
    }
    if initial.is_empty() {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
            subdivisions: 0,
        });
    }
    let mut column = [0.0; NODES];
    adaptive(initial, cfg, NODES * NODES, move |r: &Rect| {
        let cx = 0.5 * (r.x0 + r.x1);
        let hx = 0.5 * (r.x1 - r.x0);
        let cy = 0.5 * (r.y0 + r.y1);
        let hy = 0.5 * (r.y1 - r.y0);
        for (j, c) in column.iter_mut().enumerate() {
            *c = cy + hy * RULE.nodes[j];
        }
        // kk: Kronrod in both; gk: Gauss in x, Kronrod in y; kg, gg likewise.
        let (mut kk, mut gk, mut kg, mut gg, mut abs) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for i in 0..NODES {
            let x = cx + hx * RULE.nodes[i];
            let (mut rk, mut rg, mut ra) = (0.0, 0.0, 0.0);
            for j in 0..NODES {
                let v = f(x, column[j]);
                rk += RULE.kronrod[j] * v;
                rg += RULE.gauss[j] * v;
                ra += RULE.kronrod[j] * v.abs();
            }
            kk += RULE.kronrod[i] * rk;
            kg += RULE.kronrod[i] * rg;
            gk += RULE.gauss[i] * rk;
            gg += RULE.gauss[i] * rg;
            abs += RULE.kronrod[i] * ra;
        }
        let jac = hx * hy;
        let value = kk * jac;
        let error = ((kk - gg) * jac).abs();
        let roundoff = 50.0 * f64::EPSILON * abs * jac.abs();
        let x_err = (kk - gk).abs();
        let y_err = (kk - kg).abs();
        let halves = if x_err >= y_err {
            [
                Rect::new(r.x0, cx, r.y0, r.y1),
                Rect::new(cx, r.x1, r.y0, r.y1),
            ]
        } else {
            [
                Rect::new(r.x0, r.x1, r.y0, cy),
                Rect::new(r.x0, r.x1, cy, r.y1),
            ]
        };
        (value, error, roundoff, halves)
    })
}

/// Refinement candidate for [`integrate_2d_many`], keyed by its largest
/// component error.
struct VecRegion {
    key: f64,
    id: usize,
    rect: Rect,
    values: Vec<f64>,
    errors: Vec<f64>,
    roundoffs: Vec<f64>,
}

impl PartialEq for VecRegion {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for VecRegion {}
impl PartialOrd for VecRegion {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for VecRegion {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key
            .total_cmp(&other.key)
            .then_with(|| other.id.cmp(&self.id))
    }
}

/// Integrates `components` functions at once; `f(x, y, out)` fills `out` with
/// their values. One region set is refined for all of them until every
/// component meets the tolerance, so shared expensive factors are evaluated
/// once per node.
pub fn integrate_2d_many<F>(
    f: F,
    components: usize,
    x_breaks: &[f64],
    y_breaks: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Vec<Integral>>
where
    F: Fn(f64, f64, &mut [f64]),
{
    cfg.validate()?;
    let xs = intervals(x_breaks, "x range")?;
    let ys = intervals(y_breaks, "y range")?;
    let m = components;
    let mut out = vec![0.0; m];
    let (mut kk, mut gk, mut kg, mut gg, mut abs) = (
        vec![0.0; m],
        vec![0.0; m],
        vec![0.0; m],
        vec![0.0; m],
        vec![0.0; m],
    );
    let (mut rk, mut rg, mut ra) = (vec![0.0; m], vec![0.0; m], vec![0.0; m]);
    let mut estimate = |r: Rect, id: usize| -> (VecRegion, bool) {
        let cx = 0.5 * (r.x0 + r.x1);
        let hx = 0.5 * (r.x1 - r.x0);
        let cy = 0.5 * (r.y0 + r.y1);
        let hy = 0.5 * (r.y1 - r.y0);
        for v in [&mut kk, &mut gk, &mut kg, &mut gg, &mut abs] {
            v.iter_mut().for_each(|t| *t = 0.0);
        }
        for i in 0..NODES {
            let x = cx + hx * RULE.nodes[i];
            for v in [&mut rk, &mut rg, &mut ra] {
                v.iter_mut().for_each(|t| *t = 0.0);
            }
            for j in 0..NODES {
                f(x, cy + hy * RULE.nodes[j], &mut out);
                for c in 0..m {
                    rk[c] += RULE.kronrod[j] * out[c];
                    rg[c] += RULE.gauss[j] * out[c];
                    ra[c] += RULE.kronrod[j] * out[c].abs();
                }
            }
            for c in 0..m {
                kk[c] += RULE.kronrod[i] * rk[c];
                kg[c] += RULE.kronrod[i] * rg[c];
                gk[c] += RULE.gauss[i] * rk[c];
                gg[c] += RULE.gauss[i] * rg[c];
                abs[c] += RULE.kronrod[i] * ra[c];
            }
        }
        let jac = hx * hy;
        let values: Vec<f64> = kk.iter().map(|v| v * jac).collect();
        let errors: Vec<f64> = kk
            .iter()
            .zip(&gg)
            .map(|(k, g)| ((k - g) * jac).abs())
            .collect();
        let roundoffs: Vec<f64> = abs
            .iter()
            .map(|a| 50.0 * f64::EPSILON * a * jac.abs())
            .collect();
        let x_err: f64 = kk.iter().zip(&gk).map(|(k, g)| (k - g).abs()).sum();
        let y_err: f64 = kk.iter().zip(&kg).map(|(k, g)| (k - g).abs()).sum();
        let key = errors.iter().fold(0.0, |a: f64, &e| a.max(e));
        (
            VecRegion {
                key,
                id,
                rect: r,
                values,
                errors,
                roundoffs,
            },
            x_err >= y_err,
        )
    };

    let mut heap = BinaryHeap::new();
    let mut split_x = Vec::new();
    let mut next_id = 0;
    for &(x0, x1) in &xs {
        for &(y0, y1) in &ys {
            let (reg, sx) = estimate(Rect { x0, x1, y0, y1 }, next_id);
            heap.push(reg);
            split_x.push(sx);
            next_id += 1;
        }
    }
    let mut subdivisions = 0;
    let totals = |heap: &BinaryHeap<VecRegion>| {
        let mut t = (vec![0.0; m], vec![0.0; m], vec![0.0; m]);
        for r in heap.iter() {
            for c in 0..m {
                t.0[c] += r.values[c];
                t.1[c] += r.errors[c];
                t.2[c] += r.roundoffs[c];
            }
        }
        t
    };
    loop {
        let (values, errors, roundoffs) = totals(&heap);
        let done = (0..m).all(|c| errors[c] <= cfg.tolerance(values[c]).max(roundoffs[c]));
        if done || heap.is_empty() {
            let evaluations = next_id * NODES * NODES;
            return Ok((0..m)
                .map(|c| Integral {
                    value: values[c],
                    error: errors[c],
                    evaluations,
                    subdivisions,
                })
                .collect());
        }
        if subdivisions >= cfg.max_subdivisions {
            let c = (0..m)
                .max_by(|&a, &b| errors[a].total_cmp(&errors[b]))
                .unwrap_or(0);
            return Err(Error::Quadrature {
                value: values[c],
                error: errors[c],
                tolerance: cfg.tolerance(values[c]),
                subdivisions,
            });
        }
        // Refine a batch: every region holding at least half the worst error.
        let worst = heap.peek().map_or(0.0, |r| r.key);
        let mut batch = Vec::new();
        while heap.peek().is_some_and(|r| r.key >= 0.5 * worst) {
            batch.push(heap.pop().expect("peeked"));
        }
        for reg in batch {
            let r = reg.rect;
            let (cx, cy) = (0.5 * (r.x0 + r.x1), 0.5 * (r.y0 + r.y1));
            let halves = if split_x[reg.id] {
                [
                    Rect::new(r.x0, cx, r.y0, r.y1),
                    Rect::new(cx, r.x1, r.y0, r.y1),
                ]
            } else {
                [
                    Rect::new(r.x0, r.x1, r.y0, cy),
                    Rect::new(r.x0, r.x1, cy, r.y1),
                ]
            };
            for h in halves {
                let (child, sx) = estimate(h, next_id);
                heap.push(child);
                split_x.push(sx);
                next_id += 1;
            }
            subdivisions += 1;
        }
    }
}
