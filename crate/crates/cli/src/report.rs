//! Per-surface pipeline and the serialisable reports it produces.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use wente_core::operator::{definiteness, DefinitenessReport, IndexMatrix};
use wente_core::spectrum::{lemma4_bound_for_surface, lemma5_candidates};
use wente_core::*;

use crate::config::RunConfig;
use crate::reference::{self, Cell, Check};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegralReport {
    pub label: String,
    pub value: f64,
    pub error_estimate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    /// `(cutoff, negative count)` for every cutoff from 2 up.
    pub counts: Vec<(u32, usize)>,
    pub monotone: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub quad_abs_tol: f64,
    pub quad_rel_tol: f64,
    pub quad_max_subdivisions: usize,
    pub theta_xtol: f64,
    pub definiteness_rel_threshold: f64,
    pub min_margin: f64,
    pub path_tolerance: f64,
}

impl Tolerances {
    fn from_config(cfg: &RunConfig) -> Self {
        Tolerances {
            quad_abs_tol: cfg.quad_abs_tol,
            quad_rel_tol: cfg.quad_rel_tol,
            quad_max_subdivisions: cfg.quad_max_subdivisions,
            theta_xtol: cfg.theta_xtol,
            definiteness_rel_threshold: cfg.definiteness_rel_threshold,
            min_margin: cfg.min_margin,
            path_tolerance: cfg.path_tolerance,
        }
    }
}

/// Run-dependent data kept apart so reports can be compared byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceReport {
    pub frac: String,
    pub ell: u32,
    pub n: u32,
    pub h: f64,
    pub theta_deg: f64,
    pub x_len: f64,
    pub y_len: f64,
    pub lemma4_bound: usize,
    pub lemma5_bound: u32,
    pub basic_integrals: Vec<IntegralReport>,
    pub selection: [usize; 9],
    pub matrix_table4: Vec<Vec<f64>>,
    pub matrix_direct: Vec<Vec<f64>>,
    pub max_path_difference: f64,
    pub matrix_eigenvalues: Vec<f64>,
    pub direct_eigenvalues: Vec<f64>,
    pub max_eigenvalue: f64,
    pub margin: f64,
    pub threshold: f64,
    pub negative_definite: bool,
    pub direct_negative_definite: bool,
    pub cholesky_certified: bool,
    pub theorem1_bound: Option<u32>,
    pub oracle_negative_count: Option<usize>,
    pub oracle: Option<OracleReport>,
    pub paper_check: Option<Vec<Check>>,
    /// Bound at least 8, paths agree, and every enabled check passed.
    pub verified: bool,
    pub tolerances: Tolerances,
    pub timing: Timing,
}

/// Everything computed for one of the eight surfaces.
pub struct SurfaceRun {
    pub surface: WenteSurface,
    pub ctx: PotentialContext,
    pub integrals: BasicIntegralTable,
    pub basis: Table1Basis,
    pub table4: IndexMatrix,
    pub direct: IndexMatrix,
    pub report4: DefinitenessReport,
    pub report_direct: DefinitenessReport,
}

pub fn solve_surface(frac: Fraction, cfg: &RunConfig) -> Result<WenteSurface> {
    WenteSurface::solve_with(frac, cfg.h, cfg.theta_xtol)
}

pub fn run_surface(frac: Fraction, cfg: &RunConfig) -> Result<SurfaceRun> {
    // Reject non-candidates before the expensive work.
    table3_selection(frac)?;
    let quad = cfg.quadrature();
    let surface = solve_surface(frac, cfg)?;
    let ctx = PotentialContext::new(&surface)?;
    let integrals = basic_integrals(&ctx, frac, &required_integrals(frac)?, &quad)?;
    let basis = table1_basis(frac, surface.x_len, surface.y_len);
    let table4 = assemble_matrix_table4(frac, &integrals, &basis)?;
    let direct = assemble_matrix_direct(frac, &ctx, &basis, &quad)?;
    let report4 = definiteness(&table4.entries, cfg.threshold(table4.entries.max_norm()));
    let report_direct = definiteness(&direct.entries, cfg.threshold(direct.entries.max_norm()));
    Ok(SurfaceRun {
        surface,
        ctx,
        integrals,
        basis,
        table4,
        direct,
        report4,
        report_direct,
    })
}

/// Negative counts for cutoffs `2..=cutoff`.
pub fn oracle_counts(run: &SurfaceRun, cutoff: u32, cfg: &RunConfig) -> Result<OracleReport> {
    let quad = cfg.quadrature();
    let counts = (2..=cutoff)
        .map(|c| build_galerkin(&run.ctx, &run.surface, c, &quad).map(|p| (c, negative_count(&p))))
        .collect::<Result<Vec<_>>>()?;
    let monotone = counts.windows(2).all(|w| w[0].1 <= w[1].1);
    Ok(OracleReport { counts, monotone })
}

pub fn parameter_checks(
    frac: Fraction,
    s: &WenteSurface,
    lemma4: usize,
    lemma5: u32,
) -> Vec<Check> {
    let Some(row) = reference::reference_row(frac.ell(), frac.n()) else {
        return Vec::new();
    };
    vec![
        Check::near(
            format!("W_{frac} theta_deg"),
            row.theta_deg,
            s.theta_deg(),
            reference::THETA_TOL_DEG,
        ),
        Check::near(
            format!("W_{frac} x_len"),
            row.x_len,
            s.x_len,
            reference::PERIOD_TOL,
        ),
        Check::near(
            format!("W_{frac} y_len"),
            row.y_len,
            s.y_len,
            reference::PERIOD_TOL,
        ),
        Check::exact(
            format!("W_{frac} lemma4_bound"),
            row.lemma4 as f64,
            lemma4 as f64,
        ),
        Check::exact(
            format!("W_{frac} lemma5_bound"),
            f64::from(row.lemma5),
            f64::from(lemma5),
        ),
    ]
}

pub fn integral_checks(frac: Fraction, t: &BasicIntegralTable) -> Vec<Check> {
    let mut out = Vec::new();
    for ((l, n), (a, b), expected) in reference::I0_VALUES {
        if (l, n) == (frac.ell(), frac.n()) {
            let label = IntegralLabel::I0 { a, b };
            let actual = t.get(label).unwrap_or(f64::NAN);
            out.push(Check::near(
                format!("W_{frac} {label}"),
                expected,
                actual,
                reference::I0_TOL,
            ));
        }
    }
    for (label, v) in t.iter() {
        if !matches!(label, IntegralLabel::I0 { .. }) {
            out.push(Check::small(
                format!("W_{frac} {label}"),
                v,
                reference::SMALL_INTEGRAL_TOL,
            ));
        }
    }
    out
}

pub fn matrix_checks(frac: Fraction, table4: &IndexMatrix, direct: &IndexMatrix) -> Vec<Check> {
    let Some(shown) = reference::displayed_matrix(frac.ell(), frac.n()) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for i in 0..9 {
        for j in i..9 {
            let item = format!("W_{frac} M[{},{}]", i + 1, j + 1);
            out.push(match shown[i][j] {
                Cell::Value(v) => {
                    Check::near(item, v, table4.entries.get(i, j), reference::ENTRY_TOL)
                }
                Cell::Zero => {
                    Check::small(item, table4.entries.get(i, j), reference::EXACT_ZERO_TOL)
                }
                Cell::Negligible => {
                    Check::small(item, direct.entries.get(i, j), reference::APPROX_ZERO_TOL)
                }
            });
        }
    }
    out
}

pub fn surface_report(frac: Fraction, cfg: &RunConfig) -> Result<SurfaceReport> {
    let start = Instant::now();
    let run = run_surface(frac, cfg)?;
    let lemma4 = lemma4_bound_for_surface(&run.surface);
    let lemma5 = lemma5_bound(frac);
    let oracle = if cfg.oracle_cutoff >= 2 {
        Some(oracle_counts(&run, cfg.oracle_cutoff, cfg)?)
    } else {
        None
    };
    let paper_check = cfg.paper_check.then(|| {
        let mut c = parameter_checks(frac, &run.surface, lemma4, lemma5);
        c.extend(integral_checks(frac, &run.integrals));
        c.extend(matrix_checks(frac, &run.table4, &run.direct));
        c.push(Check {
            item: format!("W_{frac} margin"),
            expected: format!("> {}", reference::MIN_MARGIN),
            actual: run.report4.margin,
            tolerance: reference::MIN_MARGIN,
            pass: run.report4.margin > reference::MIN_MARGIN,
        });
        c
    });
    let max_path_difference = run.table4.max_abs_difference(&run.direct);
    let theorem1 = theorem1_bound(&run.report4);
    let verified = theorem1.is_some_and(|b| b >= 8)
        && run.report_direct.negative_definite
        && max_path_difference < cfg.path_tolerance
        && oracle.as_ref().map_or(true, |o| o.monotone)
        && paper_check
            .as_ref()
            .map_or(true, |c| c.iter().all(|c| c.pass));
    Ok(SurfaceReport {
        frac: frac.to_string(),
        ell: frac.ell(),
        n: frac.n(),
        h: cfg.h,
        theta_deg: run.surface.theta_deg(),
        x_len: run.surface.x_len,
        y_len: run.surface.y_len,
        lemma4_bound: lemma4,
        lemma5_bound: lemma5,
        basic_integrals: run
            .integrals
            .iter()
            .map(|(l, v)| IntegralReport {
                label: l.to_string(),
                value: v,
                error_estimate: run.integrals.error(l).unwrap_or(0.0),
            })
            .collect(),
        selection: run.table4.selection,
        matrix_table4: run.table4.entries.rows(),
        matrix_direct: run.direct.entries.rows(),
        max_path_difference,
        matrix_eigenvalues: run.report4.eigenvalues.clone(),
        direct_eigenvalues: run.report_direct.eigenvalues.clone(),
        max_eigenvalue: run.report4.max_eigenvalue,
        margin: run.report4.margin,
        threshold: run.report4.threshold,
        negative_definite: run.report4.negative_definite,
        direct_negative_definite: run.report_direct.negative_definite,
        cholesky_certified: run.report4.cholesky_certified,
        theorem1_bound: theorem1,
        oracle_negative_count: oracle.as_ref().and_then(|o| o.counts.last().map(|c| c.1)),
        oracle,
        paper_check,
        verified,
        tolerances: Tolerances::from_config(cfg),
        timing: Timing {
            wall_time_s: start.elapsed().as_secs_f64(),
        },
    })
}

/// How a fraction with `n ≤ 9` is settled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterRow {
    pub frac: String,
    pub lemma5_bound: u32,
    pub lemma4_bound: Option<usize>,
    /// `"lemma5"`, `"lemma4"` or `"matrix"`.
    pub settled_by: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceOutcome {
    pub frac: String,
    pub theorem1_bound: Option<u32>,
    pub margin: Option<f64>,
    pub verified: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub h: f64,
    pub n_max: u32,
    pub fractions: Vec<FilterRow>,
    pub lemma5_candidates: Vec<String>,
    pub candidates: Vec<String>,
    pub surfaces: Vec<SurfaceOutcome>,
    pub paper_check: Option<Vec<Check>>,
    /// Every fraction with `n ≤ n_max` has index at least 8.
    pub all_verified: bool,
    pub numerical_failure: bool,
}

pub struct VerifyAll {
    pub summary: Summary,
    pub reports: Vec<SurfaceReport>,
}

pub fn verify_all(cfg: &RunConfig) -> Result<VerifyAll> {
    let n_max = wente_core::spectrum::CANDIDATE_N_MAX;
    let pre = lemma5_candidates();
    let lemma4: Vec<(Fraction, usize)> = pre
        .par_iter()
        .map(|&f| solve_surface(f, cfg).map(|s| (f, lemma4_bound_for_surface(&s))))
        .collect::<Result<_>>()?;
    let candidates: Vec<Fraction> = lemma4
        .iter()
        .filter(|(_, b)| *b < 8)
        .map(|(f, _)| *f)
        .collect();

    let fractions = enumerate_fractions(n_max)
        .into_iter()
        .map(|f| {
            let l5 = lemma5_bound(f);
            let l4 = lemma4.iter().find(|(g, _)| *g == f).map(|(_, b)| *b);
            let settled_by = match l4 {
                None => "lemma5",
                Some(b) if b >= 8 => "lemma4",
                Some(_) => "matrix",
            };
            FilterRow {
                frac: f.to_string(),
                lemma5_bound: l5,
                lemma4_bound: l4,
                settled_by: settled_by.into(),
            }
        })
        .collect();

    let results: Vec<(Fraction, Result<SurfaceReport>)> = candidates
        .par_iter()
        .map(|&f| (f, surface_report(f, cfg)))
        .collect();
    let mut reports = Vec::new();
    let mut surfaces = Vec::new();
    for (f, r) in results {
        match r {
            Ok(rep) => {
                surfaces.push(SurfaceOutcome {
                    frac: f.to_string(),
                    theorem1_bound: rep.theorem1_bound,
                    margin: Some(rep.margin),
                    verified: rep.verified,
                    error: None,
                });
                reports.push(rep);
            }
            Err(e) => surfaces.push(SurfaceOutcome {
                frac: f.to_string(),
                theorem1_bound: None,
                margin: None,
                verified: false,
                error: Some(e.to_string()),
            }),
        }
    }

    let pre_names: Vec<String> = pre.iter().map(ToString::to_string).collect();
    let cand_names: Vec<String> = candidates.iter().map(ToString::to_string).collect();
    let paper_check = cfg.paper_check.then(|| {
        let expected_pre: Vec<String> = reference::PREFILTER
            .iter()
            .map(|(l, n)| format!("{l}/{n}"))
            .collect();
        let expected: Vec<String> = reference::TORI
            .iter()
            .map(|r| format!("{}/{}", r.ell, r.n))
            .collect();
        vec![
            Check {
                item: "nodal pre-filter".into(),
                expected: expected_pre.join(","),
                actual: pre_names.len() as f64,
                tolerance: 0.0,
                pass: expected_pre == pre_names,
            },
            Check {
                item: "candidate surfaces".into(),
                expected: expected.join(","),
                actual: cand_names.len() as f64,
                tolerance: 0.0,
                pass: expected == cand_names,
            },
        ]
    });
    let numerical_failure = surfaces.iter().any(|s| s.error.is_some());
    let all_verified = !numerical_failure
        && surfaces.iter().all(|s| s.verified)
        && paper_check
            .as_ref()
            .map_or(true, |c| c.iter().all(|c| c.pass));
    Ok(VerifyAll {
        summary: Summary {
            h: cfg.h,
            n_max,
            fractions,
            lemma5_candidates: pre_names,
            candidates: cand_names,
            surfaces,
            paper_check,
            all_verified,
            numerical_failure,
        },
        reports,
    })
}
