use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use wente_cli::config::{OutputFormat, RunConfig};
use wente_cli::report::{self, verify_all, SurfaceReport};
use wente_cli::{reference, render, CliError};
use wente_core::operator::{definiteness, CANDIDATES};
use wente_core::spectrum::lemma4_bound_for_surface;
use wente_core::{
    assemble_matrix_direct, assemble_matrix_table4, basic_integrals, build_galerkin,
    h_invariance_check, lemma5_bound, negative_count, required_integrals, table1_basis,
    table3_selection, theorem1_bound, Error, Fraction, PotentialContext,
};

#[derive(Parser)]
#[command(
    name = "wente",
    version,
    about = "Morse index bounds for the original Wente tori"
)]
struct Cli {
    /// TOML configuration file; WENTE_* environment variables override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Compare results with the published reference values.
    #[arg(long, global = true)]
    paper_check: bool,
    /// Absolute margin the largest eigenvalue must clear.
    #[arg(long, global = true)]
    min_margin: Option<f64>,
    /// Mean curvature.
    #[arg(long, global = true)]
    h: Option<f64>,
    #[arg(long, global = true)]
    format: Option<OutputFormat>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Table4,
    Direct,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Torus parameters and spectral bounds for the eight candidates.
    Table2,
    /// The 9×9 index matrix of one candidate.
    Matrix {
        surface: String,
        #[arg(long, value_enum, default_value = "table4")]
        mode: Mode,
    },
    /// Basic integrals of one candidate.
    Integrals { surface: String },
    /// Galerkin negative-eigenvalue counts.
    Oracle {
        surface: String,
        #[arg(long)]
        cutoff: Option<u32>,
    },
    /// Full pipeline over every fraction with n ≤ 9.
    VerifyAll {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        oracle_cutoff: Option<u32>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = RunConfig::load(cli.config.as_deref(), std::env::vars())?;
    if cli.paper_check {
        cfg.paper_check = true;
    }
    if let Some(m) = cli.min_margin {
        cfg.min_margin = m;
    }
    if let Some(h) = cli.h {
        cfg.h = h;
    }
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    match cli.command {
        Command::Table2 => table2(&cfg),
        Command::Matrix { surface, mode } => matrix(&cfg, parse_surface(&surface)?, mode),
        Command::Integrals { surface } => integrals(&cfg, parse_surface(&surface)?),
        Command::Oracle { surface, cutoff } => oracle(
            &cfg,
            parse_surface(&surface)?,
            cutoff.unwrap_or(cfg.oracle_cutoff),
        ),
        Command::VerifyAll { out, oracle_cutoff } => {
            if let Some(o) = out {
                cfg.out = Some(o);
            }
            if let Some(c) = oracle_cutoff {
                cfg.oracle_cutoff = c;
            }
            cfg.validate()?;
            verify(&cfg)
        }
    }
}

fn parse_surface(s: &str) -> Result<Fraction, CliError> {
    s.parse().map_err(|e: Error| CliError::Usage(e.to_string()))
}

fn emit(
    cfg: &RunConfig,
    value: serde_json::Value,
    text: String,
    csv: String,
) -> Result<(), CliError> {
    match cfg.format {
        OutputFormat::Json => println!("{}", to_json(&value)?),
        OutputFormat::Csv => print!("{csv}"),
        OutputFormat::Text => print!("{text}"),
    }
    Ok(())
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(v).map_err(|e| CliError::Io(e.into()))
}

fn fail_checks(checks: &[reference::Check]) -> Result<(), CliError> {
    let failed: Vec<&str> = checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| c.item.as_str())
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "reference mismatch: {}",
            failed.join(", ")
        )))
    }
}

fn table2(cfg: &RunConfig) -> Result<(), CliError> {
    let mut rows = Vec::new();
    let mut text = String::from("surface   theta_deg      x_len      y_len  count  nodal\n");
    let mut csv = String::from("frac,theta_deg,x_len,y_len,lemma4_bound,lemma5_bound\n");
    let mut checks = Vec::new();
    let mut failures = Vec::new();
    for (l, n) in CANDIDATES {
        let frac = Fraction::new(l, n)?;
        match report::solve_surface(frac, cfg) {
            Ok(s) => {
                let (l4, l5) = (lemma4_bound_for_surface(&s), lemma5_bound(frac));
                text.push_str(&format!(
                    "{:>7} {:>11.6} {:>10.6} {:>10.6} {:>6} {:>6}\n",
                    frac.to_string(),
                    s.theta_deg(),
                    s.x_len,
                    s.y_len,
                    l4,
                    l5
                ));
                csv.push_str(&format!(
                    "{frac},{:.9},{:.9},{:.9},{l4},{l5}\n",
                    s.theta_deg(),
                    s.x_len,
                    s.y_len
                ));
                rows.push(json!({
                    "frac": frac.to_string(), "theta_deg": s.theta_deg(),
                    "x_len": s.x_len, "y_len": s.y_len,
                    "lemma4_bound": l4, "lemma5_bound": l5,
                }));
                if cfg.paper_check {
                    checks.extend(report::parameter_checks(frac, &s, l4, l5));
                }
            }
            Err(e) => {
                text.push_str(&format!("{:>7} error: {e}\n", frac.to_string()));
                rows.push(json!({ "frac": frac.to_string(), "error": e.to_string() }));
                failures.push((frac, e));
            }
        }
    }
    let mut value = json!({ "rows": rows });
    if cfg.paper_check {
        value["paper_check"] = serde_json::to_value(&checks).map_err(|e| CliError::Io(e.into()))?;
    }
    emit(cfg, value, text, csv)?;
    if let Some((frac, e)) = failures.into_iter().next() {
        eprintln!("W_{frac} failed");
        return Err(e.into());
    }
    fail_checks(&checks)
}

fn matrix(cfg: &RunConfig, frac: Fraction, mode: Mode) -> Result<(), CliError> {
    table3_selection(frac)?;
    let quad = cfg.quadrature();
    let surface = report::solve_surface(frac, cfg)?;
    let ctx = PotentialContext::new(&surface)?;
    let basis = table1_basis(frac, surface.x_len, surface.y_len);
    let closed = if mode != Mode::Direct {
        let table = basic_integrals(&ctx, frac, &required_integrals(frac)?, &quad)?;
        Some(assemble_matrix_table4(frac, &table, &basis)?)
    } else {
        None
    };
    let direct = if mode != Mode::Table4 {
        Some(assemble_matrix_direct(frac, &ctx, &basis, &quad)?)
    } else {
        None
    };
    let primary = closed
        .as_ref()
        .or(direct.as_ref())
        .expect("at least one path");
    let rep = definiteness(&primary.entries, cfg.threshold(primary.entries.max_norm()));
    let discrepancy = closed
        .as_ref()
        .zip(direct.as_ref())
        .map(|(a, b)| a.max_abs_difference(b));
    let direct_rep = direct
        .as_ref()
        .map(|d| definiteness(&d.entries, cfg.threshold(d.entries.max_norm())));

    let mut text = format!("W_{frac}  selection {:?}\n", primary.selection);
    for (name, m) in [("closed form", &closed), ("direct", &direct)] {
        if let Some(m) = m {
            text.push_str(&format!("{name}:\n{}", render::matrix(&m.entries.rows())));
        }
    }
    text.push_str(&format!(
        "eigenvalues: {}\n",
        render::eigenvalues(&rep.eigenvalues)
    ));
    if let Some(d) = discrepancy {
        text.push_str(&format!("max discrepancy: {d:.3e}\n"));
    }
    let bound = theorem1_bound(&rep);
    text.push_str(&match bound {
        Some(b) => format!(
            "negative definite (margin {:.6}): index >= {b}\n",
            rep.margin
        ),
        None => format!(
            "NOT negative definite (max eigenvalue {:.6}, threshold {:.3e})\n",
            rep.max_eigenvalue, rep.threshold
        ),
    });
    let mut csv = String::new();
    for row in primary.entries.rows() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.12e}")).collect();
        csv.push_str(&cells.join(","));
        csv.push('\n');
    }
    let value = json!({
        "frac": frac.to_string(),
        "selection": primary.selection,
        "matrix_table4": closed.as_ref().map(|m| m.entries.rows()),
        "matrix_direct": direct.as_ref().map(|m| m.entries.rows()),
        "definiteness": rep,
        "direct_definiteness": direct_rep,
        "max_discrepancy": discrepancy,
        "theorem1_bound": bound,
    });
    emit(cfg, value, text, csv)?;
    if !rep.negative_definite || direct_rep.as_ref().is_some_and(|d| !d.negative_definite) {
        return Err(CliError::Verification(format!(
            "W_{frac} matrix is not negative definite"
        )));
    }
    if let Some(d) = discrepancy {
        if d >= cfg.path_tolerance {
            return Err(CliError::Verification(format!("paths disagree by {d:.3e}")));
        }
    }
    if cfg.paper_check {
        let mut checks = Vec::new();
        if let (Some(c), Some(d)) = (&closed, &direct) {
            checks.extend(report::matrix_checks(frac, c, d));
        }
        checks.push(reference::Check {
            item: format!("W_{frac} margin"),
            expected: format!("> {}", reference::MIN_MARGIN),
            actual: rep.margin,
            tolerance: reference::MIN_MARGIN,
            pass: rep.margin > reference::MIN_MARGIN,
        });
        fail_checks(&checks)?;
    }
    Ok(())
}

fn integrals(cfg: &RunConfig, frac: Fraction) -> Result<(), CliError> {
    let surface = report::solve_surface(frac, cfg)?;
    let ctx = PotentialContext::new(&surface)?;
    let table = basic_integrals(&ctx, frac, &required_integrals(frac)?, &cfg.quadrature())?;
    let mut text = format!("W_{frac}\n");
    let mut csv = String::from("label,value,error_estimate\n");
    let mut rows = Vec::new();
    for (label, v) in table.iter() {
        let err = table.error(label).unwrap_or(0.0);
        text.push_str(&format!(
            "  {:<8} {v:>14.8}  (err {err:.1e})\n",
            label.to_string()
        ));
        csv.push_str(&format!("{label},{v:.15e},{err:.3e}\n"));
        rows.push(json!({ "label": label.to_string(), "value": v, "error_estimate": err }));
    }
    emit(
        cfg,
        json!({ "frac": frac.to_string(), "integrals": rows }),
        text,
        csv,
    )?;
    if cfg.paper_check {
        fail_checks(&report::integral_checks(frac, &table))?;
    }
    Ok(())
}

fn oracle(cfg: &RunConfig, frac: Fraction, cutoff: u32) -> Result<(), CliError> {
    if cutoff < 2 {
        return Err(CliError::Usage("--cutoff must be at least 2".into()));
    }
    let surface = report::solve_surface(frac, cfg)?;
    let ctx = PotentialContext::new(&surface)?;
    let quad = cfg.quadrature();
    let counts = (2..=cutoff)
        .map(|c| build_galerkin(&ctx, &surface, c, &quad).map(|p| (c, negative_count(&p))))
        .collect::<wente_core::Result<Vec<_>>>()?;
    let monotone = counts.windows(2).all(|w| w[0].1 <= w[1].1);
    let invariant = h_invariance_check(frac, cutoff.min(4))?;
    let mut text = format!("W_{frac}\n");
    let mut csv = String::from("cutoff,negative_count\n");
    for (c, k) in &counts {
        text.push_str(&format!("  cutoff {c}: {k} negative\n"));
        csv.push_str(&format!("{c},{k}\n"));
    }
    text.push_str(&format!(
        "monotone: {monotone}\nh_invariance: {invariant}\n"
    ));
    let value = json!({
        "frac": frac.to_string(), "counts": counts,
        "monotone": monotone, "h_invariance": invariant,
    });
    emit(cfg, value, text, csv)?;
    if !monotone || !invariant {
        return Err(CliError::Verification(format!(
            "W_{frac} oracle counts inconsistent"
        )));
    }
    Ok(())
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents)?;
    Ok(())
}

fn verify(cfg: &RunConfig) -> Result<(), CliError> {
    let all = verify_all(cfg)?;
    let reports: &[SurfaceReport] = &all.reports;
    let csv = {
        let mut s = format!("{}\n", render::CSV_HEADER);
        for r in reports {
            s.push_str(&render::surface_csv_row(r));
            s.push('\n');
        }
        s
    };
    let text = {
        let mut s: String = reports.iter().map(render::surface_text).collect();
        s.push_str(&render::summary_text(&all.summary));
        s
    };
    match &cfg.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            match cfg.format {
                OutputFormat::Json => {
                    for r in reports {
                        let name = format!("W_{}.json", r.frac.replace('/', "_"));
                        write_file(&dir.join(name), &to_json(r)?)?;
                    }
                    write_file(&dir.join("summary.json"), &to_json(&all.summary)?)?;
                }
                OutputFormat::Csv => write_file(&dir.join("summary.csv"), &csv)?,
                OutputFormat::Text => write_file(&dir.join("summary.txt"), &text)?,
            }
            print!("{}", render::summary_text(&all.summary));
        }
        None => match cfg.format {
            OutputFormat::Json => println!(
                "{}",
                to_json(&json!({ "summary": all.summary, "surfaces": reports }))?
            ),
            OutputFormat::Csv => print!("{csv}"),
            OutputFormat::Text => print!("{text}"),
        },
    }
    if all.summary.numerical_failure {
        let errs: Vec<String> = all
            .summary
            .surfaces
            .iter()
            .filter_map(|s| s.error.as_ref().map(|e| format!("W_{}: {e}", s.frac)))
            .collect();
        return Err(CliError::Numerical(Error::Domain(errs.join("; "))));
    }
    if !all.summary.all_verified {
        return Err(CliError::Verification(
            "not every surface was verified".into(),
        ));
    }
    Ok(())
}
