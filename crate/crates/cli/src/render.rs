//! Plain-text and CSV rendering.

use std::fmt::Write;

use crate::report::{Summary, SurfaceReport};

/// Three significant figures; scientific notation below `1e-3`.
pub fn sig3(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if v.abs() < 1e-3 {
        return format!("{v:.2e}");
    }
    let digits = (2 - v.abs().log10().floor() as i32).max(0) as usize;
    format!("{v:.digits$}")
}

pub fn matrix(rows: &[Vec<f64>]) -> String {
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| r.iter().map(|&v| sig3(v)).collect())
        .collect();
    let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
    let mut out = String::new();
    for row in cells {
        let line: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
        writeln!(out, "  {}", line.join(" ")).unwrap();
    }
    out
}

pub fn eigenvalues(e: &[f64]) -> String {
    e.iter().map(|&v| sig3(v)).collect::<Vec<_>>().join(", ")
}

pub fn surface_text(r: &SurfaceReport) -> String {
    let mut s = String::new();
    writeln!(s, "W_{}  H = {}", r.frac, r.h).unwrap();
    writeln!(
        s,
        "  theta = {:.6} deg  x = {:.6}  y = {:.6}",
        r.theta_deg, r.x_len, r.y_len
    )
    .unwrap();
    writeln!(
        s,
        "  nodal bound {}  eigenvalue-count bound {}",
        r.lemma5_bound, r.lemma4_bound
    )
    .unwrap();
    writeln!(s, "  eigenvalues: {}", eigenvalues(&r.matrix_eigenvalues)).unwrap();
    writeln!(
        s,
        "  max eigenvalue {:.6}  margin {:.6}  path difference {:.2e}",
        r.max_eigenvalue, r.margin, r.max_path_difference
    )
    .unwrap();
    match r.theorem1_bound {
        Some(b) => writeln!(s, "  negative definite: index >= {b}").unwrap(),
        None => writeln!(s, "  not certified negative definite").unwrap(),
    }
    if let Some(o) = &r.oracle {
        let counts: Vec<String> = o.counts.iter().map(|(c, k)| format!("{c}:{k}")).collect();
        writeln!(
            s,
            "  galerkin counts {} (monotone: {})",
            counts.join(" "),
            o.monotone
        )
        .unwrap();
    }
    if let Some(checks) = &r.paper_check {
        let failed: Vec<&str> = checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.item.as_str())
            .collect();
        writeln!(
            s,
            "  reference checks: {}/{} pass",
            checks.len() - failed.len(),
            checks.len()
        )
        .unwrap();
        for f in failed {
            writeln!(s, "    FAIL {f}").unwrap();
        }
    }
    writeln!(s, "  verified: {}", r.verified).unwrap();
    s
}

pub fn summary_text(sum: &Summary) -> String {
    let mut s = String::new();
    writeln!(
        s,
        "fractions with n <= {}: {}",
        sum.n_max,
        sum.fractions.len()
    )
    .unwrap();
    for f in &sum.fractions {
        let l4 = f.lemma4_bound.map_or("-".to_string(), |b| b.to_string());
        writeln!(
            s,
            "  {:>6}  nodal {:>2}  count {:>3}  settled by {}",
            f.frac, f.lemma5_bound, l4, f.settled_by
        )
        .unwrap();
    }
    writeln!(
        s,
        "pre-filter survivors: {}",
        sum.lemma5_candidates.join(", ")
    )
    .unwrap();
    writeln!(s, "candidates: {}", sum.candidates.join(", ")).unwrap();
    for o in &sum.surfaces {
        match &o.error {
            Some(e) => writeln!(s, "  W_{}: error: {e}", o.frac).unwrap(),
            None => writeln!(
                s,
                "  W_{}: index >= {}  margin {:.4}  verified {}",
                o.frac,
                o.theorem1_bound.map_or("?".to_string(), |b| b.to_string()),
                o.margin.unwrap_or(f64::NAN),
                o.verified
            )
            .unwrap(),
        }
    }
    writeln!(s, "all verified: {}", sum.all_verified).unwrap();
    s
}

pub const CSV_HEADER: &str =
    "frac,theta_deg,x_len,y_len,lemma4_bound,lemma5_bound,max_eigenvalue,margin,\
max_path_difference,theorem1_bound,oracle_negative_count,verified";

pub fn surface_csv_row(r: &SurfaceReport) -> String {
    format!(
        "{},{:.9},{:.9},{:.9},{},{},{:.9e},{:.9e},{:.3e},{},{},{}",
        r.frac,
        r.theta_deg,
        r.x_len,
        r.y_len,
        r.lemma4_bound,
        r.lemma5_bound,
        r.max_eigenvalue,
        r.margin,
        r.max_path_difference,
        r.theorem1_bound.map_or(String::new(), |b| b.to_string()),
        r.oracle_negative_count
            .map_or(String::new(), |b| b.to_string()),
        r.verified
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_significant_figures() {
        assert_eq!(sig3(-13.186), "-13.2");
        assert_eq!(sig3(-9.4971), "-9.50");
        assert_eq!(sig3(-0.2512), "-0.251");
        assert_eq!(sig3(123.4), "123");
        assert_eq!(sig3(4.2e-5), "4.20e-5");
        assert_eq!(sig3(0.0), "0");
    }
}
