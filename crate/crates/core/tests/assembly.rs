mod common;

use common::{build, frac, CANDIDATES};
use wente_core::operator::{default_integral_config, default_threshold};
use wente_core::*;

#[test]
fn closed_form_and_direct_assembly_agree() {
    for (l, n) in CANDIDATES {
        let b = build(l, n);
        let m4 = assemble_matrix_table4(b.frac, &b.integrals, &b.basis).unwrap();
        let md =
            assemble_matrix_direct(b.frac, &b.ctx, &b.basis, &default_integral_config()).unwrap();
        let diff = m4.max_abs_difference(&md);
        assert!(diff < 5e-3, "{l}/{n}: {diff}");
        assert!(diff < 1e-7, "{l}/{n}: {diff}");
        assert_eq!(m4.selection, md.selection);
    }
}

#[test]
fn every_candidate_matrix_is_negative_definite() {
    for (l, n) in CANDIDATES {
        let b = build(l, n);
        let m = assemble_matrix_table4(b.frac, &b.integrals, &b.basis).unwrap();
        let r = definiteness(&m.entries, default_threshold(&m.entries));
        assert!(
            r.negative_definite && r.cholesky_certified,
            "{l}/{n}: {:?}",
            r.eigenvalues
        );
        assert!(r.margin > 0.1, "{l}/{n}: margin {}", r.margin);
        assert_eq!(theorem1_bound(&r), Some(8));
    }
}

#[test]
fn three_halves_matrix_is_diagonal_with_expected_entries() {
    let b = build(3, 2);
    let m = assemble_matrix_table4(b.frac, &b.integrals, &b.basis).unwrap();
    let i0 = |a, c| b.integrals.get(IntegralLabel::I0 { a, b: c }).unwrap();
    for i in 0..9 {
        for j in 0..9 {
            if i != j {
                assert_eq!(m.entries.get(i, j), 0.0);
            }
        }
    }
    assert_eq!(m.by_table_index(1, 1), Some(-32.0 * i0(0, 0)));
    let alpha4 = b.basis.alpha(4);
    let expected = alpha4 - 64.0 * (i0(0, 0) - i0(0, 2));
    assert!((m.by_table_index(4, 4).unwrap() - expected).abs() < 1e-14);
    // Eigenvalues of a diagonal matrix are its diagonal.
    let mut diag: Vec<f64> = (0..9).map(|i| m.entries.get(i, i)).collect();
    diag.sort_by(f64::total_cmp);
    let r = definiteness(&m.entries, 0.0);
    for (a, e) in diag.iter().zip(&r.eigenvalues) {
        assert!((a - e).abs() < 1e-12);
    }
}

#[test]
fn direct_constant_entry_is_mean_potential() {
    let b = build(3, 2);
    let md = assemble_matrix_direct(b.frac, &b.ctx, &b.basis, &default_integral_config()).unwrap();
    let i00 = b.integrals.get(IntegralLabel::I0 { a: 0, b: 0 }).unwrap();
    assert!((md.by_table_index(1, 1).unwrap() + 32.0 * i00).abs() < 1e-8);
}

#[test]
fn direct_assembly_is_deterministic() {
    let b = build(14, 9);
    let cfg = default_integral_config();
    let m1 = assemble_matrix_direct(b.frac, &b.ctx, &b.basis, &cfg).unwrap();
    let m2 = assemble_matrix_direct(b.frac, &b.ctx, &b.basis, &cfg).unwrap();
    assert_eq!(m1, m2);
}

#[test]
fn unknown_surfaces_are_rejected() {
    let f = frac(7, 5);
    assert_eq!(table3_selection(f).unwrap_err(), Error::UnknownSurface(f));
    let s = WenteSurface::solve(f, DEFAULT_H).unwrap();
    let ctx = PotentialContext::new(&s).unwrap();
    let basis = table1_basis(f, s.x_len, s.y_len);
    assert!(assemble_matrix_direct(f, &ctx, &basis, &default_integral_config()).is_err());
}

#[test]
fn strict_threshold_withholds_the_bound() {
    let b = build(4, 3);
    let m = assemble_matrix_table4(b.frac, &b.integrals, &b.basis).unwrap();
    let r = definiteness(&m.entries, 100.0);
    assert!(!r.negative_definite);
    assert_eq!(theorem1_bound(&r), None);
}
