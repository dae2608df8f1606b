//! Numerical lower bounds for the Morse index of the original Wente tori.
//!
//! The pipeline runs from the period problem (which fixes the torus
//! parameters for a reduced fraction `ℓ/n ∈ (1, 2)`), through the flat-torus
//! Laplace spectrum and the Jacobi operator `L = -Δ - V`, to a certificate that
//! a 9×9 restriction of the second-variation form is negative definite. An
//! independent Fourier–Galerkin discretisation of `L` cross-checks the result.
//!
//! # Modulus convention
//!
//! Every elliptic function here takes the *modulus* `k` (Walter's convention),
//! not the parameter `m = k²`. In Mathematica notation `cn_k` as used here is
//! `JacobiCN[u, k^2]`: "cn_k in [Wa] is equivalent to cn_{k²} in Mathematica".
//! Square or un-square accordingly when comparing against parameter-convention
//! references.

pub mod elliptic;
pub mod error;
pub mod linalg;
pub mod operator;
pub mod oracle;
pub mod params;
pub mod quadrature;
pub mod roots;
pub mod spectrum;

pub use elliptic::{elliptic_k, jacobi_cn, JacobiCn, Modulus};
pub use error::{Error, Result};
pub use operator::{
    assemble_matrix_direct, assemble_matrix_table4, basic_integrals, definiteness,
    required_integrals, table3_selection, theorem1_bound, BasicIntegralTable, DefinitenessReport,
    IndexMatrix, IntegralLabel, PotentialContext,
};
pub use oracle::{build_galerkin, h_invariance_check, negative_count, GalerkinProblem};
pub use params::{
    enumerate_fractions, lattice, period_residual, periods, solve_theta, theta_bar_constant,
    Fraction, Lattice, WenteParams, WenteSurface,
};
pub use quadrature::{integrate_1d, integrate_2d, Integral, QuadratureConfig, Rect};
pub use spectrum::{
    candidate_surfaces, flat_eigenpairs, lemma4_bound, lemma5_bound, table1_basis, FlatEigenpair,
    Parity, Table1Basis,
};

/// Mean curvature used for every shipped reproduction.
pub const DEFAULT_H: f64 = 0.5;
