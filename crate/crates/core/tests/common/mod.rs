#![allow(dead_code)]

use wente_core::operator::default_integral_config;
use wente_core::*;

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

pub fn frac(l: u32, n: u32) -> Fraction {
    Fraction::new(l, n).unwrap()
}

pub struct Built {
    pub frac: Fraction,
    pub surface: WenteSurface,
    pub ctx: PotentialContext,
    pub integrals: BasicIntegralTable,
    pub basis: Table1Basis,
}

pub fn build(l: u32, n: u32) -> Built {
    let f = frac(l, n);
    let surface = WenteSurface::solve(f, DEFAULT_H).unwrap();
    let ctx = PotentialContext::new(&surface).unwrap();
    let integrals = basic_integrals(
        &ctx,
        f,
        &required_integrals(f).unwrap(),
        &default_integral_config(),
    )
    .unwrap();
    let basis = table1_basis(f, surface.x_len, surface.y_len);
    Built {
        frac: f,
        surface,
        ctx,
        integrals,
        basis,
    }
}
