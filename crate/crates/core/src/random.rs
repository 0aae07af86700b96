//! Seeded generators for polynomials, configurations, witness models and ring elements.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::constructions::build_companion_model;
use crate::diagonalize::rcf::build_b;
use crate::factor::is_irreducible;
use crate::field::{Field, Scalar};
use crate::kernel_config::{KernelConfiguration, Val};
use crate::linalg::{Matrix, Vector};
use crate::model::EndoModel;
use crate::poly::Poly;
use crate::ring::{canonicalize, Expr, RingElem};

pub fn scalar(rng: &mut impl Rng, field: Field) -> Scalar {
    field.int(rng.gen_range(-3..=3))
}

pub fn vector(rng: &mut impl Rng, field: Field, n: usize) -> Vector {
    (0..n).map(|_| scalar(rng, field)).collect()
}

/// Coefficients in `-3..=3`, degree at most `max_deg` (possibly zero).
pub fn poly(rng: &mut impl Rng, field: Field, max_deg: usize) -> Poly {
    let d = rng.gen_range(0..=max_deg);
    Poly::new(field, (0..=d).map(|_| scalar(rng, field)).collect())
}

pub fn monic(rng: &mut impl Rng, field: Field, deg: usize) -> Poly {
    let mut c: Vec<Scalar> = (0..deg).map(|_| scalar(rng, field)).collect();
    c.push(field.one());
    Poly::new(field, c)
}

/// Monic irreducible of degree in `1..=max_deg`; falls back to a linear polynomial.
pub fn irreducible(rng: &mut impl Rng, field: Field, max_deg: usize) -> Poly {
    for _ in 0..40 {
        let d = rng.gen_range(1..=max_deg.max(1));
        let f = monic(rng, field, d);
        if is_irreducible(&f).unwrap_or(false) {
            return f;
        }
    }
    monic(rng, field, 1)
}

/// `count` distinct monic irreducibles avoiding `avoid`.
pub fn distinct_irreducibles(
    rng: &mut impl Rng,
    field: Field,
    count: usize,
    max_deg: usize,
    avoid: &BTreeSet<Poly>,
) -> Vec<Poly> {
    let mut out: Vec<Poly> = Vec::new();
    let mut tries = 0;
    while out.len() < count && tries < 200 {
        tries += 1;
        let f = irreducible(rng, field, max_deg);
        if !avoid.contains(&f) && !out.contains(&f) {
            out.push(f);
        }
    }
    out
}

pub fn algebraic_config(rng: &mut impl Rng, field: Field) -> KernelConfiguration {
    let n = rng.gen_range(1..=3);
    let fs = distinct_irreducibles(rng, field, n, 2, &BTreeSet::new());
    let ex: Vec<(Poly, u32)> = fs.into_iter().map(|f| (f, rng.gen_range(1..=2))).collect();
    KernelConfiguration::algebraic(field, ex).expect("positive multiplicities")
}

/// Transcendental configuration with one to three exceptions, at least one of which has
/// a finite positive value.
pub fn transcendental_config(rng: &mut impl Rng, field: Field) -> KernelConfiguration {
    let default = if rng.gen_bool(0.5) { Val::Inf } else { Val::Fin(0) };
    let n = rng.gen_range(1..=3);
    let fs = distinct_irreducibles(rng, field, n, 2, &BTreeSet::new());
    let ex: Vec<(Poly, Val)> = fs
        .into_iter()
        .enumerate()
        .map(|(i, f)| {
            let v = if i == 0 {
                Val::Fin(rng.gen_range(1..=2))
            } else {
                *[Val::Fin(0), Val::Fin(1), Val::Fin(2), Val::Inf].choose(rng).expect("nonempty")
            };
            (f, v)
        })
        .collect();
    KernelConfiguration::transcendental(field, default, ex).expect("valid exceptions")
}

pub fn config(rng: &mut impl Rng, field: Field) -> KernelConfiguration {
    if rng.gen_bool(0.3) {
        algebraic_config(rng, field)
    } else {
        transcendental_config(rng, field)
    }
}

/// Irreducibles of value 0 usable in denominators (never factors of a witness model).
pub fn zero_value_polys(rng: &mut impl Rng, c: &KernelConfiguration) -> Vec<Poly> {
    let mut out: Vec<Poly> = c.exceptions().iter().filter(|(_, v)| **v == Val::Fin(0)).map(|(f, _)| f.clone()).collect();
    if c.default_value() == Val::Fin(0) {
        let avoid: BTreeSet<Poly> = c.exceptions().keys().cloned().collect();
        out.extend(distinct_irreducibles(rng, c.field(), 2, 2, &avoid));
    }
    out
}

/// Irreducibles of infinite value, for free blocks of transcendental witness models.
fn infinite_value_polys(rng: &mut impl Rng, c: &KernelConfiguration) -> Vec<Poly> {
    let mut out: Vec<Poly> = c.exceptions().iter().filter(|(_, v)| **v == Val::Inf).map(|(f, _)| f.clone()).collect();
    if c.default_value() == Val::Inf {
        let avoid: BTreeSet<Poly> = c.exceptions().keys().cloned().collect();
        out.extend(distinct_irreducibles(rng, c.field(), 1, 2, &avoid));
    }
    out
}

/// A C-image-complete model of dimension at most `max_dim` built from companion blocks of
/// `f^j` (`j ≤ C(f)`) and, for transcendental configurations, of powers of infinite-value
/// irreducibles. Every finite positive `f` gets at least one block when it fits.
pub fn witness_model(rng: &mut impl Rng, c: &KernelConfiguration, max_dim: usize) -> EndoModel {
    let field = c.field();
    let mut blocks: Vec<Poly> = Vec::new();
    for f in c.finite_positive() {
        let cap = c.value(&f).finite().expect("finite");
        for _ in 0..rng.gen_range(1..=2) {
            blocks.push(f.pow(rng.gen_range(1..=cap)));
        }
    }
    if c.is_transcendental() {
        for g in infinite_value_polys(rng, c) {
            if rng.gen_bool(0.7) {
                blocks.push(g.pow(rng.gen_range(1..=2)));
            }
        }
    }
    blocks.shuffle(rng);
    let mut m = EndoModel::empty(field);
    for b in blocks {
        let d = b.deg().unwrap_or(0);
        if d == 0 || m.dim() + d > max_dim {
            continue;
        }
        m = m.direct_sum(&build_companion_model(&b, 1).expect("positive degree")).expect("same field");
    }
    m
}

/// A random change of basis applied to a model.
pub fn conjugate(rng: &mut impl Rng, m: &EndoModel) -> EndoModel {
    let n = m.dim();
    let field = m.field();
    loop {
        let rows: Vec<Vector> = (0..n).map(|_| vector(rng, field, n)).collect();
        let p = Matrix::from_rows(field, rows).expect("square");
        if let Ok(inv) = p.inverse() {
            return EndoModel::new(inv.mul(m.theta()).mul(&p)).expect("square");
        }
    }
}

/// A model with a random integer matrix, no configuration constraints.
pub fn any_model(rng: &mut impl Rng, field: Field, max_dim: usize) -> EndoModel {
    let n = rng.gen_range(1..=max_dim.max(1));
    let rows: Vec<Vector> = (0..n).map(|_| vector(rng, field, n)).collect();
    EndoModel::new(Matrix::from_rows(field, rows).expect("square")).expect("square")
}

/// A random subset of `{0 < C < ∞}`.
pub fn kernel_subset(rng: &mut impl Rng, c: &KernelConfiguration) -> BTreeSet<Poly> {
    c.finite_positive().into_iter().filter(|_| rng.gen_bool(0.5)).collect()
}

/// Monic denominator whose factors have finite value.
pub fn denominator(rng: &mut impl Rng, c: &KernelConfiguration, zero_polys: &[Poly]) -> Poly {
    let mut pool: Vec<Poly> = c.finite_positive().into_iter().collect();
    pool.extend(zero_polys.iter().cloned());
    if c.is_algebraic() {
        pool.extend(c.support());
    }
    let mut eta = Poly::one(c.field());
    if pool.is_empty() {
        return eta;
    }
    for _ in 0..rng.gen_range(0..=2) {
        eta = &eta * pool.choose(rng).expect("nonempty");
    }
    eta
}

pub fn generator_expr(rng: &mut impl Rng, c: &KernelConfiguration, zero_polys: &[Poly]) -> Expr {
    match rng.gen_range(0..4) {
        0 => Expr::rho(poly(rng, c.field(), 3)),
        1 => Expr::proj_im(kernel_subset(rng, c)),
        2 => Expr::proj_ker(kernel_subset(rng, c)),
        _ => Expr::inv(denominator(rng, c, zero_polys)),
    }
}

pub fn expr(rng: &mut impl Rng, c: &KernelConfiguration, zero_polys: &[Poly], depth: usize) -> Expr {
    if depth == 0 || rng.gen_bool(0.4) {
        return generator_expr(rng, c, zero_polys);
    }
    let args = (0..rng.gen_range(2..=3)).map(|_| expr(rng, c, zero_polys, depth - 1)).collect();
    if rng.gen_bool(0.5) { Expr::Add(args) } else { Expr::Mul(args) }
}

pub fn ring_elem(rng: &mut impl Rng, c: &KernelConfiguration, zero_polys: &[Poly]) -> RingElem {
    canonicalize(c, &expr(rng, c, zero_polys, 2)).expect("generated generators are legal")
}

/// Block matrix of the triangular shape: monic `ζ_k` of degree `1..=max_deg`, couplings
/// below the diagonal with degree under `deg ζ_l`.
pub fn triangular_block(rng: &mut impl Rng, field: Field, rows: usize, max_deg: usize) -> (Vec<Poly>, Vec<Vec<Poly>>) {
    let zetas: Vec<Poly> = (0..rows)
        .map(|_| {
            let d = rng.gen_range(1..=max_deg);
            monic(rng, field, d)
        })
        .collect();
    let q: Vec<Vec<Poly>> = (0..rows)
        .map(|k| {
            (0..k)
                .map(|l| {
                    let d = zetas[l].deg().unwrap_or(1);
                    if rng.gen_bool(0.3) { Poly::zero(field) } else { poly(rng, field, d - 1) }
                })
                .collect()
        })
        .collect();
    debug_assert!(build_b(&zetas, &q).is_ok());
    (zetas, q)
}
