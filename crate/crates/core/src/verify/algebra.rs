//! Suites over the ring of definable operators.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::factor::irreducible_factors;
use crate::field::Field;
use crate::kernel_config::{KernelConfiguration, Val};
use crate::linalg::Matrix;
use crate::model::EndoModel;
use crate::poly::Poly;
use crate::random;
use crate::ring::{canonicalize, iso_split, Expr, Generator, RingElem};

use super::Ctx;

/// Evaluates an expression directly from the model primitives, bypassing canonical forms.
pub(crate) fn eval_expr(m: &EndoModel, c: &KernelConfiguration, e: &Expr) -> crate::Result<Matrix> {
    let n = m.dim();
    let field = m.field();
    match e {
        Expr::Gen(Generator::Rho(p)) => m.poly_apply(p),
        Expr::Gen(Generator::ProjIm(fs)) => m.proj_im(fs, c),
        Expr::Gen(Generator::ProjKer(fs)) => m.proj_ker(fs, c),
        Expr::Gen(Generator::Inv(eta)) => m.inv_eta(eta, c),
        Expr::Add(args) => {
            let mut acc = Matrix::zero(field, n, n);
            for a in args {
                acc = acc.add(&eval_expr(m, c, a)?);
            }
            Ok(acc)
        }
        Expr::Mul(args) => {
            let mut acc = Matrix::identity(field, n);
            for a in args {
                acc = acc.mul(&eval_expr(m, c, a)?);
            }
            Ok(acc)
        }
    }
}

fn mul2(a: Expr, b: Expr) -> Expr {
    Expr::Mul(vec![a, b])
}

fn rho(p: Poly) -> Expr {
    Expr::rho(p)
}

fn proj_im(fs: &BTreeSet<Poly>) -> Expr {
    Expr::Gen(Generator::ProjIm(fs.clone()))
}

fn proj_ker(fs: &BTreeSet<Poly>) -> Expr {
    Expr::Gen(Generator::ProjKer(fs.clone()))
}

fn inv(eta: Poly) -> Expr {
    Expr::inv(eta)
}

/// `Fac(η) ∩ {0 < C < ∞}`.
fn finite_factors(c: &KernelConfiguration, eta: &Poly) -> crate::Result<BTreeSet<Poly>> {
    let e = c.finite_positive();
    Ok(irreducible_factors(eta)?.into_iter().filter(|f| e.contains(f)).collect())
}

fn f_power(c: &KernelConfiguration, f: &Poly) -> Poly {
    f.pow(c.value(f).finite().expect("finite value"))
}

/// CRT oracle: the polynomial that is `a_f` modulo `f^C` for each listed `f`.
fn crt_oracle(field: Field, c: &KernelConfiguration, parts: &[(Poly, Poly)]) -> crate::Result<Poly> {
    let moduli: Vec<(Poly, Poly)> = parts.iter().map(|(f, a)| (a.clone(), f_power(c, f))).collect();
    if moduli.is_empty() {
        return Ok(Poly::one(field));
    }
    Poly::crt(field, &moduli)
}

/// One instance of an identity: a product on the left, and right-hand sides it must equal.
struct Instance {
    lhs: Vec<Expr>,
    rhs: Vec<Expr>,
}

fn instance(id: usize, rng: &mut impl Rng, c: &KernelConfiguration, zeros: &[Poly]) -> crate::Result<Instance> {
    let field = c.field();
    let f1 = random::kernel_subset(rng, c);
    let f2 = random::kernel_subset(rng, c);
    let inst = match id {
        1 => {
            let (a, b) = (random::poly(rng, field, 3), random::poly(rng, field, 3));
            Instance { rhs: vec![rho(&a * &b)], lhs: vec![rho(a), rho(b)] }
        }
        2 => {
            let r = &c.f_power_product(&f1)? * &random::poly(rng, field, 2);
            Instance { lhs: vec![rho(r.clone()), proj_im(&f1)], rhs: vec![rho(r)] }
        }
        3 => {
            let p = random::poly(rng, field, 6);
            let r = p.rem(&c.f_power_product(&f1)?);
            Instance { lhs: vec![rho(p), proj_ker(&f1)], rhs: vec![mul2(rho(r), proj_ker(&f1))] }
        }
        4 => {
            let eta = random::denominator(rng, c, zeros);
            let mut p = random::poly(rng, field, 2);
            if let Some(f) = irreducible_factors(&eta)?.choose(rng) {
                if rng.gen_bool(0.6) {
                    p = &p * f;
                }
            }
            let g = p.gcd(&eta);
            let g = if g.is_zero() { eta.clone() } else { g };
            let fac = finite_factors(c, &eta)?;
            Instance {
                lhs: vec![rho(p.clone()), inv(eta.clone())],
                rhs: vec![Expr::Mul(vec![rho(p.quo(&g)), inv(eta.quo(&g).monic()), proj_im(&fac)])],
            }
        }
        5 => {
            let u: BTreeSet<Poly> = f1.union(&f2).cloned().collect();
            Instance { lhs: vec![proj_im(&f1), proj_im(&f2)], rhs: vec![proj_im(&u)] }
        }
        6 => {
            let diff: BTreeSet<Poly> = f2.difference(&f1).cloned().collect();
            let parts: Vec<(Poly, Poly)> = f2
                .iter()
                .map(|f| (f.clone(), if f1.contains(f) { Poly::zero(field) } else { Poly::one(field) }))
                .collect();
            let chi = crt_oracle(field, c, &parts)?;
            Instance { lhs: vec![proj_im(&f1), proj_ker(&f2)], rhs: vec![proj_ker(&diff), mul2(rho(chi), proj_ker(&f2))] }
        }
        7 => {
            let eta = random::denominator(rng, c, zeros);
            let fs: BTreeSet<Poly> = finite_factors(c, &eta)?.into_iter().filter(|_| rng.gen_bool(0.6)).collect();
            Instance { lhs: vec![proj_im(&fs), inv(eta.clone())], rhs: vec![inv(eta)] }
        }
        8 => {
            let both: BTreeSet<Poly> = f1.intersection(&f2).cloned().collect();
            let parts: Vec<(Poly, Poly)> = f2
                .iter()
                .map(|f| (f.clone(), if f1.contains(f) { Poly::one(field) } else { Poly::zero(field) }))
                .collect();
            let chi = crt_oracle(field, c, &parts)?;
            Instance { lhs: vec![proj_ker(&f1), proj_ker(&f2)], rhs: vec![proj_ker(&both), mul2(rho(chi), proj_ker(&f2))] }
        }
        9 => {
            let eta = random::denominator(rng, c, zeros);
            let mut parts = Vec::new();
            for f in &f1 {
                let fc = f_power(c, f);
                let a = if f.divides(&eta) { Poly::zero(field) } else { eta.inv_mod(&fc).expect("coprime") };
                parts.push((f.clone(), a));
            }
            let chi = crt_oracle(field, c, &parts)?;
            Instance { lhs: vec![proj_ker(&f1), inv(eta)], rhs: vec![mul2(rho(chi), proj_ker(&f1))] }
        }
        10 => {
            let a = random::denominator(rng, c, zeros);
            let b = random::denominator(rng, c, zeros);
            Instance { rhs: vec![inv(&a * &b)], lhs: vec![inv(a), inv(b)] }
        }
        _ => unreachable!("ten identities"),
    };
    Ok(inst)
}

/// A witness model for `c`, with a random change of basis half of the time.
pub(crate) fn witness(ctx: &mut Ctx, c: &KernelConfiguration) -> EndoModel {
    let max_dim = ctx.max_dim;
    let m = random::witness_model(&mut ctx.rng, c, max_dim);
    if m.dim() > 0 && ctx.rng.gen_bool(0.5) {
        random::conjugate(&mut ctx.rng, &m)
    } else {
        m
    }
}

/// The ten rewrite identities, by canonical forms and by matrices on witness models.
pub fn ring_identities(ctx: &mut Ctx) {
    for id in 1..=10 {
        for field in ctx.fields.clone() {
            for t in 0..ctx.trials {
                ctx.case();
                let tag = format!("identity {id}, {field}, case {t}");
                let c = random::config(&mut ctx.rng, field);
                let zeros = random::zero_value_polys(&mut ctx.rng, &c);
                let inst = instance(id, &mut ctx.rng, &c, &zeros);
                let Some(inst) = ctx.ok(inst, || tag.clone()) else { continue };
                let lhs = Expr::Mul(inst.lhs.clone());
                let rev = Expr::Mul(inst.lhs.iter().rev().cloned().collect());
                let Some(canon) = ctx.ok(canonicalize(&c, &lhs), || format!("{tag}: left side")) else { continue };
                let Some(canon_rev) = ctx.ok(canonicalize(&c, &rev), || format!("{tag}: reversed")) else { continue };
                ctx.check(canon == canon_rev, || format!("{tag}: product does not commute"));
                for (j, r) in inst.rhs.iter().enumerate() {
                    if let Some(cr) = ctx.ok(canonicalize(&c, r), || format!("{tag}: right side {j}")) {
                        ctx.check(cr == canon, || format!("{tag}: canonical forms differ ({canon} vs {cr})"));
                    }
                }
                let m = witness(ctx, &c);
                if !matches!(m.is_image_complete(&c), Ok(true)) {
                    ctx.fail(format!("{tag}: witness model is not image-complete"));
                    continue;
                }
                let Some(ml) = ctx.ok(eval_expr(&m, &c, &lhs), || format!("{tag}: evaluating left side")) else { continue };
                if let Some(mr) = ctx.ok(eval_expr(&m, &c, &rev), || format!("{tag}: evaluating reversed")) {
                    ctx.check(ml == mr, || format!("{tag}: matrices do not commute"));
                }
                for (j, r) in inst.rhs.iter().enumerate() {
                    if let Some(mr) = ctx.ok(eval_expr(&m, &c, r), || format!("{tag}: evaluating right side {j}")) {
                        ctx.check(ml == mr, || format!("{tag}: matrices differ for right side {j}"));
                    }
                }
                if let Some(mc) = ctx.ok(canon.eval_on_model(&m), || format!("{tag}: evaluating canonical form")) {
                    ctx.check(ml == mc, || format!("{tag}: canonical form evaluates differently"));
                }
            }
        }
    }
}

/// Image part of `r` as a reduced fraction, `None` for algebraic configurations.
fn fraction(r: &RingElem) -> Option<(Poly, Poly)> {
    r.im_part().cloned()
}

/// A witness on which two distinct canonical elements must differ: companion blocks of
/// `f^C` for every `f` in `{0 < C < ∞}` plus, for differing image parts, one block of an
/// infinite-value irreducible that does not divide the cross difference.
fn separating_model(rng: &mut impl Rng, r: &RingElem, s: &RingElem) -> Option<EndoModel> {
    let c = r.config();
    let field = c.field();
    let mut blocks: Vec<Poly> = c.finite_positive().iter().map(|f| f_power(c, f)).collect();
    if let (Some((p1, e1)), Some((p2, e2))) = (fraction(r), fraction(s)) {
        let diff = &(&p1 * &e2) - &(&p2 * &e1);
        if !diff.is_zero() {
            let avoid: BTreeSet<Poly> = c.exceptions().keys().cloned().collect();
            let mut cands: Vec<Poly> =
                c.exceptions().iter().filter(|(_, v)| **v == Val::Inf).map(|(f, _)| f.clone()).collect();
            if c.default_value() == Val::Inf {
                let d = diff.deg().unwrap_or(0) + 1;
                cands.extend(random::distinct_irreducibles(rng, field, 3, d.max(1), &avoid));
            }
            let g = cands.into_iter().find(|g| !g.divides(&diff))?;
            blocks.push(g);
        }
    }
    let mut m = EndoModel::empty(field);
    for b in blocks {
        m = m.direct_sum(&crate::constructions::build_companion_model(&b, 1).ok()?).ok()?;
    }
    Some(m)
}

/// Ring axioms, the evaluation homomorphism, separation and the split isomorphisms.
pub fn ring_axioms(ctx: &mut Ctx) {
    for field in ctx.fields.clone() {
        for t in 0..ctx.trials {
            ctx.case();
            let tag = format!("{field}, case {t}");
            let c = random::config(&mut ctx.rng, field);
            let zeros = random::zero_value_polys(&mut ctx.rng, &c);
            let [r, s, u] = [0, 1, 2].map(|_| random::ring_elem(&mut ctx.rng, &c, &zeros));
            let one = RingElem::one(&c);
            let zero = RingElem::zero(&c);
            let add = |a: &RingElem, b: &RingElem| a.add(b).expect("same config");
            let mul = |a: &RingElem, b: &RingElem| a.mul(b).expect("same config");
            ctx.check(mul(&r, &s) == mul(&s, &r), || format!("{tag}: multiplication not commutative"));
            ctx.check(mul(&mul(&r, &s), &u) == mul(&r, &mul(&s, &u)), || format!("{tag}: not associative"));
            ctx.check(mul(&r, &add(&s, &u)) == add(&mul(&r, &s), &mul(&r, &u)), || format!("{tag}: not distributive"));
            ctx.check(mul(&r, &one) == r && add(&r, &zero) == r, || format!("{tag}: identities"));
            ctx.check(add(&r, &r.neg()) == zero, || format!("{tag}: additive inverse"));

            let m = witness(ctx, &c);
            let ev = |x: &RingElem| x.eval_on_model(&m);
            if let (Ok(er), Ok(es), Ok(e1)) = (ev(&r), ev(&s), ev(&one)) {
                ctx.check(e1 == Matrix::identity(field, m.dim()), || format!("{tag}: identity does not evaluate to I"));
                ctx.check(ev(&mul(&r, &s)).ok() == Some(er.mul(&es)), || format!("{tag}: evaluation not multiplicative"));
                ctx.check(ev(&add(&r, &s)).ok() == Some(er.add(&es)), || format!("{tag}: evaluation not additive"));
            } else {
                ctx.fail(format!("{tag}: evaluation failed on a witness"));
            }

            if let (Some((p1, e1)), Some((p2, e2))) = (fraction(&r), fraction(&s)) {
                let same = (&p1 * &e2) == (&p2 * &e1);
                ctx.check(same == (p1 == p2 && e1 == e2), || format!("{tag}: image parts not reduced fractions"));
            }
            if r != s {
                if let Some(w) = separating_model(&mut ctx.rng, &r, &s) {
                    ctx.check(r.eval_on_model(&w).ok() != s.eval_on_model(&w).ok(), || {
                        format!("{tag}: distinct elements {r} and {s} agree on the separating model")
                    });
                }
            }

            let fs = random::kernel_subset(&mut ctx.rng, &c);
            if let Some(iso) = ctx.ok(iso_split(&c, &fs), || format!("{tag}: split")) {
                let fwd = |x: &RingElem| iso.forward(x).expect("same config");
                let (a, b) = (fwd(&r), fwd(&s));
                ctx.check(iso.backward(&a).ok() == Some(r.clone()), || format!("{tag}: split does not invert"));
                let prod = fwd(&mul(&r, &s));
                let comps_ok = prod.parts.iter().zip(a.parts.iter().zip(&b.parts)).zip(&iso.split).all(|((p, (x, y)), f)| {
                    *p == (x * y).rem(&f_power(&c, f))
                });
                let rest_ok = match (&prod.rest, &a.rest, &b.rest) {
                    (Some(p), Some(x), Some(y)) => *p == mul(x, y),
                    (None, None, None) => true,
                    _ => false,
                };
                ctx.check(comps_ok && rest_ok, || format!("{tag}: split is not multiplicative"));
            }
        }
    }
}

/// Algebraic configurations against arithmetic in `K[X]/(MiPo)` recovered by CRT.
pub fn quotient_ring(ctx: &mut Ctx) {
    for field in ctx.fields.clone() {
        for k in 0..3 {
            let c = random::algebraic_config(&mut ctx.rng, field);
            let mipo = c.mipo().expect("algebraic");
            let to_quotient = |r: &RingElem| -> crate::Result<Poly> {
                let parts: Vec<(Poly, Poly)> = r.ker_parts().iter().map(|(f, a)| (a.clone(), f_power(&c, f))).collect();
                Poly::crt(field, &parts)
            };
            let d = mipo.deg().unwrap_or(1);
            for t in 0..ctx.trials {
                ctx.case();
                let tag = format!("{field}, config {k} ({c}), pair {t}");
                let a = random::poly(&mut ctx.rng, field, 2 * d);
                let b = random::poly(&mut ctx.rng, field, 2 * d);
                let mut ea = rho(a.clone());
                let mut oracle_a = a.rem(&mipo);
                // Half the time, divide by a unit of the quotient ring.
                if ctx.rng.gen_bool(0.5) {
                    let deg = ctx.rng.gen_range(1..=2);
                    let eta = random::monic(&mut ctx.rng, field, deg);
                    if let Some(i) = eta.inv_mod(&mipo) {
                        ea = mul2(ea, inv(eta));
                        oracle_a = (&oracle_a * &i).rem(&mipo);
                    }
                }
                let (Some(ra), Some(rb)) = (
                    ctx.ok(canonicalize(&c, &ea), || format!("{tag}: left operand")),
                    ctx.ok(canonicalize(&c, &rho(b.clone())), || format!("{tag}: right operand")),
                ) else {
                    continue;
                };
                let keys: BTreeSet<Poly> = ra.ker_parts().keys().cloned().collect();
                ctx.check(keys == c.support(), || format!("{tag}: kernel keys are not the support"));
                let sum = ra.add(&rb).and_then(|x| to_quotient(&x));
                let prod = ra.mul(&rb).and_then(|x| to_quotient(&x));
                ctx.check(to_quotient(&ra).ok() == Some(oracle_a.clone()), || format!("{tag}: operand differs"));
                ctx.check(sum.ok() == Some((&oracle_a + &b).rem(&mipo)), || format!("{tag}: sum differs"));
                ctx.check(prod.ok() == Some((&oracle_a * &b).rem(&mipo)), || format!("{tag}: product differs"));
            }
        }
    }
}

