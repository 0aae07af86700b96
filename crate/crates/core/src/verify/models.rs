//! Suites over configurations, finite models and the model constructions.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::constructions::{
    build_companion_model, distinguish_witness, extract_kernel_block, image_complete_extend_step, realize_diagonal,
};
use crate::diagonalize::system::{ke_sym, validate_triangular, Binding, DiagonalSystem, KeRow, LdRow, TriangularSystem};
use crate::diagonalize::term::{LinearTerm, Sym};
use crate::factor::irreducible_factors;
use crate::field::Field;
use crate::kernel_config::{normalize, ConstraintSystem, Equation, KernelConfiguration, Normalized, Val};
use crate::linalg::{unit_vector, Matrix, Subspace, Vector};
use crate::model::EndoModel;
use crate::poly::{gcd_bezout, Poly};
use crate::random;

use super::algebra::witness;
use super::Ctx;

fn eq(field: Field, lhs: &[&[i64]], rhs: &[&[i64]]) -> Equation {
    let side = |s: &[&[i64]]| vec![s.iter().map(|c| Poly::from_ints(field, c)).collect::<Vec<_>>()];
    Equation { lhs: side(lhs), rhs: side(rhs) }
}

/// Random combination of a subspace basis.
fn random_member(rng: &mut impl Rng, s: &Subspace) -> Vector {
    let field = s.field();
    let mut v = vec![field.zero(); s.ambient()];
    for b in s.basis() {
        let c = random::scalar(rng, field);
        for (x, y) in v.iter_mut().zip(b) {
            *x = &*x + &(&c * y);
        }
    }
    v
}

fn fixed_normalization_examples(ctx: &mut Ctx) {
    let q = Field::Q;
    let cases: Vec<(&str, Vec<Equation>, Option<KernelConfiguration>)> = vec![
        (
            "two-polynomial theory",
            vec![eq(q, &[&[1, 0, 3, 1, 2, 1]], &[&[0]]), eq(q, &[&[4, 1, 4, 1]], &[&[0]])],
            Some(KernelConfiguration::from_mipo(&Poly::from_ints(q, &[1, 0, 1])).expect("irreducible")),
        ),
        ("inconsistent pair", vec![eq(q, &[&[0, 1]], &[&[0]]), eq(q, &[&[0, 1]], &[&[1]])], None),
        ("empty theory", vec![], Some(KernelConfiguration::c_infinity(q))),
        (
            "kernel chain",
            vec![eq(q, &[&[0, 0, 1]], &[&[0, 0, 0, 1]])],
            Some(KernelConfiguration::transcendental(q, Val::Inf, [(Poly::x(q), Val::Fin(2))]).expect("valid")),
        ),
    ];
    for (name, equations, expected) in cases {
        ctx.case();
        let got = normalize(&ConstraintSystem { field: q, equations });
        let want = match expected {
            Some(c) => Normalized::Consistent(c),
            None => Normalized::Inconsistent,
        };
        ctx.check(got.as_ref().ok() == Some(&want), || format!("{name}: got {got:?}"));
    }
    ctx.case();
    let lin = normalize(&ConstraintSystem { field: q, equations: vec![eq(q, &[&[3, 1]], &[&[0]])] });
    ctx.check(lin.ok().and_then(|n| n.config().map(|c| c.is_trivial())) == Some(true), || {
        "linear theory is not flagged trivial".into()
    });
}

/// Worked examples, idempotence of normalization, and the partial order.
pub fn normalization(ctx: &mut Ctx) {
    fixed_normalization_examples(ctx);
    for field in ctx.fields.clone() {
        for t in 0..ctx.trials {
            ctx.case();
            let tag = format!("{field}, case {t}");
            let cs: Vec<KernelConfiguration> = (0..3).map(|_| random::config(&mut ctx.rng, field)).collect();
            if let Ok(theory) = cs[0].canonical_theory() {
                let back = normalize(&theory);
                ctx.check(back.as_ref().ok().and_then(|n| n.config()) == Some(&cs[0]), || {
                    format!("{tag}: {} does not survive normalization ({back:?})", cs[0])
                });
            }
            let leq = |a: &KernelConfiguration, b: &KernelConfiguration| a.leq(b).expect("same field");
            ctx.check(cs.iter().all(|c| leq(c, c)), || format!("{tag}: order not reflexive"));
            for a in &cs {
                for b in &cs {
                    if leq(a, b) && leq(b, a) {
                        ctx.check(a == b, || format!("{tag}: {a} and {b} are mutually below each other"));
                    }
                    for c in &cs {
                        if leq(a, b) && leq(b, c) {
                            ctx.check(leq(a, c), || format!("{tag}: order not transitive"));
                        }
                    }
                }
            }
            ctx.check(leq(&KernelConfiguration::c_zero(field), &cs[1]) || cs[1].is_algebraic(), || {
                format!("{tag}: C_0 is not below {}", cs[1])
            });
            ctx.check(leq(&cs[1], &KernelConfiguration::c_infinity(field)), || format!("{tag}: C_inf is not maximal"));
            // Witnesses of the smaller configuration satisfy the larger one.
            let (a, b) = (&cs[0], &cs[1]);
            let m = witness(ctx, a);
            ctx.check(m.is_c_endomorphism(a).unwrap_or(false), || format!("{tag}: witness of {a} rejected"));
            if leq(a, b) {
                ctx.check(m.is_c_endomorphism(b).unwrap_or(false), || format!("{tag}: {a} <= {b} but witness fails {b}"));
            }
        }
    }
}

/// Kernel and image calculus of single polynomials on arbitrary models.
pub fn operator_identities(ctx: &mut Ctx) {
    let max = ctx.max_dim.min(10);
    for field in ctx.fields.clone() {
        for t in 0..ctx.trials {
            ctx.case();
            let tag = format!("{field}, case {t}");
            let m = random::any_model(&mut ctx.rng, field, max);
            let nonzero = |rng: &mut rand_chacha::ChaCha8Rng| loop {
                let p = random::poly(rng, field, 3);
                if !p.is_zero() {
                    return p;
                }
            };
            let (r1, r2) = (nonzero(&mut ctx.rng), nonzero(&mut ctx.rng));
            let ker = |p: &Poly| m.kernel_basis(p).expect("same field");
            let im = |p: &Poly| m.image_basis(p).expect("same field");
            let apply = |p: &Poly| m.poly_apply(p).expect("same field");

            ctx.check(ker(&r2).map(&apply(&r1)).is_subspace_of(&ker(&r2)), || format!("{tag}: kernel not invariant"));
            ctx.check(im(&r2).map(&apply(&r1)).is_subspace_of(&im(&r2)), || format!("{tag}: image not invariant"));
            ctx.check(ker(&r1).sum(&ker(&r2)) == ker(&r1.lcm(&r2)), || format!("{tag}: kernel sum is not Ker(lcm)"));
            ctx.check(ker(&r1).intersection(&ker(&r2)) == ker(&r1.gcd(&r2)), || {
                format!("{tag}: kernel intersection is not Ker(gcd)")
            });
            ctx.check(im(&r1).intersection(&im(&r2)) == im(&r1.lcm(&r2)), || {
                format!("{tag}: image intersection is not Im(lcm)")
            });
            ctx.check(im(&r1).sum(&im(&r2)) == im(&r1.gcd(&r2)), || format!("{tag}: image sum is not Im(gcd)"));

            // Kernel chains: once stable, stable forever.
            let n = m.dim() as u32;
            let stable = (0..=n).find(|&k| ker(&r1.pow(k)) == ker(&r1.pow(k + 1))).unwrap_or(n);
            let top = ker(&r1.pow(stable));
            ctx.check((1..=3).all(|j| ker(&r1.pow(stable + j)) == top), || format!("{tag}: kernel chain not stable"));

            // Coprime pairs: r1 restricted to Ker(r2) is inverted by a polynomial.
            if let Some(chi) = r1.inv_mod(&r2.monic()) {
                let k2 = ker(&r2);
                let a = apply(&chi).mul(&apply(&r1));
                ctx.check(k2.basis().iter().all(|v| a.mul_vec(v) == *v), || format!("{tag}: no polynomial inverse"));
                ctx.check(k2.is_subspace_of(&im(&r1)), || format!("{tag}: Ker(r2) not inside Im(r1)"));
            }

            let (quo, rem) = r1.divmod(&r2);
            ctx.check(apply(&r1) == apply(&rem).add(&apply(&quo).mul(&apply(&r2))), || {
                format!("{tag}: division identity fails as matrices")
            });
            if let Ok((g, chis)) = gcd_bezout(&[r1.clone(), r2.clone()]) {
                let lhs = apply(&chis[0]).mul(&apply(&r1)).add(&apply(&chis[1]).mul(&apply(&r2)));
                ctx.check(apply(&g) == lhs, || format!("{tag}: Bezout identity fails as matrices"));
            } else {
                ctx.fail(format!("{tag}: gcd failed"));
            }
        }
    }
}

fn set_of(fs: &[Poly]) -> BTreeSet<Poly> {
    fs.iter().cloned().collect()
}

/// Direct sums, projections and partial inverses on image-complete witnesses.
pub fn projection_decomposition(ctx: &mut Ctx) {
    for field in ctx.fields.clone() {
        for t in 0..ctx.trials {
            ctx.case();
            let tag = format!("{field}, case {t}");
            let c = random::config(&mut ctx.rng, field);
            let zeros = random::zero_value_polys(&mut ctx.rng, &c);
            let m = witness(ctx, &c);
            let n = m.dim();
            let id = Matrix::identity(field, n);
            let f1 = random::kernel_subset(&mut ctx.rng, &c);
            let f2 = random::kernel_subset(&mut ctx.rng, &c);
            let fc = |fs: &BTreeSet<Poly>| c.f_power_product(fs).expect("finite values");
            let im = |p: &Poly| m.image_basis(p).expect("same field");
            let ker = |p: &Poly| m.kernel_basis(p).expect("same field");

            let (i1, k1) = (im(&fc(&f1)), ker(&fc(&f1)));
            ctx.check(i1.dim() + k1.dim() == n && i1.intersection(&k1).dim() == 0, || {
                format!("{tag}: Im and Ker of F^C are not complementary")
            });
            let mut total = i1.clone();
            let mut dims = i1.dim();
            for f in &f1 {
                let k = ker(&fc(&set_of(std::slice::from_ref(f))));
                dims += k.dim();
                total = total.sum(&k);
            }
            ctx.check(dims == n && total.dim() == n, || format!("{tag}: kernel summands do not decompose V"));
            let u: BTreeSet<Poly> = f1.union(&f2).cloned().collect();
            let mut rhs = im(&fc(&u));
            let mut rdims = rhs.dim();
            for f in f2.difference(&f1) {
                let k = ker(&fc(&set_of(std::slice::from_ref(f))));
                rdims += k.dim();
                rhs = rhs.sum(&k);
            }
            ctx.check(rhs == i1 && rdims == i1.dim(), || format!("{tag}: Im(F1^C) does not split over F2"));

            // Im(η) = Im(F^C) when F^C | η and the remaining factors have value 0.
            let mut eta = fc(&f1);
            for f in &f1 {
                if ctx.rng.gen_bool(0.5) {
                    eta = &eta * f;
                }
            }
            if let Some(z) = zeros.choose(&mut ctx.rng) {
                eta = &eta * z;
            }
            ctx.check(im(&eta) == i1, || format!("{tag}: Im({eta}) differs from Im(F^C)"));

            let (Some(p1), Some(p2), Some(pu)) = (
                ctx.ok(m.proj_im(&f1, &c), || format!("{tag}: proj_im F1")),
                ctx.ok(m.proj_im(&f2, &c), || format!("{tag}: proj_im F2")),
                ctx.ok(m.proj_im(&u, &c), || format!("{tag}: proj_im F1 u F2")),
            ) else {
                continue;
            };
            ctx.check(p1.mul(&p1) == p1, || format!("{tag}: image projection not idempotent"));
            ctx.check(p1.mul(&p2) == pu && p2.mul(&p1) == pu, || format!("{tag}: image projections do not compose"));
            let mut sum = p1.clone();
            for f in &f1 {
                let k = m.proj_ker(&set_of(std::slice::from_ref(f)), &c).expect("legal set");
                ctx.check(k.mul(&k) == k, || format!("{tag}: kernel projection not idempotent"));
                sum = sum.add(&k);
            }
            ctx.check(sum == id, || format!("{tag}: projection identity fails"));

            let d = random::denominator(&mut ctx.rng, &c, &zeros);
            let fac: BTreeSet<Poly> = irreducible_factors(&d)
                .map(|v| v.into_iter().filter(|f| c.finite_positive().contains(f)).collect())
                .unwrap_or_default();
            if let Some(inv) = ctx.ok(m.inv_eta(&d, &c), || format!("{tag}: inverse of {d}")) {
                let lhs = m.poly_apply(&d).expect("same field").mul(&inv);
                ctx.check(Some(lhs) == m.proj_im(&fac, &c).ok(), || format!("{tag}: eta times its inverse"));
            }

            // Generators act on a closed subspace as they act on the restricted model.
            let seeds: Vec<Vector> = (0..2).map(|_| random::vector(&mut ctx.rng, field, n)).collect();
            if n > 0 {
                if let Some(sub) = ctx.ok(m.c_closure(&c, &seeds), || format!("{tag}: closure")) {
                    if sub.dim() > 0 {
                        let b = sub.basis_matrix();
                        let small = b.solve_matrix(&m.theta().mul(&b)).and_then(|t| EndoModel::new(t).ok());
                        match small {
                            Some(s) => {
                                let glob = m.proj_im(&f1, &c).expect("legal").mul(&b);
                                let loc = s.proj_im(&f1, &c).map(|p| b.mul(&p));
                                ctx.check(loc.ok() == Some(glob), || format!("{tag}: projection differs on subspace"));
                                let glob = m.inv_eta(&d, &c).expect("legal").mul(&b);
                                let loc = s.inv_eta(&d, &c).map(|p| b.mul(&p));
                                ctx.check(loc.ok() == Some(glob), || format!("{tag}: inverse differs on subspace"));
                            }
                            None => ctx.fail(format!("{tag}: closure is not invariant")),
                        }
                    }
                }
            }
        }
    }
}

fn syms(prefix: &str, k: usize) -> Sym {
    Sym::new(prefix, &[k + 1])
}

/// Builders, separating witnesses, and realization followed by extraction.
pub fn constructions(ctx: &mut Ctx) {
    for field in ctx.fields.clone() {
        for t in 0..ctx.trials {
            ctx.case();
            let tag = format!("{field}, case {t}");
            let c1 = random::config(&mut ctx.rng, field);
            let c2 = if ctx.rng.gen_bool(0.2) { c1.clone() } else { random::config(&mut ctx.rng, field) };
            match distinguish_witness(&c1, &c2) {
                Ok(w) => {
                    let a = w.is_c_endomorphism(&c1).unwrap_or(false);
                    let b = w.is_c_endomorphism(&c2).unwrap_or(false);
                    ctx.check(a != b, || format!("{tag}: witness does not separate {c1} and {c2}"));
                }
                Err(crate::Error::EqualConfigs) => ctx.check(c1 == c2, || format!("{tag}: distinct configs called equal")),
                Err(crate::Error::NoFiniteWitness) => {}
                Err(e) => ctx.fail(format!("{tag}: witness search failed: {e}")),
            }

            let g = random::irreducible(&mut ctx.rng, field, 2);
            let copies = ctx.rng.gen_range(1..=2);
            if let Some(m) = ctx.ok(build_companion_model(&g.pow(2), copies), || format!("{tag}: companion")) {
                ctx.check(m.minimal_polynomial() == g.pow(2), || format!("{tag}: companion minimal polynomial"));
                let cg = KernelConfiguration::algebraic(field, [(g.clone(), 2)]).expect("positive");
                ctx.check(m.is_c_endomorphism(&cg).unwrap_or(false), || format!("{tag}: companion not a C-endomorphism"));
            }

            // Realize a random diagonal system and read its kernel block back.
            let c = random::transcendental_config(&mut ctx.rng, field);
            let Some(f) = c.finite_positive().into_iter().next() else { continue };
            let cf = c.value(&f).finite().expect("finite");
            let base = random::witness_model(&mut ctx.rng, &c, 8);
            let mut values = BTreeMap::new();
            let mut ke = Vec::new();
            for k in 0..ctx.rng.gen_range(1..=2) {
                let q = ctx.rng.gen_range(1..=cf);
                let kb = base.kernel_basis(&f.pow(cf - q)).expect("same field");
                let v = random_member(&mut ctx.rng, &kb);
                values.insert(syms("u", k), v);
                ke.push(KeRow { f: f.clone(), q, u: LinearTerm::constant(field, syms("u", k)) });
            }
            let mut ld = Vec::new();
            let infinite: Vec<Poly> = c.exceptions().iter().filter(|(_, v)| **v == Val::Inf).map(|(f, _)| f.clone()).collect();
            if let Some(h) = infinite.first() {
                values.insert(syms("w", 0), random::vector(&mut ctx.rng, field, base.dim()));
                ld.push(LdRow { xi: h.clone(), p: vec![], u: LinearTerm::constant(field, syms("w", 0)) });
            }
            let s = DiagonalSystem { config: c.clone(), li: 0, ld, ke, binding: Some(Binding { model: base, values }) };
            let Some(r) = ctx.ok(realize_diagonal(&s), || format!("{tag}: realize")) else { continue };
            let w: Vec<Vector> = (0..s.ke.len()).map(|k| r.witness[&ke_sym(k)].clone()).collect();
            if let Some(e) = ctx.ok(extract_kernel_block(&r.model, r.base_dim, &w, &c, &f), || format!("{tag}: extract")) {
                let bounded = e.block.rows.iter().zip(&s.ke).all(|(a, b)| a.q <= b.q);
                ctx.check(bounded, || format!("{tag}: extracted exponents exceed the input"));
                let tri = TriangularSystem {
                    config: c.clone(),
                    li: 0,
                    ld: vec![],
                    blocks: vec![e.block],
                    binding: Some(Binding { model: r.model.clone(), values: e.constants }),
                };
                ctx.check(validate_triangular(&tri).is_ok(), || format!("{tag}: extracted block is invalid"));
            }
        }
    }
}

/// The attainable parts of the image-completion step: the target moves into the next
/// image, the old model is an invariant summand of the coordinates, and the dimension
/// grows by `deg f`.
pub fn image_completion(ctx: &mut Ctx) {
    for field in ctx.fields.clone() {
        for t in 0..ctx.trials {
            ctx.case();
            let tag = format!("{field}, case {t}");
            let Some((m, c, f, v)) = extension_case(&mut ctx.rng, field) else {
                ctx.fail(format!("{tag}: no deficient vector found"));
                continue;
            };
            let n = m.dim();
            let k = c.value(&f).finite().expect("finite");
            let Some(out) = ctx.ok(image_complete_extend_step(&m, &c, &f, &v), || format!("{tag}: extension step")) else {
                continue;
            };
            let d = f.deg().unwrap_or(0);
            ctx.check(out.dim() == n + d, || format!("{tag}: dimension grew by {} not {d}", out.dim() - n));
            let restricts = (0..n).all(|i| (0..n).all(|j| out.theta().get(i, j) == m.theta().get(i, j)))
                && (n..out.dim()).all(|i| (0..n).all(|j| out.theta().get(i, j).is_zero()));
            ctx.check(restricts, || format!("{tag}: extension does not restrict to the input"));
            let mut vp = v.clone();
            vp.resize(out.dim(), field.zero());
            let img = out.image_basis(&f.pow(k + 1)).expect("same field");
            ctx.check(img.contains(&vp), || format!("{tag}: target not in the next image"));
            let old: Vec<Vector> = (0..n).map(|i| unit_vector(field, out.dim(), i)).collect();
            let old = Subspace::from_vectors(field, out.dim(), &old);
            let before = m.image_basis(&f.pow(k + 1)).expect("same field").dim();
            ctx.check(img.intersection(&old).dim() > before, || format!("{tag}: image did not grow"));
        }
    }
}

/// A transcendental configuration, a model, an irreducible `f` with finite value `k`, and
/// `v ∈ Im(f^k) \ Im(f^{k+1})`. The model carries a companion block of `f^{k+j}`, `j ≥ 1`.
pub fn extension_case(
    rng: &mut impl Rng,
    field: Field,
) -> Option<(EndoModel, KernelConfiguration, Poly, Vector)> {
    let f = random::irreducible(rng, field, 2);
    let k = rng.gen_range(0..=2);
    let c = KernelConfiguration::transcendental(field, Val::Inf, [(f.clone(), Val::Fin(k))]).ok()?;
    let j = rng.gen_range(1..=2);
    let mut m = build_companion_model(&f.pow(k + j), 1).ok()?;
    if rng.gen_bool(0.5) {
        let g = random::distinct_irreducibles(rng, field, 1, 2, &[f.clone()].into()).pop()?;
        m = m.direct_sum(&build_companion_model(&g, 1).ok()?).ok()?;
    }
    if rng.gen_bool(0.5) {
        m = random::conjugate(rng, &m);
    }
    let big = m.image_basis(&f.pow(k)).ok()?;
    let small = m.image_basis(&f.pow(k + 1)).ok()?;
    for _ in 0..20 {
        let v = random_member(rng, &big);
        if !small.contains(&v) {
            return Some((m, c, f, v));
        }
    }
    None
}
