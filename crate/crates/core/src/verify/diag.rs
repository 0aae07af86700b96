//! Suites for the canonical form of block matrices and the diagonalization of systems.

use std::collections::BTreeMap;

use rand::Rng;

use crate::constructions::build_companion_model;
use crate::diagonalize::block::{diagonalize_block, xp_sym, DiagonalizedBlock};
use crate::diagonalize::pipeline::{diagonalize_system, verify_block_on_model};
use crate::diagonalize::rcf::{build_b, rcf};
use crate::diagonalize::system::{derive_t_terms, Binding, FBlock, TriRow, TriangularSystem};
use crate::diagonalize::term::{LinearTerm, Sym};
use crate::factor::irreducible_factors;
use crate::field::{Field, Scalar};
use crate::kernel_config::{KernelConfiguration, Val};
use crate::linalg::{Matrix, Vector};
use crate::model::EndoModel;
use crate::poly::Poly;
use crate::random;
use crate::Error;

use super::Ctx;

fn product(ps: &[Poly], field: Field) -> Poly {
    ps.iter().fold(Poly::one(field), |a, p| &a * p)
}

fn factor_set(ps: &[Poly]) -> crate::Result<std::collections::BTreeSet<Poly>> {
    let mut out = std::collections::BTreeSet::new();
    for p in ps {
        out.extend(irreducible_factors(p)?);
    }
    Ok(out)
}

/// Invariant factors of random block matrices against independent facts about them.
pub fn rcf_suite(ctx: &mut Ctx) {
    for field in ctx.fields.clone() {
        for t in 0..ctx.trials {
            ctx.case();
            let tag = format!("{field}, case {t}");
            let rows = ctx.rng.gen_range(1..=4);
            let (zetas, q) = random::triangular_block(&mut ctx.rng, field, rows, 3);
            let mut b = build_b(&zetas, &q).expect("generated shape");
            if ctx.rng.gen_bool(0.3) {
                b = random::conjugate(&mut ctx.rng, &EndoModel::new(b).expect("square")).theta().clone();
            }
            let Some(r) = ctx.ok(rcf(&b), || tag.clone()) else { continue };
            let chain = r.xis.windows(2).all(|w| w[0].divides(&w[1]));
            ctx.check(chain, || format!("{tag}: invariant factors do not form a divisibility chain"));
            ctx.check(r.xis.iter().all(|x| x.is_monic() && x.deg().is_some_and(|d| d > 0)), || {
                format!("{tag}: invariant factor not monic of positive degree")
            });
            // The block shape makes the characteristic polynomial the product of the diagonal.
            ctx.check(product(&r.xis, field) == product(&zetas, field), || {
                format!("{tag}: product of invariant factors is not the characteristic polynomial")
            });
            let mipo = EndoModel::new(b.clone()).expect("square").minimal_polynomial();
            ctx.check(r.xis.last() == Some(&mipo), || format!("{tag}: last invariant factor is not {mipo}"));
            let canon = r.canonical_matrix().expect("positive degrees");
            ctx.check(r.a_inv.mul(&b).mul(&r.a) == canon, || format!("{tag}: similarity fails"));
            ctx.check(r.a.mul(&r.a_inv) == Matrix::identity(field, b.rows()), || format!("{tag}: A is not inverted"));
            ctx.check(factor_set(&r.xis).ok() == factor_set(&zetas).ok(), || format!("{tag}: factor sets differ"));
        }
    }
}

/// Coordinates of a term's variable part over the monomials `θ^j(x'_l)`, `j < deg ξ_l`.
fn coordinates(t: &LinearTerm, xis: &[Poly]) -> Vec<Scalar> {
    let mut out = Vec::new();
    for (l, xi) in xis.iter().enumerate() {
        let p = t.var_coeff(&xp_sym(l));
        for j in 0..xi.deg().unwrap_or(0) {
            out.push(p.coeff(j));
        }
    }
    out
}

fn independent_checks(blk: &DiagonalizedBlock) -> Result<(), String> {
    let field = blk.field();
    if product(&blk.xis, field) != product(&blk.zetas, field) {
        return Err("degree product differs".into());
    }
    let coupled = blk.q.iter().flatten().any(|p| !p.is_zero());
    if coupled && !blk.xis.windows(2).all(|w| w[0].divides(&w[1])) {
        return Err("outputs of a coupled block do not form a chain".into());
    }
    if !coupled && blk.xis != blk.zetas {
        return Err("uncoupled block was changed".into());
    }
    let mut rows = Vec::new();
    for row in &blk.tau {
        for t in row {
            for (l, xi) in blk.xis.iter().enumerate() {
                if t.var_degree(&xp_sym(l)).is_some_and(|d| d >= xi.deg().unwrap_or(0)) {
                    return Err(format!("substitution {t} is not bounded"));
                }
            }
            rows.push(coordinates(&t.var_part(), &blk.xis));
        }
    }
    let count = rows.len();
    if count > 0 && Matrix::from_rows(field, rows).map(|m| m.rank()) != Ok(count) {
        return Err("substitutions are dependent at zero constants".into());
    }
    Ok(())
}

fn worked_example(ctx: &mut Ctx) {
    ctx.case();
    let q = |c: &[i64]| Poly::from_ints(Field::Q, c);
    match diagonalize_block(&[q(&[0, 1]), q(&[0, 1])], &[vec![], vec![q(&[1])]]) {
        Ok(blk) => {
            let ok = blk.xis == vec![q(&[0, 0, 1])]
                && blk.mu[0].to_string() == "y1 + θ(y2)"
                && blk.tau[0][0].to_string() == "θ(x'1) - y2"
                && blk.tau[1][0].to_string() == "x'1";
            ctx.check(ok, || format!("worked example: got ξ = {:?}, μ = {}", blk.xis, blk.mu[0]));
        }
        Err(e) => ctx.fail(format!("worked example: {e}")),
    }
}

/// Random triangular blocks: symbolic checks plus numeric roundtrips on random models.
pub fn block_diagonalization(ctx: &mut Ctx) {
    worked_example(ctx);
    for field in ctx.fields.clone() {
        for t in 0..ctx.trials {
            ctx.case();
            let tag = format!("{field}, case {t}");
            let rows = ctx.rng.gen_range(1..=4);
            let (zetas, q) = random::triangular_block(&mut ctx.rng, field, rows, 3);
            let Some(blk) = ctx.ok(diagonalize_block(&zetas, &q), || tag.clone()) else { continue };
            if let Err(e) = crate::diagonalize::block::check_block(&blk) {
                ctx.fail(format!("{tag}: {e}"));
            }
            if let Err(e) = independent_checks(&blk) {
                ctx.fail(format!("{tag}: {e}"));
            }
            let m = random::any_model(&mut ctx.rng, field, 6);
            match verify_block_on_model(&blk, &m, 2, &mut ctx.rng) {
                Ok(c) => ctx.check(c.passed(), || format!("{tag}: roundtrip failures {:?}", c.failures)),
                Err(e) => ctx.fail(format!("{tag}: roundtrip error {e}")),
            }
        }
    }
}

/// A kernel block `f^{q_k}[θ](x_k) = Σ Q_{k,l}[θ](x_l) + y_k` and whether `f^C` kills its
/// block matrix (the independent closure oracle).
struct KernelCase {
    f: Poly,
    c: u32,
    rows: Vec<TriRow>,
    closed: bool,
}

fn kernel_case(rng: &mut impl Rng, field: Field) -> KernelCase {
    let f = random::irreducible(rng, field, 2);
    let c = rng.gen_range(1..=3);
    let m = rng.gen_range(1..=3);
    let qs: Vec<u32> = (0..m).map(|_| rng.gen_range(1..=c)).collect();
    let zetas: Vec<Poly> = qs.iter().map(|&q| f.pow(q)).collect();
    let coeffs: Vec<Vec<Poly>> = (0..m)
        .map(|k| {
            (0..k)
                .map(|l| {
                    let bound = zetas[l].deg().unwrap_or(1);
                    if rng.gen_bool(0.5) { Poly::zero(field) } else { random::poly(rng, field, bound - 1) }
                })
                .collect()
        })
        .collect();
    let b = build_b(&zetas, &coeffs).expect("generated shape");
    let closed = EndoModel::new(b).and_then(|m| m.poly_apply(&f.pow(c))).is_ok_and(|x| x.is_zero());
    let rows = qs
        .iter()
        .zip(coeffs)
        .enumerate()
        .map(|(k, (&q, cs))| TriRow { q, coeffs: cs, u: LinearTerm::constant(field, Sym::new("u", &[k + 1])) })
        .collect();
    KernelCase { f, c, rows, closed }
}

fn sub(a: &[Scalar], b: &[Scalar]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Kernel blocks: exponent bounds of the outputs, kernel membership of the new constants,
/// and agreement of the closure detector with the oracle.
pub fn kernel_block_diagonalization(ctx: &mut Ctx) {
    for field in ctx.fields.clone() {
        let mut done = 0;
        let mut attempts = 0;
        while done < ctx.trials && attempts < 40 * ctx.trials.max(1) {
            attempts += 1;
            let case = kernel_case(&mut ctx.rng, field);
            let tag = format!("{field}, attempt {attempts}");
            let detected = derive_t_terms(&case.f, case.c, &case.rows).is_ok();
            ctx.check(detected == case.closed, || {
                format!("{tag}: closure detector says {detected}, oracle says {}", case.closed)
            });
            let config = KernelConfiguration::transcendental(field, Val::Inf, [(case.f.clone(), Val::Fin(case.c))])
                .expect("valid");
            let mut sys = TriangularSystem {
                config: config.clone(),
                li: 0,
                ld: vec![],
                blocks: vec![FBlock { f: case.f.clone(), rows: case.rows.clone() }],
                binding: None,
            };
            if !case.closed {
                ctx.case();
                let err = diagonalize_system(&sys);
                ctx.check(matches!(&err, Err(Error::InvalidSystem(s)) if s.starts_with("t-term closure")), || {
                    format!("{tag}: unclosed block not rejected by name: {err:?}")
                });
                continue;
            }
            done += 1;
            ctx.case();
            // Constants from actual solutions inside Ker(f^C) of a witness.
            let fc = case.f.pow(case.c);
            let mut w = build_companion_model(&fc, 2).expect("positive degree");
            if ctx.rng.gen_bool(0.5) {
                let g = random::distinct_irreducibles(&mut ctx.rng, field, 1, 2, &[case.f.clone()].into());
                if let Some(g) = g.first() {
                    w = w.direct_sum(&build_companion_model(g, 1).expect("positive degree")).expect("same field");
                }
            }
            let kb = w.kernel_basis(&fc).expect("same field");
            let xs: Vec<Vector> = case
                .rows
                .iter()
                .map(|_| {
                    let mut v = vec![field.zero(); w.dim()];
                    for b in kb.basis() {
                        let c = random::scalar(&mut ctx.rng, field);
                        v = v.iter().zip(b).map(|(x, y)| x + &(&c * y)).collect();
                    }
                    v
                })
                .collect();
            let mut values = BTreeMap::new();
            for (k, row) in case.rows.iter().enumerate() {
                let mut y = w.poly_apply_vec(&case.f.pow(row.q), &xs[k]);
                for (l, p) in row.coeffs.iter().enumerate() {
                    y = sub(&y, &w.poly_apply_vec(p, &xs[l]));
                }
                values.insert(Sym::new("u", &[k + 1]), y);
            }
            let binding = Binding { model: w.clone(), values };
            sys.binding = Some(binding.clone());
            let Some(d) = ctx.ok(diagonalize_system(&sys), || tag.clone()) else { continue };
            for row in &d.system.ke {
                ctx.check(row.f == case.f && row.q > 0 && row.q <= case.c, || {
                    format!("{tag}: output exponent {} outside 1..={}", row.q, case.c)
                });
                match binding.eval(&row.u) {
                    Ok(mu) => {
                        let e = case.f.pow(case.c - row.q.min(case.c));
                        ctx.check(w.poly_apply_vec(&e, &mu).iter().all(|x| x.is_zero()), || {
                            format!("{tag}: new constant {} not in the kernel", row.u)
                        });
                    }
                    Err(e) => ctx.fail(format!("{tag}: evaluating {}: {e}", row.u)),
                }
            }
        }
        ctx.check(done == ctx.trials, || format!("{field}: only {done} closed kernel blocks generated"));
    }
}
