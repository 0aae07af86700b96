//! Whole-system diagonalization and numeric roundtrip checks of single blocks.

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::linalg::{Matrix, Vector};
use crate::model::EndoModel;
use crate::poly::Poly;

use super::block::{diagonalize_block, x_sym, xp_sym, y_sym, DiagonalizedBlock};
use super::system::{
    ke_block_sym, ke_sym, ld_sym, li_sym, step1_strip, validate_diagonal, validate_triangular, DiagonalSystem,
    KeRow, LdRow, TriangularSystem,
};
use super::term::{reduce, LinearTerm, Sym};

/// `θ^power(var) ↦ term`, the term being over the variables of the diagonal system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Substitution {
    pub var: Sym,
    pub power: usize,
    pub term: LinearTerm,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagonalization {
    pub system: DiagonalSystem,
    /// Entries for `i` below each variable's degree bound; eliminated variables get
    /// one entry at power 0, free (li) variables map to themselves.
    pub substitutions: Vec<Substitution>,
    pub ld_block: Option<DiagonalizedBlock>,
    pub kernel_blocks: Vec<DiagonalizedBlock>,
}

/// `θ^i(s)` through a table of power entries, reducing anything beyond the table.
fn express(t: &LinearTerm, table: &BTreeMap<(Sym, usize), LinearTerm>, out: &DiagonalSystem) -> LinearTerm {
    let field = t.field();
    let empty = BTreeMap::new();
    let mut acc = t.const_part();
    for (s, p) in t.vars() {
        for (j, c) in p.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = match table.get(&(s.clone(), j)) {
                Some(e) => e.clone(),
                None => match table.get(&(s.clone(), 0)) {
                    Some(e) => e.apply_poly(&Poly::monomial(field.one(), j)),
                    None => LinearTerm::var_pow(field, s.clone(), j).substitute(&empty, &empty),
                },
            };
            acc = acc.add(&e.scale(c));
        }
    }
    reduce(&acc, &out.relations())
}

fn is_f_power(xi: &Poly, f: &Poly) -> Option<u32> {
    let (dx, df) = (xi.deg()?, f.deg()?);
    if df == 0 || dx % df != 0 {
        return None;
    }
    let q = u32::try_from(dx / df).ok()?;
    (f.pow(q) == *xi).then_some(q)
}

/// Diagonalizes a valid triangular system. The li part is untouched, the ld rows form
/// one block whose right-hand constants absorb the li terms, and each kernel block is
/// diagonalized on its own.
pub fn diagonalize_system(s: &TriangularSystem) -> Result<Diagonalization> {
    validate_triangular(s)?;
    let field = s.config.field();
    let (s1, strip) = step1_strip(s);
    let mut table: BTreeMap<(Sym, usize), LinearTerm> = BTreeMap::new();
    for l in 0..s1.li {
        table.insert((li_sym(l), 0), LinearTerm::var(field, li_sym(l)));
    }

    let mut ld_rows = Vec::new();
    let ld_block = if s1.ld.is_empty() {
        None
    } else {
        let zetas: Vec<Poly> = s1.ld.iter().map(|r| r.xi.clone()).collect();
        let q: Vec<Vec<Poly>> = s1.ld.iter().map(|r| r.q.clone()).collect();
        let blk = diagonalize_block(&zetas, &q)?;
        let ys: BTreeMap<Sym, LinearTerm> = s1
            .ld
            .iter()
            .enumerate()
            .map(|(k, r)| {
                let mut t = r.u.clone();
                for (l, p) in r.p.iter().enumerate() {
                    t.add_var(&li_sym(l), p);
                }
                (y_sym(k), t)
            })
            .collect();
        let xps: BTreeMap<Sym, LinearTerm> =
            (0..blk.xis.len()).map(|j| (xp_sym(j), LinearTerm::var(field, ld_sym(j)))).collect();
        for (j, xi) in blk.xis.iter().enumerate() {
            let mu = blk.mu[j].substitute(&BTreeMap::new(), &ys);
            let p = (0..s1.li).map(|l| mu.var_coeff(&li_sym(l))).collect();
            ld_rows.push(LdRow { xi: xi.clone(), p, u: mu.const_part() });
        }
        for (k, row) in blk.tau.iter().enumerate() {
            for (i, t) in row.iter().enumerate() {
                table.insert((ld_sym(k), i), t.substitute(&xps, &ys));
            }
        }
        Some(blk)
    };

    let mut ke_rows = Vec::new();
    let mut kernel_blocks = Vec::new();
    for (b, fb) in s1.blocks.iter().enumerate() {
        let zetas: Vec<Poly> = fb.rows.iter().map(|r| fb.f.pow(r.q)).collect();
        let q: Vec<Vec<Poly>> = fb.rows.iter().map(|r| r.coeffs.clone()).collect();
        let blk = diagonalize_block(&zetas, &q)?;
        let ys: BTreeMap<Sym, LinearTerm> = fb.rows.iter().enumerate().map(|(k, r)| (y_sym(k), r.u.clone())).collect();
        let base = ke_rows.len();
        let xps: BTreeMap<Sym, LinearTerm> =
            (0..blk.xis.len()).map(|j| (xp_sym(j), LinearTerm::var(field, ke_sym(base + j)))).collect();
        for (j, xi) in blk.xis.iter().enumerate() {
            let qn = is_f_power(xi, &fb.f)
                .ok_or_else(|| Error::Internal(format!("invariant factor {xi} is not a power of {}", fb.f)))?;
            ke_rows.push(KeRow { f: fb.f.clone(), q: qn, u: blk.mu[j].substitute(&BTreeMap::new(), &ys) });
        }
        for (k, row) in blk.tau.iter().enumerate() {
            for (i, t) in row.iter().enumerate() {
                table.insert((ke_block_sym(b, k), i), t.substitute(&xps, &ys));
            }
        }
        kernel_blocks.push(blk);
    }

    let system =
        DiagonalSystem { config: s.config.clone(), li: s.li, ld: ld_rows, ke: ke_rows, binding: s.binding.clone() };
    validate_diagonal(&system).map_err(|v| Error::Internal(format!("output system is invalid: {v}")))?;

    let bounds = s.bounds();
    let mut substitutions = Vec::new();
    for var in s.variables() {
        let image = &strip[&var];
        let kept = image.consts().is_empty()
            && image.vars().len() == 1
            && image.vars().values().next().is_some_and(|p| p.is_one());
        let top = match bounds[&var] {
            None => 1,
            Some(b) => b.max(1),
        };
        for i in 0..top {
            let term = if kept {
                let target = image.vars().keys().next().cloned().unwrap_or_else(|| var.clone());
                let t = LinearTerm::var_pow(field, target, i);
                express(&t, &table, &system)
            } else {
                express(image, &table, &system)
            };
            substitutions.push(Substitution { var: var.clone(), power: i, term });
        }
    }
    check_substitutions(s, &system, &substitutions)?;
    Ok(Diagonalization { system, substitutions, ld_block, kernel_blocks })
}

/// Bounded, and the entries for the bounded input variables are independent at zero constants.
fn check_substitutions(s: &TriangularSystem, out: &DiagonalSystem, subs: &[Substitution]) -> Result<()> {
    let field = s.config.field();
    let out_bounds = out.bounds();
    let monomials: Vec<(Sym, usize)> = out_bounds
        .iter()
        .filter_map(|(v, b)| b.map(|b| (v.clone(), b)))
        .flat_map(|(v, b)| (0..b).map(move |j| (v.clone(), j)))
        .collect();
    let in_bounds = s.bounds();
    let mut rows = Vec::new();
    for sub in subs {
        for (v, p) in sub.term.vars() {
            match out_bounds.get(v) {
                Some(None) => {}
                Some(Some(b)) if p.deg().is_none_or(|d| d < *b) => {}
                _ => return Err(Error::Internal(format!("substitution for {} is not bounded", sub.var))),
            }
        }
        if in_bounds[&sub.var].is_some_and(|b| sub.power < b) {
            rows.push(monomials.iter().map(|(v, j)| sub.term.var_coeff(v).coeff(*j)).collect::<Vec<Scalar>>());
        }
    }
    if rows.is_empty() {
        return Ok(());
    }
    let count = rows.len();
    if Matrix::from_rows(field, rows)?.rank() != count {
        return Err(Error::Internal("substitutions are linearly dependent".into()));
    }
    Ok(())
}

/// Outcome of numeric roundtrips of one block on a model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockCheck {
    pub trials: usize,
    pub failures: Vec<String>,
}

impl BlockCheck {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub(crate) fn random_vector(rng: &mut impl Rng, field: Field, n: usize) -> Vector {
    (0..n).map(|_| field.int(rng.gen_range(-3..=3))).collect()
}

fn add_vec(a: &[Scalar], b: &[Scalar]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub_vec(a: &[Scalar], b: &[Scalar]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Draws solutions of the triangular block in `m`, maps them forward with `ν` and back
/// with `τ`, and maps perturbed solutions of the diagonal block back to the triangular one.
pub fn verify_block_on_model(
    blk: &DiagonalizedBlock,
    m: &EndoModel,
    trials: usize,
    rng: &mut impl Rng,
) -> Result<BlockCheck> {
    let field = m.field();
    if field != blk.field() {
        return Err(Error::FieldMismatch(field.to_string(), blk.field().to_string()));
    }
    let n = m.dim();
    let kernels = blk.xis.iter().map(|xi| m.kernel_basis(xi)).collect::<Result<Vec<_>>>()?;
    let mut failures = Vec::new();
    for trial in 0..trials {
        let xs: Vec<Vector> = (0..blk.zetas.len()).map(|_| random_vector(rng, field, n)).collect();
        let mut vals: BTreeMap<Sym, Vector> = BTreeMap::new();
        let mut consts: BTreeMap<Sym, Vector> = BTreeMap::new();
        for (k, x) in xs.iter().enumerate() {
            let mut y = m.poly_apply_vec(&blk.zetas[k], x);
            for (l, xl) in xs.iter().enumerate().take(k) {
                y = sub_vec(&y, &m.poly_apply_vec(&blk.coupling(k, l), xl));
            }
            vals.insert(x_sym(k), x.clone());
            consts.insert(y_sym(k), y);
        }
        let mut xp: BTreeMap<Sym, Vector> = BTreeMap::new();
        for (j, nu) in blk.nu.iter().enumerate() {
            xp.insert(xp_sym(j), nu[0].eval(m, &vals, &consts)?);
        }
        for (j, xi) in blk.xis.iter().enumerate() {
            let lhs = m.poly_apply_vec(xi, &xp[&xp_sym(j)]);
            if lhs != blk.mu[j].eval(m, &BTreeMap::new(), &consts)? {
                failures.push(format!("trial {trial}: forward image fails output equation {}", j + 1));
            }
        }
        for (k, row) in blk.tau.iter().enumerate() {
            for (i, t) in row.iter().enumerate() {
                let want = m.poly_apply_vec(&Poly::monomial(field.one(), i), &xs[k]);
                if t.eval(m, &xp, &consts)? != want {
                    failures.push(format!("trial {trial}: τ_{}^{i}(ν(x)) differs from θ^{i}(x{})", k + 1, k + 1));
                }
            }
        }

        let mut xpp = xp.clone();
        for (j, ker) in kernels.iter().enumerate() {
            let mut z = vec![field.zero(); n];
            for b in ker.basis() {
                let c = field.int(rng.gen_range(-3..=3));
                z = add_vec(&z, &b.iter().map(|e| e * &c).collect::<Vec<_>>());
            }
            let e = xpp.get_mut(&xp_sym(j)).expect("output variable present");
            *e = add_vec(e, &z);
        }
        let back: Vec<Vector> =
            blk.tau.iter().map(|row| row[0].eval(m, &xpp, &consts)).collect::<Result<Vec<_>>>()?;
        for k in 0..blk.zetas.len() {
            let mut rhs = consts[&y_sym(k)].clone();
            for (l, bl) in back.iter().enumerate().take(k) {
                rhs = add_vec(&rhs, &m.poly_apply_vec(&blk.coupling(k, l), bl));
            }
            if m.poly_apply_vec(&blk.zetas[k], &back[k]) != rhs {
                failures.push(format!("trial {trial}: converse image fails input equation {}", k + 1));
            }
            for (i, t) in blk.tau[k].iter().enumerate() {
                let want = m.poly_apply_vec(&Poly::monomial(field.one(), i), &back[k]);
                if t.eval(m, &xpp, &consts)? != want {
                    failures.push(format!("trial {trial}: converse table entry ({}, {i}) inconsistent", k + 1));
                }
            }
        }
    }
    Ok(BlockCheck { trials, failures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagonalize::system::{Binding, FBlock, KeRow, TriLdRow, TriRow};
    use crate::kernel_config::{KernelConfiguration, Val};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const Q: Field = Field::Q;

    fn q(c: &[i64]) -> Poly {
        Poly::from_ints(Q, c)
    }

    fn x() -> Poly {
        q(&[0, 1])
    }

    fn cst(name: &str) -> LinearTerm {
        LinearTerm::constant(Q, Sym::parse(name).unwrap())
    }

    #[test]
    fn already_diagonal_is_fixed() {
        let c = KernelConfiguration::transcendental(Q, Val::Inf, [(x(), Val::Fin(2))]).unwrap();
        let d = DiagonalSystem {
            config: c,
            li: 1,
            ld: vec![LdRow { xi: q(&[1, 0, 1]), p: vec![q(&[0, 1])], u: cst("a") }],
            ke: vec![KeRow { f: x(), q: 2, u: cst("b") }, KeRow { f: x(), q: 1, u: cst("c") }],
            binding: None,
        };
        let tri = d.to_triangular();
        let out = diagonalize_system(&tri).unwrap();
        assert_eq!(out.system, d);
        let renamed: BTreeMap<Sym, Sym> = tri
            .variables()
            .into_iter()
            .zip((0..1).map(li_sym).chain([ld_sym(0), ke_sym(0), ke_sym(1)]))
            .collect();
        for sub in &out.substitutions {
            assert_eq!(sub.term, LinearTerm::var_pow(Q, renamed[&sub.var].clone(), sub.power));
        }
    }

    #[test]
    fn kernel_block_with_bound_constants() {
        // Model: θ = nilpotent shift on Q^2, u1 = e2 (θ e2 = 0), u2 = -e1 with θ(e1) = e2.
        let m = EndoModel::from_int_rows(Q, &[&[0, 0], &[1, 0]]);
        let c = KernelConfiguration::transcendental(Q, Val::Inf, [(x(), Val::Fin(2))]).unwrap();
        let u1 = vec![Q.int(0), Q.int(1)];
        let u2 = vec![Q.int(-1), Q.int(0)];
        assert!(m.apply(&u1).iter().all(|e| e.is_zero()));
        let binding = Binding {
            model: m,
            values: [(Sym::parse("u1").unwrap(), u1), (Sym::parse("u2").unwrap(), u2)].into(),
        };
        let s = TriangularSystem {
            config: c,
            li: 0,
            ld: vec![],
            blocks: vec![FBlock {
                f: x(),
                rows: vec![
                    TriRow { q: 1, coeffs: vec![], u: cst("u1") },
                    TriRow { q: 1, coeffs: vec![q(&[1])], u: cst("u2") },
                ],
            }],
            binding: Some(binding.clone()),
        };
        let out = diagonalize_system(&s).unwrap();
        assert_eq!(out.system.ke.len(), 1);
        assert_eq!(out.system.ke[0].q, 2);
        assert_eq!(out.system.ke[0].u.to_string(), "u1 + θ(u2)");
        assert!(binding.eval(&out.system.ke[0].u).unwrap().iter().all(|e| e.is_zero()));
    }

    #[test]
    fn mixed_system_reassembles() {
        let c = KernelConfiguration::transcendental(Q, Val::Inf, [(x(), Val::Fin(2))]).unwrap();
        let s = TriangularSystem {
            config: c,
            li: 1,
            ld: vec![
                TriLdRow { xi: q(&[1, 0, 1]), p: vec![q(&[0, 1])], q: vec![], u: cst("a") },
                TriLdRow { xi: q(&[-1, 1]), p: vec![], q: vec![q(&[2, 1])], u: cst("b") },
            ],
            blocks: vec![FBlock {
                f: x(),
                rows: vec![
                    TriRow { q: 1, coeffs: vec![], u: cst("u1") },
                    TriRow { q: 1, coeffs: vec![q(&[1])], u: cst("u2") },
                ],
            }],
            binding: None,
        };
        let out = diagonalize_system(&s).unwrap();
        assert!(validate_diagonal(&out.system).is_ok());
        assert_eq!(out.system.ld.len(), 1);
        assert_eq!(out.system.ld[0].xi, q(&[-1, 1, -1, 1]));
        assert_eq!(out.system.ke.len(), 1);
    }

    #[test]
    fn stripped_rows_get_direct_substitutions() {
        let c = KernelConfiguration::transcendental(Q, Val::Inf, [(x(), Val::Fin(1))]).unwrap();
        let s = TriangularSystem {
            config: c,
            li: 0,
            ld: vec![],
            blocks: vec![FBlock { f: x(), rows: vec![TriRow { q: 0, coeffs: vec![], u: cst("u1") }] }],
            binding: None,
        };
        let out = diagonalize_system(&s).unwrap();
        assert!(out.system.ke.is_empty());
        assert_eq!(out.substitutions.len(), 1);
        assert_eq!(out.substitutions[0].term, cst("u1"));
    }

    #[test]
    fn not_closed_is_rejected_by_name() {
        let c = KernelConfiguration::transcendental(Q, Val::Inf, [(x(), Val::Fin(1))]).unwrap();
        let s = TriangularSystem {
            config: c,
            li: 0,
            ld: vec![],
            blocks: vec![FBlock {
                f: x(),
                rows: vec![
                    TriRow { q: 1, coeffs: vec![], u: cst("u1") },
                    TriRow { q: 1, coeffs: vec![q(&[1])], u: cst("u2") },
                ],
            }],
            binding: None,
        };
        match diagonalize_system(&s) {
            Err(Error::InvalidSystem(msg)) => assert!(msg.starts_with("t-term closure")),
            other => panic!("unexpected {other:?}"),
        }
    }

    fn shift_model(n: usize) -> EndoModel {
        let mut t = Matrix::zero(Q, n, n);
        for i in 0..n.saturating_sub(1) {
            t.set(i + 1, i, Q.one());
        }
        EndoModel::new(t).unwrap()
    }

    #[test]
    fn worked_block_roundtrips_on_six_dimensions() {
        let blk = diagonalize_block(&[x(), x()], &[vec![], vec![q(&[1])]]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = shift_model(6).direct_sum(&EndoModel::from_int_rows(Q, &[&[2]])).unwrap();
        let r = verify_block_on_model(&blk, &m, 20, &mut rng).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
    }

    #[test]
    fn single_row_roundtrips() {
        let blk = diagonalize_block(&[q(&[1, 1, 1])], &[]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = EndoModel::from_int_rows(Q, &[&[0, -1], &[1, -1]]);
        let r = verify_block_on_model(&blk, &m, 5, &mut rng).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
    }
}
