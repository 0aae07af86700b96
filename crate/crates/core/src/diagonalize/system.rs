//! Diagonal and triangular sequence systems, their validation, boundedness, the
//! t-term derivation for kernel blocks, and removal of degree-zero rows.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::factor::irreducible_factors;
use crate::kernel_config::{KernelConfiguration, Val};
use crate::linalg::Vector;
use crate::model::EndoModel;
use crate::poly::Poly;

use super::block::{x_sym, y_sym};
use super::term::{reduce, LinearTerm, Relation, Sym};

pub fn li_sym(k: usize) -> Sym {
    Sym::new("li", &[k + 1])
}

pub fn ld_sym(k: usize) -> Sym {
    Sym::new("ld", &[k + 1])
}

/// Kernel variable of a diagonal system.
pub fn ke_sym(k: usize) -> Sym {
    Sym::new("ke", &[k + 1])
}

/// Variable `k` of kernel block `b` in a triangular system.
pub fn ke_block_sym(b: usize, k: usize) -> Sym {
    Sym::new("ke", &[b + 1, k + 1])
}

/// Concrete vectors for the constants of a system, inside a fixed model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Binding {
    pub model: EndoModel,
    pub values: BTreeMap<Sym, Vector>,
}

impl Binding {
    /// Value of a constant-only term.
    pub fn eval(&self, t: &LinearTerm) -> Result<Vector> {
        if t.has_vars() {
            return Err(Error::InvalidSystem(format!("constant term {t} mentions variables")));
        }
        t.eval(&self.model, &BTreeMap::new(), &self.values)
    }
}

/// `ξ[θ](x_ld) = Σ_l P_l[θ](x_li,l) + u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LdRow {
    pub xi: Poly,
    pub p: Vec<Poly>,
    pub u: LinearTerm,
}

/// `f^q[θ](x_ke) = u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeRow {
    pub f: Poly,
    pub q: u32,
    pub u: LinearTerm,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalSystem {
    pub config: KernelConfiguration,
    pub li: usize,
    pub ld: Vec<LdRow>,
    pub ke: Vec<KeRow>,
    pub binding: Option<Binding>,
}

/// `ξ[θ](x_ld,k) = Σ_l P_l[θ](x_li,l) + Σ_{l<k} Q_l[θ](x_ld,l) + u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriLdRow {
    pub xi: Poly,
    pub p: Vec<Poly>,
    pub q: Vec<Poly>,
    pub u: LinearTerm,
}

/// `f^q[θ](x_k) = Σ_{l<k} Q_l[θ](x_l) + u` inside a kernel block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriRow {
    pub q: u32,
    pub coeffs: Vec<Poly>,
    pub u: LinearTerm,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FBlock {
    pub f: Poly,
    pub rows: Vec<TriRow>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangularSystem {
    pub config: KernelConfiguration,
    pub li: usize,
    pub ld: Vec<TriLdRow>,
    pub blocks: Vec<FBlock>,
    pub binding: Option<Binding>,
}

/// A failed clause of the system definitions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub clause: &'static str,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.clause, self.detail)
    }
}

impl From<Violation> for Error {
    fn from(v: Violation) -> Error {
        Error::InvalidSystem(v.to_string())
    }
}

fn violation(clause: &'static str, detail: impl Into<String>) -> Violation {
    Violation { clause, detail: detail.into() }
}

/// The repeated-division residue of `f^C[θ](x_k)` kept a variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NotClosed {
    pub row: usize,
    pub residue: LinearTerm,
}

impl fmt::Display for NotClosed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "row {} leaves residue {}", self.row + 1, self.residue)
    }
}

fn poly_at(v: &[Poly], i: usize, field: crate::field::Field) -> Poly {
    v.get(i).cloned().unwrap_or_else(|| Poly::zero(field))
}

/// Terms `t_k(y)` over the block symbols `y{k}` with `f^C[θ](x_k) = t_k(y)` implied by
/// the rows `f^{q_k}[θ](x_k) = Σ_{l<k} Q_{k,l}[θ](x_l) + y_k`.
pub fn derive_t_terms(f: &Poly, c: u32, rows: &[TriRow]) -> std::result::Result<Vec<LinearTerm>, NotClosed> {
    let field = f.field();
    let rels: Vec<Relation> = rows
        .iter()
        .enumerate()
        .map(|(k, row)| {
            let mut rhs = LinearTerm::constant(field, y_sym(k));
            for l in 0..k {
                rhs.add_var(&x_sym(l), &poly_at(&row.coeffs, l, field));
            }
            Relation { var: x_sym(k), lead: f.pow(row.q), rhs }
        })
        .collect();
    let fc = f.pow(c);
    (0..rows.len())
        .map(|k| {
            let r = reduce(&LinearTerm::var_poly(x_sym(k), fc.clone()), &rels[..=k]);
            if r.has_vars() {
                Err(NotClosed { row: k, residue: r })
            } else {
                Ok(r)
            }
        })
        .collect()
}

fn check_field(config: &KernelConfiguration, p: &Poly, what: &str) -> std::result::Result<(), Violation> {
    if p.field() != config.field() {
        return Err(violation("field", format!("{what} {p} is over {}", p.field())));
    }
    Ok(())
}

fn check_const_term(config: &KernelConfiguration, t: &LinearTerm, what: &str) -> std::result::Result<(), Violation> {
    if t.field() != config.field() {
        return Err(violation("field", format!("{what} is over {}", t.field())));
    }
    if t.has_vars() {
        return Err(violation("constant-term", format!("{what} = {t} mentions variables")));
    }
    Ok(())
}

fn check_infinite_factors(config: &KernelConfiguration, xi: &Poly, k: usize) -> std::result::Result<(), Violation> {
    if !xi.is_monic() {
        return Err(violation("ld-polynomial", format!("row {}: {xi} is not monic", k + 1)));
    }
    let facs = irreducible_factors(xi).map_err(|e| violation("ld-polynomial", e.to_string()))?;
    for g in facs {
        if config.value(&g) != Val::Inf {
            return Err(violation("ld-polynomial", format!("row {}: factor {g} has finite value", k + 1)));
        }
    }
    Ok(())
}

/// Value of a kernel polynomial, which must be monic irreducible with `0 < C(f) < ∞`.
fn kernel_value(config: &KernelConfiguration, f: &Poly) -> std::result::Result<u32, Violation> {
    check_field(config, f, "kernel polynomial")?;
    match config.value_at(f) {
        Ok(Val::Fin(c)) if c > 0 => Ok(c),
        Ok(v) => Err(violation("kernel-polynomial", format!("{f} has value {v}, need 0 < C(f) < inf"))),
        Err(e) => Err(violation("kernel-polynomial", format!("{f}: {e}"))),
    }
}

fn bound_value(b: &Binding, t: &LinearTerm) -> std::result::Result<Vector, Violation> {
    b.eval(t).map_err(|e| violation("binding", e.to_string()))
}

fn in_kernel(b: &Binding, rho: &Poly, v: &[crate::field::Scalar]) -> bool {
    b.model.poly_apply_vec(rho, v).iter().all(|c| c.is_zero())
}

impl DiagonalSystem {
    pub fn var_count(&self) -> usize {
        self.li + self.ld.len() + self.ke.len()
    }

    /// `Some(bound)` on θ-powers per variable; `None` for the unbounded li part.
    pub fn bounds(&self) -> BTreeMap<Sym, Option<usize>> {
        let mut out = BTreeMap::new();
        for k in 0..self.li {
            out.insert(li_sym(k), None);
        }
        for (k, row) in self.ld.iter().enumerate() {
            out.insert(ld_sym(k), row.xi.deg());
        }
        for (k, row) in self.ke.iter().enumerate() {
            out.insert(ke_sym(k), row.f.pow(row.q).deg());
        }
        out
    }

    pub fn relations(&self) -> Vec<Relation> {
        let field = self.config.field();
        let mut rels = Vec::new();
        for (k, row) in self.ld.iter().enumerate() {
            let mut rhs = row.u.clone();
            for (l, p) in row.p.iter().enumerate() {
                rhs.add_var(&li_sym(l), p);
            }
            rels.push(Relation { var: ld_sym(k), lead: row.xi.clone(), rhs });
        }
        for (k, row) in self.ke.iter().enumerate() {
            rels.push(Relation { var: ke_sym(k), lead: row.f.pow(row.q), rhs: row.u.clone() });
        }
        debug_assert!(rels.iter().all(|r| r.lead.field() == field));
        rels
    }

    pub fn is_bounded(&self, usage: &BTreeSet<(Sym, usize)>) -> bool {
        is_bounded(usage, &self.bounds())
    }

    /// The same system viewed as triangular: no couplings, kernel rows grouped by polynomial.
    pub fn to_triangular(&self) -> TriangularSystem {
        let field = self.config.field();
        let ld = self
            .ld
            .iter()
            .map(|r| TriLdRow { xi: r.xi.clone(), p: r.p.clone(), q: Vec::new(), u: r.u.clone() })
            .collect();
        let mut blocks: Vec<FBlock> = Vec::new();
        for row in &self.ke {
            let tri = TriRow { q: row.q, coeffs: Vec::new(), u: row.u.clone() };
            match blocks.iter_mut().find(|b| b.f == row.f) {
                Some(b) => b.rows.push(tri),
                None => blocks.push(FBlock { f: row.f.clone(), rows: vec![tri] }),
            }
        }
        debug_assert!(blocks.iter().all(|b| b.f.field() == field));
        TriangularSystem { config: self.config.clone(), li: self.li, ld, blocks, binding: self.binding.clone() }
    }
}

impl TriangularSystem {
    pub fn bounds(&self) -> BTreeMap<Sym, Option<usize>> {
        let mut out = BTreeMap::new();
        for k in 0..self.li {
            out.insert(li_sym(k), None);
        }
        for (k, row) in self.ld.iter().enumerate() {
            out.insert(ld_sym(k), row.xi.deg());
        }
        for (b, blk) in self.blocks.iter().enumerate() {
            for (k, row) in blk.rows.iter().enumerate() {
                out.insert(ke_block_sym(b, k), blk.f.pow(row.q).deg());
            }
        }
        out
    }

    /// Right-hand side of ld row `k` as a term.
    pub fn ld_rhs(&self, k: usize) -> LinearTerm {
        let row = &self.ld[k];
        let mut rhs = row.u.clone();
        for (l, p) in row.p.iter().enumerate() {
            rhs.add_var(&li_sym(l), p);
        }
        for (l, p) in row.q.iter().enumerate() {
            rhs.add_var(&ld_sym(l), p);
        }
        rhs
    }

    /// Right-hand side of row `k` in kernel block `b` as a term.
    pub fn block_rhs(&self, b: usize, k: usize) -> LinearTerm {
        let row = &self.blocks[b].rows[k];
        let mut rhs = row.u.clone();
        for (l, p) in row.coeffs.iter().enumerate() {
            rhs.add_var(&ke_block_sym(b, l), p);
        }
        rhs
    }

    pub fn relations(&self) -> Vec<Relation> {
        let mut rels = Vec::new();
        for (k, row) in self.ld.iter().enumerate() {
            rels.push(Relation { var: ld_sym(k), lead: row.xi.clone(), rhs: self.ld_rhs(k) });
        }
        for (b, blk) in self.blocks.iter().enumerate() {
            for (k, row) in blk.rows.iter().enumerate() {
                rels.push(Relation { var: ke_block_sym(b, k), lead: blk.f.pow(row.q), rhs: self.block_rhs(b, k) });
            }
        }
        rels
    }

    pub fn is_bounded(&self, usage: &BTreeSet<(Sym, usize)>) -> bool {
        is_bounded(usage, &self.bounds())
    }

    /// Variables in declaration order.
    pub fn variables(&self) -> Vec<Sym> {
        let mut out: Vec<Sym> = (0..self.li).map(li_sym).collect();
        out.extend((0..self.ld.len()).map(ld_sym));
        for (b, blk) in self.blocks.iter().enumerate() {
            out.extend((0..blk.rows.len()).map(|k| ke_block_sym(b, k)));
        }
        out
    }
}

/// Every used `(x, i)` has `i` below the bound of `x`; unknown variables are unbounded uses.
pub fn is_bounded(usage: &BTreeSet<(Sym, usize)>, bounds: &BTreeMap<Sym, Option<usize>>) -> bool {
    usage.iter().all(|(s, i)| match bounds.get(s) {
        Some(None) => true,
        Some(Some(b)) => i < b,
        None => false,
    })
}

pub fn term_reduce_diagonal(t: &LinearTerm, s: &DiagonalSystem) -> LinearTerm {
    reduce(t, &s.relations())
}

pub fn term_reduce_triangular(t: &LinearTerm, s: &TriangularSystem) -> LinearTerm {
    reduce(t, &s.relations())
}

fn check_binding_shape(b: &Binding, config: &KernelConfiguration) -> std::result::Result<(), Violation> {
    if b.model.field() != config.field() {
        return Err(violation("binding", "model field differs from the configuration"));
    }
    for (s, v) in &b.values {
        if v.len() != b.model.dim() {
            return Err(violation("binding", format!("value of {s} has length {}", v.len())));
        }
    }
    Ok(())
}

pub fn validate_diagonal(s: &DiagonalSystem) -> std::result::Result<(), Violation> {
    let config = &s.config;
    if config.is_algebraic() && (s.li > 0 || !s.ld.is_empty()) {
        return Err(violation("algebraic-free-parts", "algebraic configurations allow only kernel rows"));
    }
    for (k, row) in s.ld.iter().enumerate() {
        check_field(config, &row.xi, "ld polynomial")?;
        if row.xi.deg().is_none_or(|d| d == 0) {
            return Err(violation("ld-polynomial", format!("row {}: {} must have positive degree", k + 1, row.xi)));
        }
        check_infinite_factors(config, &row.xi, k)?;
        if row.p.len() > s.li {
            return Err(violation("shape", format!("ld row {} has {} li coefficients", k + 1, row.p.len())));
        }
        for p in &row.p {
            check_field(config, p, "li coefficient")?;
        }
        check_const_term(config, &row.u, "ld constant")?;
    }
    for (k, row) in s.ke.iter().enumerate() {
        let c = kernel_value(config, &row.f)?;
        if row.q == 0 || row.q > c {
            return Err(violation("kernel-exponent", format!("row {}: need 0 < {} <= {c}", k + 1, row.q)));
        }
        check_const_term(config, &row.u, "kernel constant")?;
    }
    if let Some(b) = &s.binding {
        check_binding_shape(b, config)?;
        for row in &s.ld {
            bound_value(b, &row.u)?;
        }
        for (k, row) in s.ke.iter().enumerate() {
            let c = kernel_value(config, &row.f)?;
            let u = bound_value(b, &row.u)?;
            if !in_kernel(b, &row.f.pow(c - row.q), &u) {
                return Err(violation(
                    "kernel-constant",
                    format!("row {}: constant is not in Ker(({})^{})", k + 1, row.f, c - row.q),
                ));
            }
        }
    }
    Ok(())
}

pub fn validate_triangular(s: &TriangularSystem) -> std::result::Result<(), Violation> {
    let config = &s.config;
    let field = config.field();
    if config.is_algebraic() && (s.li > 0 || !s.ld.is_empty()) {
        return Err(violation("algebraic-free-parts", "algebraic configurations allow only kernel rows"));
    }
    for (k, row) in s.ld.iter().enumerate() {
        check_field(config, &row.xi, "ld polynomial")?;
        check_infinite_factors(config, &row.xi, k)?;
        if row.p.len() > s.li {
            return Err(violation("shape", format!("ld row {} has {} li coefficients", k + 1, row.p.len())));
        }
        if row.q.len() > k {
            return Err(violation("shape", format!("ld row {} couples to later rows", k + 1)));
        }
        for (l, qp) in row.q.iter().enumerate() {
            check_field(config, qp, "coupling")?;
            let bound = s.ld[l].xi.deg().unwrap_or(0);
            if qp.deg().is_some_and(|d| d >= bound) {
                return Err(violation(
                    "degree-bound",
                    format!("ld coupling ({}, {}) = {qp} needs degree below {bound}", k + 1, l + 1),
                ));
            }
        }
        check_const_term(config, &row.u, "ld constant")?;
    }
    let mut seen = BTreeSet::new();
    for (b, blk) in s.blocks.iter().enumerate() {
        let c = kernel_value(config, &blk.f)?;
        if !seen.insert(blk.f.clone()) {
            return Err(violation("shape", format!("kernel polynomial {} has two blocks", blk.f)));
        }
        for (k, row) in blk.rows.iter().enumerate() {
            if row.q > c {
                return Err(violation("kernel-exponent", format!("block {} row {}: {} > {c}", b + 1, k + 1, row.q)));
            }
            if row.coeffs.len() > k {
                return Err(violation("shape", format!("block {} row {} couples to later rows", b + 1, k + 1)));
            }
            for (l, qp) in row.coeffs.iter().enumerate() {
                check_field(config, qp, "coupling")?;
                let bound = blk.f.pow(blk.rows[l].q).deg().unwrap_or(0);
                if qp.deg().is_some_and(|d| d >= bound) {
                    return Err(violation(
                        "degree-bound",
                        format!("block {} coupling ({}, {}) = {qp} needs degree below {bound}", b + 1, k + 1, l + 1),
                    ));
                }
            }
            check_const_term(config, &row.u, "kernel constant")?;
        }
        let t = derive_t_terms(&blk.f, c, &blk.rows)
            .map_err(|nc| violation("t-term closure", format!("block {} ({}): {nc}", b + 1, blk.f)))?;
        if let Some(bind) = &s.binding {
            let fc = blk.f.pow(c);
            let consts: BTreeMap<Sym, LinearTerm> =
                blk.rows.iter().enumerate().map(|(k, r)| (y_sym(k), r.u.clone())).collect();
            for (k, row) in blk.rows.iter().enumerate() {
                let u = bound_value(bind, &row.u)?;
                if !in_kernel(bind, &fc, &u) {
                    return Err(violation(
                        "kernel-constant",
                        format!("block {} row {}: constant is not in Ker(({})^{c})", b + 1, k + 1, blk.f),
                    ));
                }
                let tk = t[k].substitute(&BTreeMap::new(), &consts);
                if bound_value(bind, &tk)?.iter().any(|x| !x.is_zero()) {
                    return Err(violation("t-term closure", format!("block {} row {}: t(u) != 0", b + 1, k + 1)));
                }
            }
        }
    }
    if let Some(b) = &s.binding {
        check_binding_shape(b, config)?;
        for row in &s.ld {
            bound_value(b, &row.u)?;
        }
    }
    debug_assert!(s.blocks.iter().all(|b| b.f.field() == field));
    Ok(())
}

/// Drops rows of degree zero. Returns the reduced system and, for every old variable,
/// its expression over the new variables.
pub fn step1_strip(s: &TriangularSystem) -> (TriangularSystem, BTreeMap<Sym, LinearTerm>) {
    let field = s.config.field();
    let mut map: BTreeMap<Sym, LinearTerm> = BTreeMap::new();
    let empty = BTreeMap::new();
    for k in 0..s.li {
        map.insert(li_sym(k), LinearTerm::var(field, li_sym(k)));
    }

    let mut ld = Vec::new();
    for k in 0..s.ld.len() {
        let rhs = s.ld_rhs(k).substitute(&map, &empty);
        let row = &s.ld[k];
        if row.xi.deg() == Some(0) {
            map.insert(ld_sym(k), rhs);
            continue;
        }
        let new_k = ld.len();
        let p = (0..s.li).map(|l| rhs.var_coeff(&li_sym(l))).collect();
        let q = (0..new_k).map(|l| rhs.var_coeff(&ld_sym(l))).collect();
        ld.push(TriLdRow { xi: row.xi.clone(), p, q, u: rhs.const_part() });
        map.insert(ld_sym(k), LinearTerm::var(field, ld_sym(new_k)));
    }

    let mut blocks = Vec::new();
    for (b, blk) in s.blocks.iter().enumerate() {
        let nb = blocks.len();
        let mut rows = Vec::new();
        for k in 0..blk.rows.len() {
            let rhs = s.block_rhs(b, k).substitute(&map, &empty);
            let row = &blk.rows[k];
            if row.q == 0 {
                map.insert(ke_block_sym(b, k), rhs);
                continue;
            }
            let new_k = rows.len();
            let coeffs = (0..new_k).map(|l| rhs.var_coeff(&ke_block_sym(nb, l))).collect();
            rows.push(TriRow { q: row.q, coeffs, u: rhs.const_part() });
            map.insert(ke_block_sym(b, k), LinearTerm::var(field, ke_block_sym(nb, new_k)));
        }
        if !rows.is_empty() {
            blocks.push(FBlock { f: blk.f.clone(), rows });
        }
    }
    let out = TriangularSystem { config: s.config.clone(), li: s.li, ld, blocks, binding: s.binding.clone() };
    (out, map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;

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

    fn c_x(n: u32) -> KernelConfiguration {
        KernelConfiguration::transcendental(Q, Val::Inf, [(x(), Val::Fin(n))]).unwrap()
    }

    fn row(qe: u32, coeffs: Vec<Poly>, u: &str) -> TriRow {
        TriRow { q: qe, coeffs, u: cst(u) }
    }

    #[test]
    fn t_terms_examples() {
        let t = derive_t_terms(&x(), 2, &[row(2, vec![], "u1")]).unwrap();
        assert_eq!(t[0].to_string(), "y1");
        let rows = [row(1, vec![], "u1"), row(1, vec![q(&[1])], "u2")];
        let t = derive_t_terms(&x(), 2, &rows).unwrap();
        assert_eq!(t[0].to_string(), "θ(y1)");
        assert_eq!(t[1].to_string(), "y1 + θ(y2)");
    }

    #[test]
    fn t_terms_detect_missing_closure() {
        // X[θ](x2) = x1 with X[θ](x1) = y1 and C = 1: X(x2) keeps x1.
        let rows = [row(1, vec![], "u1"), row(1, vec![q(&[1])], "u2")];
        let err = derive_t_terms(&x(), 1, &rows).unwrap_err();
        assert_eq!(err.row, 1);
        assert!(err.residue.has_vars());
    }

    #[test]
    fn empty_system_is_valid_and_bounds_everything_known() {
        let s = DiagonalSystem { config: KernelConfiguration::c_zero(Q), li: 0, ld: vec![], ke: vec![], binding: None };
        assert!(validate_diagonal(&s).is_ok());
        assert!(s.is_bounded(&BTreeSet::new()));
    }

    #[test]
    fn algebraic_rejects_li() {
        let c = KernelConfiguration::from_mipo(&q(&[0, 0, 1])).unwrap();
        let s = DiagonalSystem { config: c, li: 1, ld: vec![], ke: vec![], binding: None };
        assert_eq!(validate_diagonal(&s).unwrap_err().clause, "algebraic-free-parts");
    }

    #[test]
    fn boundary_usage_is_not_bounded() {
        let s = DiagonalSystem {
            config: KernelConfiguration::c_infinity(Q),
            li: 1,
            ld: vec![LdRow { xi: q(&[1, 0, 1]), p: vec![q(&[0, 1])], u: cst("u1") }],
            ke: vec![],
            binding: None,
        };
        assert!(validate_diagonal(&s).is_ok());
        let ok: BTreeSet<(Sym, usize)> = [(ld_sym(0), 1), (li_sym(0), 9)].into();
        assert!(s.is_bounded(&ok));
        let bad: BTreeSet<(Sym, usize)> = [(ld_sym(0), 2)].into();
        assert!(!s.is_bounded(&bad));
    }

    #[test]
    fn term_reduce_examples() {
        let s = DiagonalSystem {
            config: KernelConfiguration::c_infinity(Q),
            li: 0,
            ld: vec![LdRow { xi: q(&[0, 0, 1]), p: vec![], u: cst("y1") }],
            ke: vec![],
            binding: None,
        };
        let t1 = LinearTerm::var_pow(Q, ld_sym(0), 1);
        assert_eq!(term_reduce_diagonal(&t1, &s), t1);
        assert_eq!(term_reduce_diagonal(&LinearTerm::var_pow(Q, ld_sym(0), 2), &s).to_string(), "y1");
        assert_eq!(term_reduce_diagonal(&LinearTerm::var_pow(Q, ld_sym(0), 3), &s).to_string(), "θ(y1)");
    }

    #[test]
    fn strip_examples() {
        let c = c_x(3);
        let none = TriangularSystem {
            config: c.clone(),
            li: 0,
            ld: vec![],
            blocks: vec![FBlock { f: x(), rows: vec![row(1, vec![], "u1")] }],
            binding: None,
        };
        let (s, map) = step1_strip(&none);
        assert_eq!(s, none);
        assert_eq!(map[&ke_block_sym(0, 0)], LinearTerm::var(Q, ke_block_sym(0, 0)));

        let unit = TriangularSystem {
            config: c.clone(),
            li: 0,
            ld: vec![],
            blocks: vec![FBlock { f: x(), rows: vec![row(0, vec![], "u1")] }],
            binding: None,
        };
        let (s, map) = step1_strip(&unit);
        assert!(s.blocks.is_empty());
        assert_eq!(map[&ke_block_sym(0, 0)], cst("u1"));

        let chained = TriangularSystem {
            config: c,
            li: 0,
            ld: vec![],
            blocks: vec![FBlock {
                f: x(),
                rows: vec![row(1, vec![], "u1"), row(0, vec![q(&[3])], "u2"), row(2, vec![q(&[1]), q(&[])], "u3")],
            }],
            binding: None,
        };
        assert!(validate_triangular(&chained).is_ok());
        let (s, map) = step1_strip(&chained);
        assert_eq!(s.blocks[0].rows.len(), 2);
        assert_eq!(map[&ke_block_sym(0, 1)].to_string(), "3*ke1.1 + u2");
        assert_eq!(map[&ke_block_sym(0, 2)], LinearTerm::var(Q, ke_block_sym(0, 1)));
        assert!(validate_triangular(&s).is_ok());
    }
}
