//! Linear θ-terms `Σ ρ_v[θ](x_v) + Σ σ_j[θ](y_j)` over named symbols.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{zero_vector, Vector};
use crate::model::EndoModel;
use crate::poly::Poly;

/// A symbol such as `x'2`, `ld1` or `ke2.3`: an alphabetic prefix and a dotted index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sym {
    prefix: String,
    index: Vec<usize>,
}

impl Sym {
    pub fn new(prefix: &str, index: &[usize]) -> Sym {
        Sym { prefix: prefix.to_string(), index: index.to_vec() }
    }

    pub fn prefix(&self) -> &str {
        &self.prefix
    }

    pub fn index(&self) -> &[usize] {
        &self.index
    }

    pub fn parse(s: &str) -> Result<Sym> {
        let split = s.find(|c: char| c.is_ascii_digit()).unwrap_or(s.len());
        let (prefix, rest) = s.split_at(split);
        if prefix.is_empty() || prefix.chars().any(|c| c.is_whitespace() || c == '.') {
            return Err(Error::Parse(format!("bad symbol '{s}'")));
        }
        let index = if rest.is_empty() {
            Vec::new()
        } else {
            rest.split('.')
                .map(|p| p.parse::<usize>().map_err(|_| Error::Parse(format!("bad symbol index in '{s}'"))))
                .collect::<Result<Vec<_>>>()?
        };
        Ok(Sym { prefix: prefix.to_string(), index })
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.prefix)?;
        let idx: Vec<String> = self.index.iter().map(|i| i.to_string()).collect();
        write!(f, "{}", idx.join("."))
    }
}

/// `Σ ρ_v[θ](x_v) + Σ σ_j[θ](y_j)`. Variables are the unknowns of a system, constants
/// stand for vectors of the ambient model. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearTerm {
    field: Field,
    vars: BTreeMap<Sym, Poly>,
    consts: BTreeMap<Sym, Poly>,
}

fn insert_add(map: &mut BTreeMap<Sym, Poly>, s: &Sym, p: &Poly) {
    if p.is_zero() {
        return;
    }
    let sum = match map.get(s) {
        Some(q) => q + p,
        None => p.clone(),
    };
    if sum.is_zero() {
        map.remove(s);
    } else {
        map.insert(s.clone(), sum);
    }
}

impl LinearTerm {
    pub fn zero(field: Field) -> LinearTerm {
        LinearTerm { field, vars: BTreeMap::new(), consts: BTreeMap::new() }
    }

    /// `ρ[θ](x)` for a variable `x`.
    pub fn var_poly(s: Sym, rho: Poly) -> LinearTerm {
        let mut t = LinearTerm::zero(rho.field());
        insert_add(&mut t.vars, &s, &rho);
        t
    }

    /// `θ^i(x)`.
    pub fn var_pow(field: Field, s: Sym, i: usize) -> LinearTerm {
        LinearTerm::var_poly(s, Poly::monomial(field.one(), i))
    }

    pub fn var(field: Field, s: Sym) -> LinearTerm {
        LinearTerm::var_pow(field, s, 0)
    }

    /// `σ[θ](y)` for a constant `y`.
    pub fn const_poly(s: Sym, sigma: Poly) -> LinearTerm {
        let mut t = LinearTerm::zero(sigma.field());
        insert_add(&mut t.consts, &s, &sigma);
        t
    }

    pub fn constant(field: Field, s: Sym) -> LinearTerm {
        LinearTerm::const_poly(s, Poly::one(field))
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn vars(&self) -> &BTreeMap<Sym, Poly> {
        &self.vars
    }

    pub fn consts(&self) -> &BTreeMap<Sym, Poly> {
        &self.consts
    }

    pub fn is_zero(&self) -> bool {
        self.vars.is_empty() && self.consts.is_empty()
    }

    pub fn has_vars(&self) -> bool {
        !self.vars.is_empty()
    }

    pub fn var_coeff(&self, s: &Sym) -> Poly {
        self.vars.get(s).cloned().unwrap_or_else(|| Poly::zero(self.field))
    }

    pub fn const_coeff(&self, s: &Sym) -> Poly {
        self.consts.get(s).cloned().unwrap_or_else(|| Poly::zero(self.field))
    }

    pub fn var_part(&self) -> LinearTerm {
        LinearTerm { field: self.field, vars: self.vars.clone(), consts: BTreeMap::new() }
    }

    pub fn const_part(&self) -> LinearTerm {
        LinearTerm { field: self.field, vars: BTreeMap::new(), consts: self.consts.clone() }
    }

    pub fn add_var(&mut self, s: &Sym, rho: &Poly) {
        insert_add(&mut self.vars, s, rho);
    }

    pub fn add_const(&mut self, s: &Sym, sigma: &Poly) {
        insert_add(&mut self.consts, s, sigma);
    }

    pub fn add(&self, other: &LinearTerm) -> LinearTerm {
        assert_eq!(self.field, other.field, "field mismatch");
        let mut out = self.clone();
        for (s, p) in &other.vars {
            insert_add(&mut out.vars, s, p);
        }
        for (s, p) in &other.consts {
            insert_add(&mut out.consts, s, p);
        }
        out
    }

    pub fn neg(&self) -> LinearTerm {
        self.apply_poly(&Poly::constant(-self.field.one()))
    }

    pub fn sub(&self, other: &LinearTerm) -> LinearTerm {
        self.add(&other.neg())
    }

    /// `ρ[θ]` applied to the whole term.
    pub fn apply_poly(&self, rho: &Poly) -> LinearTerm {
        let mut out = LinearTerm::zero(self.field);
        for (s, p) in &self.vars {
            insert_add(&mut out.vars, s, &(p * rho));
        }
        for (s, p) in &self.consts {
            insert_add(&mut out.consts, s, &(p * rho));
        }
        out
    }

    pub fn theta(&self) -> LinearTerm {
        self.apply_poly(&Poly::x(self.field))
    }

    pub fn scale(&self, c: &crate::field::Scalar) -> LinearTerm {
        self.apply_poly(&Poly::constant(c.clone()))
    }

    /// Replaces mapped symbols by terms (`ρ[θ](s) ↦ ρ[θ](term)`); unmapped symbols stay.
    pub fn substitute(&self, vars: &BTreeMap<Sym, LinearTerm>, consts: &BTreeMap<Sym, LinearTerm>) -> LinearTerm {
        let mut out = LinearTerm::zero(self.field);
        for (s, p) in &self.vars {
            match vars.get(s) {
                Some(t) => out = out.add(&t.apply_poly(p)),
                None => insert_add(&mut out.vars, s, p),
            }
        }
        for (s, p) in &self.consts {
            match consts.get(s) {
                Some(t) => out = out.add(&t.apply_poly(p)),
                None => insert_add(&mut out.consts, s, p),
            }
        }
        out
    }

    /// Evaluates the term on a model; every symbol must be assigned.
    pub fn eval(
        &self,
        m: &EndoModel,
        vars: &BTreeMap<Sym, Vector>,
        consts: &BTreeMap<Sym, Vector>,
    ) -> Result<Vector> {
        let mut acc = zero_vector(m.field(), m.dim());
        for (map, vals) in [(&self.vars, vars), (&self.consts, consts)] {
            for (s, p) in map {
                let v = vals.get(s).ok_or_else(|| Error::UnboundConstant(s.to_string()))?;
                if v.len() != m.dim() {
                    return Err(Error::Dimension(format!("value of {s} has length {}", v.len())));
                }
                let w = m.poly_apply_vec(p, v);
                acc = acc.iter().zip(&w).map(|(a, b)| a + b).collect();
            }
        }
        Ok(acc)
    }

    /// Largest θ-power of a variable, `None` if absent.
    pub fn var_degree(&self, s: &Sym) -> Option<usize> {
        self.vars.get(s).and_then(|p| p.deg())
    }
}

fn fmt_part(f: &mut fmt::Formatter<'_>, first: &mut bool, s: &Sym, p: &Poly) -> fmt::Result {
    for (i, c) in p.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let txt = c.to_string();
        let (neg, mag) = match (p.field(), txt.strip_prefix('-')) {
            (Field::Q, Some(m)) => (true, m.to_string()),
            _ => (false, txt),
        };
        if *first {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {} ", if neg { '-' } else { '+' })?;
        }
        *first = false;
        if mag != "1" {
            write!(f, "{mag}*")?;
        }
        match i {
            0 => write!(f, "{s}")?,
            1 => write!(f, "θ({s})")?,
            _ => write!(f, "θ^{i}({s})")?,
        }
    }
    Ok(())
}

impl fmt::Display for LinearTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (s, p) in self.vars.iter().chain(self.consts.iter()) {
            fmt_part(f, &mut first, s, p)?;
        }
        Ok(())
    }
}

/// `lead[θ](var) = rhs`, used to rewrite high θ-powers of `var`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub var: Sym,
    pub lead: Poly,
    pub rhs: LinearTerm,
}

/// Euclidean reduction of a term by relations listed so that each right-hand side only
/// mentions variables of earlier relations (or unrelated ones). Afterwards every related
/// variable has a coefficient of degree below its relation's leading degree.
pub fn reduce(t: &LinearTerm, rels: &[Relation]) -> LinearTerm {
    let mut out = t.clone();
    for rel in rels.iter().rev() {
        let coeff = out.var_coeff(&rel.var);
        if coeff.is_zero() {
            continue;
        }
        let (chi, r) = coeff.divmod(&rel.lead);
        if chi.is_zero() {
            continue;
        }
        out.vars.remove(&rel.var);
        if !r.is_zero() {
            out.vars.insert(rel.var.clone(), r);
        }
        out = out.add(&rel.rhs.apply_poly(&chi));
    }
    out
}

/// Checks that every related variable occurs only below its relation's degree.
pub fn is_reduced(t: &LinearTerm, rels: &[Relation]) -> bool {
    rels.iter().all(|rel| match t.var_degree(&rel.var) {
        None => true,
        Some(d) => rel.lead.deg().is_some_and(|ld| d < ld),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: Field = Field::Q;

    fn s(x: &str) -> Sym {
        Sym::parse(x).unwrap()
    }

    #[test]
    fn symbol_roundtrip() {
        for t in ["x'2", "ld1", "ke2.3", "y10"] {
            assert_eq!(s(t).to_string(), t);
        }
        assert!(Sym::parse("3x").is_err());
        assert!(s("x2") < s("x10"));
    }

    #[test]
    fn display_matches_hand_notation() {
        let t = LinearTerm::constant(Q, s("y1")).add(&LinearTerm::const_poly(s("y2"), Poly::x(Q)));
        assert_eq!(t.to_string(), "y1 + θ(y2)");
        let u = LinearTerm::var_pow(Q, s("x'1"), 1).sub(&LinearTerm::constant(Q, s("y2")));
        assert_eq!(u.to_string(), "θ(x'1) - y2");
    }

    #[test]
    fn reduce_by_monic_relation() {
        let rel = Relation {
            var: s("x1"),
            lead: Poly::from_ints(Q, &[0, 0, 1]),
            rhs: LinearTerm::constant(Q, s("y1")),
        };
        let t2 = LinearTerm::var_pow(Q, s("x1"), 2);
        assert_eq!(reduce(&t2, std::slice::from_ref(&rel)), LinearTerm::constant(Q, s("y1")));
        let t3 = LinearTerm::var_pow(Q, s("x1"), 3);
        assert_eq!(reduce(&t3, std::slice::from_ref(&rel)), LinearTerm::const_poly(s("y1"), Poly::x(Q)));
        let t1 = LinearTerm::var_pow(Q, s("x1"), 1);
        assert_eq!(reduce(&t1, &[rel]), t1);
    }

    #[test]
    fn substitution_composes_polynomials() {
        let t = LinearTerm::var_poly(s("x1"), Poly::x(Q));
        let mut map = BTreeMap::new();
        map.insert(s("x1"), LinearTerm::var(Q, s("z1")).add(&LinearTerm::constant(Q, s("y1"))));
        let out = t.substitute(&map, &BTreeMap::new());
        assert_eq!(out.to_string(), "θ(z1) + θ(y1)");
    }
}
