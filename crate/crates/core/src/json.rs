//! JSON encodings for every interchange type. Objects are built on `serde_json::Map`,
//! which keeps keys sorted, so output is deterministic.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Map, Value};

use crate::diagonalize::pipeline::{Diagonalization, Substitution};
use crate::diagonalize::rcf::Rcf;
use crate::diagonalize::system::{
    Binding, DiagonalSystem, FBlock, KeRow, LdRow, TriLdRow, TriRow, TriangularSystem,
};
use crate::diagonalize::term::{LinearTerm, Sym};
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::kernel_config::{ConstraintSystem, Equation, KernelConfiguration, Normalized, Val};
use crate::linalg::{Matrix, Vector};
use crate::model::EndoModel;
use crate::poly::Poly;
use crate::ring::{Expr, Generator, RingElem};

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn get<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| perr(format!("missing key \"{key}\"")))
}

fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| perr(format!("{what} must be an array")))
}

fn as_usize(v: &Value, what: &str) -> Result<usize> {
    v.as_u64().map(|n| n as usize).ok_or_else(|| perr(format!("{what} must be a non-negative integer")))
}

pub fn parse_str(s: &str) -> Result<Value> {
    serde_json::from_str(s).map_err(|e| perr(e.to_string()))
}

pub fn to_string(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values are always serializable")
}

// ---- fields, scalars, polynomials ----

pub fn field_to_json(f: Field) -> Value {
    match f {
        Field::Q => json!("Q"),
        Field::Fp(p) => json!({ "GFp": p }),
    }
}

pub fn field_from_json(v: &Value) -> Result<Field> {
    match v {
        Value::String(s) if s == "Q" => Ok(Field::Q),
        Value::Object(o) => {
            let p = o.get("GFp").and_then(Value::as_u64).ok_or_else(|| perr("field object needs integer \"GFp\""))?;
            Field::gf(p)
        }
        _ => Err(perr(format!("unknown field {v}"))),
    }
}

/// Parses a field name as used on the command line: `Q`, `GF(p)`, `GFp` or a bare prime.
pub fn field_from_name(s: &str) -> Result<Field> {
    let t = s.trim();
    if t.eq_ignore_ascii_case("q") {
        return Ok(Field::Q);
    }
    let digits = t.trim_start_matches("GF").trim_start_matches("gf").trim_start_matches('(').trim_end_matches(')');
    let p = digits.parse::<u64>().map_err(|_| perr(format!("unknown field \"{s}\"")))?;
    Field::gf(p)
}

/// Rationals become canonical strings ("3", "-1/2"); prime-field residues stay integers.
pub fn scalar_to_json(c: &Scalar) -> Value {
    match c {
        Scalar::Q(_) => Value::String(c.to_string()),
        Scalar::Fp { v, .. } => json!(v),
    }
}

pub fn scalar_from_json(field: Field, v: &Value) -> Result<Scalar> {
    match v {
        Value::String(s) => field.parse(s),
        Value::Number(n) => field.parse(&n.to_string()),
        _ => Err(perr(format!("invalid scalar {v}"))),
    }
}

pub fn vector_to_json(v: &[Scalar]) -> Value {
    Value::Array(v.iter().map(scalar_to_json).collect())
}

pub fn vector_from_json(field: Field, v: &Value) -> Result<Vector> {
    as_array(v, "vector")?.iter().map(|c| scalar_from_json(field, c)).collect()
}

pub fn poly_to_json(p: &Poly) -> Value {
    json!({ "field": field_to_json(p.field()), "coeffs": vector_to_json(p.coeffs()) })
}

/// A polynomial object; the `"field"` key may be omitted when a field is implied.
pub fn poly_from_json(v: &Value, implied: Option<Field>) -> Result<Poly> {
    let field = match v.get("field") {
        Some(f) => field_from_json(f)?,
        None => implied.ok_or_else(|| perr("polynomial without a field"))?,
    };
    if let Some(i) = implied {
        if i != field {
            return Err(Error::FieldMismatch(i.to_string(), field.to_string()));
        }
    }
    Ok(Poly::new(field, vector_from_json(field, get(v, "coeffs")?)?))
}

fn polys_to_json<'a>(ps: impl IntoIterator<Item = &'a Poly>) -> Value {
    Value::Array(ps.into_iter().map(poly_to_json).collect())
}

fn polys_from_json(v: &Value, field: Field) -> Result<Vec<Poly>> {
    as_array(v, "polynomial list")?.iter().map(|p| poly_from_json(p, Some(field))).collect()
}

pub fn matrix_to_json(m: &Matrix) -> Value {
    Value::Array(m.to_rows().iter().map(|r| vector_to_json(r)).collect())
}

pub fn matrix_from_json(field: Field, v: &Value) -> Result<Matrix> {
    let rows: Vec<Vector> = as_array(v, "matrix")?.iter().map(|r| vector_from_json(field, r)).collect::<Result<_>>()?;
    Matrix::from_rows(field, rows)
}

// ---- configurations and constraint systems ----

fn val_to_json(v: Val) -> Value {
    match v {
        Val::Fin(n) => json!(n),
        Val::Inf => json!("inf"),
    }
}

fn val_from_json(v: &Value) -> Result<Val> {
    match v {
        Value::String(s) if s == "inf" => Ok(Val::Inf),
        Value::String(s) => s.parse::<u32>().map(Val::Fin).map_err(|_| perr(format!("invalid value {s:?}"))),
        Value::Number(n) => n
            .as_u64()
            .and_then(|n| u32::try_from(n).ok())
            .map(Val::Fin)
            .ok_or_else(|| perr(format!("invalid value {n}"))),
        _ => Err(perr(format!("invalid value {v}"))),
    }
}

pub fn config_to_json(c: &KernelConfiguration) -> Value {
    let default = match c.default_value() {
        Val::Fin(_) => json!("0"),
        Val::Inf => json!("inf"),
    };
    let ex: Vec<Value> = c.exceptions().iter().map(|(f, v)| json!({ "f": poly_to_json(f), "v": val_to_json(*v) })).collect();
    json!({
        "field": field_to_json(c.field()),
        "default": default,
        "exceptions": ex,
        "degree": val_to_json(c.degree()),
    })
}

pub fn config_from_json(v: &Value, default_field: Option<Field>) -> Result<KernelConfiguration> {
    let field = match v.get("field") {
        Some(f) => field_from_json(f)?,
        None => default_field.ok_or_else(|| perr("configuration without a field"))?,
    };
    let default = val_from_json(get(v, "default")?)?;
    let mut ex = Vec::new();
    for e in as_array(get(v, "exceptions")?, "exceptions")? {
        ex.push((poly_from_json(get(e, "f")?, Some(field))?, val_from_json(get(e, "v")?)?));
    }
    let degree = val_from_json(get(v, "degree")?)?;
    KernelConfiguration::new(field, default, ex, degree)
}

pub fn normalized_to_json(n: &Normalized) -> Value {
    match n {
        Normalized::Consistent(c) => config_to_json(c),
        Normalized::Inconsistent => json!("inconsistent"),
    }
}

fn side_to_json(side: &[Vec<Poly>]) -> Value {
    Value::Array(side.iter().map(polys_to_json).collect())
}

fn side_from_json(v: &Value, field: Field) -> Result<Vec<Vec<Poly>>> {
    as_array(v, "equation side")?.iter().map(|inner| polys_from_json(inner, field)).collect()
}

pub fn constraint_system_to_json(s: &ConstraintSystem) -> Value {
    let eqs: Vec<Value> =
        s.equations.iter().map(|e| json!({ "lhs": side_to_json(&e.lhs), "rhs": side_to_json(&e.rhs) })).collect();
    json!({ "field": field_to_json(s.field), "equations": eqs })
}

/// The field comes from the `"field"` key, else from the first polynomial, else `default_field`.
pub fn constraint_system_from_json(v: &Value, default_field: Field) -> Result<ConstraintSystem> {
    let eqs = as_array(get(v, "equations")?, "equations")?;
    let field = match v.get("field") {
        Some(f) => field_from_json(f)?,
        None => eqs
            .iter()
            .flat_map(|e| ["lhs", "rhs"].into_iter().filter_map(move |k| e.get(k)))
            .filter_map(Value::as_array)
            .flatten()
            .filter_map(Value::as_array)
            .flatten()
            .find_map(|p| p.get("field"))
            .map(field_from_json)
            .transpose()?
            .unwrap_or(default_field),
    };
    let equations = eqs
        .iter()
        .map(|e| Ok(Equation { lhs: side_from_json(get(e, "lhs")?, field)?, rhs: side_from_json(get(e, "rhs")?, field)? }))
        .collect::<Result<_>>()?;
    Ok(ConstraintSystem { field, equations })
}

// ---- models ----

pub fn model_to_json(m: &EndoModel) -> Value {
    json!({ "field": field_to_json(m.field()), "dim": m.dim(), "theta": matrix_to_json(m.theta()) })
}

pub fn model_from_json(v: &Value, default_field: Option<Field>) -> Result<EndoModel> {
    let field = match v.get("field") {
        Some(f) => field_from_json(f)?,
        None => default_field.ok_or_else(|| perr("model without a field"))?,
    };
    let dim = as_usize(get(v, "dim")?, "dim")?;
    let theta = if dim == 0 { Matrix::zero(field, 0, 0) } else { matrix_from_json(field, get(v, "theta")?)? };
    if theta.rows() != dim || theta.cols() != dim {
        return Err(Error::Dimension(format!("theta is {}x{}, dim is {dim}", theta.rows(), theta.cols())));
    }
    EndoModel::new(theta)
}

pub fn rcf_to_json(r: &Rcf) -> Value {
    json!({ "xi": polys_to_json(&r.xis), "A": matrix_to_json(&r.a), "A_inv": matrix_to_json(&r.a_inv) })
}

// ---- ring elements and expressions ----

pub fn ring_elem_to_json(r: &RingElem) -> Value {
    let im = match r.im_part() {
        Some((rho, eta)) => json!({ "rho": poly_to_json(rho), "eta": poly_to_json(eta) }),
        None => Value::Null,
    };
    let ker: Vec<Value> =
        r.ker_parts().iter().map(|(f, c)| json!({ "f": poly_to_json(f), "rho_f": poly_to_json(c) })).collect();
    json!({ "config": config_to_json(r.config()), "im": im, "ker": ker })
}

pub fn ring_elem_from_json(v: &Value, default_field: Option<Field>) -> Result<RingElem> {
    let config = config_from_json(get(v, "config")?, default_field)?;
    let field = config.field();
    let im = match get(v, "im")? {
        Value::Null => None,
        o => Some((poly_from_json(get(o, "rho")?, Some(field))?, poly_from_json(get(o, "eta")?, Some(field))?)),
    };
    let mut ker = BTreeMap::new();
    for e in as_array(get(v, "ker")?, "ker")? {
        ker.insert(poly_from_json(get(e, "f")?, Some(field))?, poly_from_json(get(e, "rho_f")?, Some(field))?);
    }
    RingElem::from_parts(&config, im, ker)
}

/// Leaves: `{"gen":"rho","poly":p}`, `{"gen":"proj_im","F":[..]}`, `{"gen":"proj_ker","F":[..]}`,
/// `{"gen":"inv","eta":p}`; inner nodes `{"op":"add"|"mul","args":[..]}`.
pub fn expr_to_json(e: &Expr) -> Value {
    match e {
        Expr::Gen(Generator::Rho(p)) => json!({ "gen": "rho", "poly": poly_to_json(p) }),
        Expr::Gen(Generator::ProjIm(fs)) => json!({ "gen": "proj_im", "F": polys_to_json(fs) }),
        Expr::Gen(Generator::ProjKer(fs)) => json!({ "gen": "proj_ker", "F": polys_to_json(fs) }),
        Expr::Gen(Generator::Inv(p)) => json!({ "gen": "inv", "eta": poly_to_json(p) }),
        Expr::Add(args) => json!({ "op": "add", "args": args.iter().map(expr_to_json).collect::<Vec<_>>() }),
        Expr::Mul(args) => json!({ "op": "mul", "args": args.iter().map(expr_to_json).collect::<Vec<_>>() }),
    }
}

pub fn expr_from_json(v: &Value, field: Field) -> Result<Expr> {
    if let Some(op) = v.get("op") {
        let args: Vec<Expr> =
            as_array(get(v, "args")?, "args")?.iter().map(|a| expr_from_json(a, field)).collect::<Result<_>>()?;
        return match op.as_str() {
            Some("add") => Ok(Expr::Add(args)),
            Some("mul") => Ok(Expr::Mul(args)),
            _ => Err(perr(format!("unknown op {op}"))),
        };
    }
    let set = |v: &Value| -> Result<BTreeSet<Poly>> { Ok(polys_from_json(get(v, "F")?, field)?.into_iter().collect()) };
    match get(v, "gen")?.as_str() {
        Some("rho") => Ok(Expr::Gen(Generator::Rho(poly_from_json(get(v, "poly")?, Some(field))?))),
        Some("proj_im") => Ok(Expr::Gen(Generator::ProjIm(set(v)?))),
        Some("proj_ker") => Ok(Expr::Gen(Generator::ProjKer(set(v)?))),
        Some("inv") => Ok(Expr::Gen(Generator::Inv(poly_from_json(get(v, "eta")?, Some(field))?))),
        _ => Err(perr(format!("unknown generator in {v}"))),
    }
}

// ---- linear terms and systems ----

fn sym_map_to_json(m: &BTreeMap<Sym, Poly>) -> Value {
    Value::Object(m.iter().map(|(s, p)| (s.to_string(), poly_to_json(p))).collect())
}

pub fn term_to_json(t: &LinearTerm) -> Value {
    json!({ "vars": sym_map_to_json(t.vars()), "consts": sym_map_to_json(t.consts()) })
}

pub fn term_from_json(v: &Value, field: Field) -> Result<LinearTerm> {
    let mut t = LinearTerm::zero(field);
    for (key, is_var) in [("vars", true), ("consts", false)] {
        if let Some(o) = v.get(key) {
            let o = o.as_object().ok_or_else(|| perr(format!("\"{key}\" must be an object")))?;
            for (s, p) in o {
                let s = Sym::parse(s)?;
                let p = poly_from_json(p, Some(field))?;
                if is_var {
                    t.add_var(&s, &p);
                } else {
                    t.add_const(&s, &p);
                }
            }
        }
    }
    Ok(t)
}

/// The constant part of a row: `null` for zero, a constant id for `1·id`, otherwise an
/// object from constant ids to polynomials.
fn u_to_json(t: &LinearTerm) -> Value {
    if t.is_zero() {
        return Value::Null;
    }
    let cs = t.consts();
    if cs.len() == 1 {
        let (s, p) = cs.iter().next().expect("one entry");
        if p.is_one() {
            return Value::String(s.to_string());
        }
    }
    sym_map_to_json(cs)
}

/// Collects vector-valued constants; they are given fresh ids `v1, v2, ...`.
struct UParser {
    field: Field,
    vectors: BTreeMap<Sym, Vector>,
}

impl UParser {
    fn parse(&mut self, v: &Value) -> Result<LinearTerm> {
        let field = self.field;
        match v {
            Value::Null => Ok(LinearTerm::zero(field)),
            Value::String(s) => Ok(LinearTerm::constant(field, Sym::parse(s)?)),
            Value::Array(_) => {
                let vec = vector_from_json(field, v)?;
                let s = Sym::new("v", &[self.vectors.len() + 1]);
                self.vectors.insert(s.clone(), vec);
                Ok(LinearTerm::constant(field, s))
            }
            Value::Object(o) => {
                let mut t = LinearTerm::zero(field);
                for (s, p) in o {
                    t.add_const(&Sym::parse(s)?, &poly_from_json(p, Some(field))?);
                }
                Ok(t)
            }
            _ => Err(perr(format!("invalid constant term {v}"))),
        }
    }
}

fn binding_to_json(b: &Binding, out: &mut Map<String, Value>) {
    out.insert("model".into(), model_to_json(&b.model));
    let consts: Map<String, Value> = b.values.iter().map(|(s, v)| (s.to_string(), vector_to_json(v))).collect();
    out.insert("constants".into(), Value::Object(consts));
}

fn binding_from_json(v: &Value, field: Field, vectors: BTreeMap<Sym, Vector>) -> Result<Option<Binding>> {
    let model = match v.get("model") {
        Some(m) => model_from_json(m, Some(field))?,
        None if vectors.is_empty() && v.get("constants").is_none() => return Ok(None),
        None => return Err(perr("constant values given without a \"model\"")),
    };
    let mut values = vectors;
    if let Some(c) = v.get("constants") {
        let c = c.as_object().ok_or_else(|| perr("\"constants\" must be an object"))?;
        for (s, vec) in c {
            let s = Sym::parse(s)?;
            if values.insert(s.clone(), vector_from_json(field, vec)?).is_some() {
                return Err(perr(format!("constant {s} bound twice")));
            }
        }
    }
    for (s, vec) in &values {
        if vec.len() != model.dim() {
            return Err(Error::Dimension(format!("constant {s} has length {}, model dim {}", vec.len(), model.dim())));
        }
    }
    Ok(Some(Binding { model, values }))
}

fn padded(mut ps: Vec<Poly>, n: usize, field: Field) -> Vec<Poly> {
    while ps.len() < n {
        ps.push(Poly::zero(field));
    }
    ps
}

/// Triangular system, with `Q` lists padded to full length so equal systems print equally.
pub fn triangular_to_json(s: &TriangularSystem) -> Value {
    let field = s.config.field();
    let ld: Vec<Value> = s
        .ld
        .iter()
        .enumerate()
        .map(|(k, r)| {
            json!({
                "xi": poly_to_json(&r.xi),
                "P": polys_to_json(&padded(r.p.clone(), s.li, field)),
                "Q": polys_to_json(&padded(r.q.clone(), k, field)),
                "u": u_to_json(&r.u),
            })
        })
        .collect();
    let blocks: Vec<Value> = s
        .blocks
        .iter()
        .map(|b| {
            let rows: Vec<Value> = b
                .rows
                .iter()
                .enumerate()
                .map(|(k, r)| {
                    json!({ "q": r.q, "Q": polys_to_json(&padded(r.coeffs.clone(), k, field)), "u": u_to_json(&r.u) })
                })
                .collect();
            json!({ "f": poly_to_json(&b.f), "rows": rows })
        })
        .collect();
    let mut out = Map::new();
    out.insert("config".into(), config_to_json(&s.config));
    out.insert("li".into(), json!(s.li));
    out.insert("ld".into(), Value::Array(ld));
    out.insert("blocks".into(), Value::Array(blocks));
    if let Some(b) = &s.binding {
        binding_to_json(b, &mut out);
    }
    Value::Object(out)
}

pub fn triangular_from_json(v: &Value, default_field: Option<Field>) -> Result<TriangularSystem> {
    let config = config_from_json(get(v, "config")?, default_field)?;
    let field = config.field();
    let li = match v.get("li") {
        Some(n) => as_usize(n, "li")?,
        None => 0,
    };
    let mut up = UParser { field, vectors: BTreeMap::new() };
    let opt_polys = |r: &Value, key: &str| -> Result<Vec<Poly>> {
        match r.get(key) {
            Some(ps) => polys_from_json(ps, field),
            None => Ok(Vec::new()),
        }
    };
    let mut ld = Vec::new();
    for r in as_array(v.get("ld").unwrap_or(&json!([])), "ld")? {
        ld.push(TriLdRow {
            xi: poly_from_json(get(r, "xi")?, Some(field))?,
            p: opt_polys(r, "P")?,
            q: opt_polys(r, "Q")?,
            u: up.parse(r.get("u").unwrap_or(&Value::Null))?,
        });
    }
    let mut blocks = Vec::new();
    for b in as_array(v.get("blocks").unwrap_or(&json!([])), "blocks")? {
        let f = poly_from_json(get(b, "f")?, Some(field))?;
        let mut rows = Vec::new();
        for r in as_array(get(b, "rows")?, "rows")? {
            let q = get(r, "q")?.as_u64().and_then(|q| u32::try_from(q).ok()).ok_or_else(|| perr("\"q\" must be a small integer"))?;
            rows.push(TriRow { q, coeffs: opt_polys(r, "Q")?, u: up.parse(r.get("u").unwrap_or(&Value::Null))? });
        }
        blocks.push(FBlock { f, rows });
    }
    let binding = binding_from_json(v, field, up.vectors)?;
    Ok(TriangularSystem { config, li, ld, blocks, binding })
}

/// A diagonal system in the triangular JSON shape: all couplings zero, kernel rows grouped
/// by polynomial in order of first appearance.
pub fn diagonal_as_triangular(s: &DiagonalSystem) -> TriangularSystem {
    let ld = s.ld.iter().map(|r: &LdRow| TriLdRow { xi: r.xi.clone(), p: r.p.clone(), q: Vec::new(), u: r.u.clone() }).collect();
    let mut blocks: Vec<FBlock> = Vec::new();
    for r in &s.ke {
        let row = TriRow { q: r.q, coeffs: Vec::new(), u: r.u.clone() };
        match blocks.iter_mut().find(|b| b.f == r.f) {
            Some(b) => b.rows.push(row),
            None => blocks.push(FBlock { f: r.f.clone(), rows: vec![row] }),
        }
    }
    TriangularSystem { config: s.config.clone(), li: s.li, ld, blocks, binding: s.binding.clone() }
}

/// Inverse of `diagonal_as_triangular`; fails when a coupling is nonzero.
pub fn triangular_as_diagonal(t: &TriangularSystem) -> Result<DiagonalSystem> {
    let coupled = t.ld.iter().any(|r| r.q.iter().any(|p| !p.is_zero()))
        || t.blocks.iter().any(|b| b.rows.iter().any(|r| r.coeffs.iter().any(|p| !p.is_zero())));
    if coupled {
        return Err(Error::InvalidSystem("shape: system has nonzero couplings".into()));
    }
    let ld = t.ld.iter().map(|r| LdRow { xi: r.xi.clone(), p: r.p.clone(), u: r.u.clone() }).collect();
    let ke = t
        .blocks
        .iter()
        .flat_map(|b| b.rows.iter().map(move |r| KeRow { f: b.f.clone(), q: r.q, u: r.u.clone() }))
        .collect();
    Ok(DiagonalSystem { config: t.config.clone(), li: t.li, ld, ke, binding: t.binding.clone() })
}

fn substitution_to_json(s: &Substitution) -> Value {
    json!({ "var": s.var.to_string(), "power": s.power, "term": term_to_json(&s.term) })
}

pub fn substitution_from_json(v: &Value, field: Field) -> Result<Substitution> {
    let var = Sym::parse(get(v, "var")?.as_str().ok_or_else(|| perr("\"var\" must be a string"))?)?;
    Ok(Substitution { var, power: as_usize(get(v, "power")?, "power")?, term: term_from_json(get(v, "term")?, field)? })
}

pub fn diagonalization_to_json(d: &Diagonalization) -> Value {
    json!({
        "system": triangular_to_json(&diagonal_as_triangular(&d.system)),
        "substitutions": d.substitutions.iter().map(substitution_to_json).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagonalize::pipeline::diagonalize_system;

    fn q(c: &[i64]) -> Poly {
        Poly::from_ints(Field::Q, c)
    }

    #[test]
    fn rationals_are_strings() {
        let p = Poly::new(Field::Q, vec![Field::Q.ratio(-1, 2).unwrap(), Field::Q.one()]);
        let v = poly_to_json(&p);
        assert_eq!(v.to_string(), r#"{"coeffs":["-1/2","1"],"field":"Q"}"#);
        assert_eq!(poly_from_json(&v, None).unwrap(), p);
        let g = Poly::from_ints(Field::Fp(5), &[4, 1]);
        assert_eq!(poly_to_json(&g).to_string(), r#"{"coeffs":[4,1],"field":{"GFp":5}}"#);
    }

    #[test]
    fn config_roundtrip() {
        let c = KernelConfiguration::transcendental(Field::Q, Val::Inf, [(q(&[1, 0, 1]), Val::Fin(2)), (q(&[0, 1]), Val::Fin(0))])
            .unwrap();
        let v = config_to_json(&c);
        assert_eq!(config_from_json(&v, None).unwrap(), c);
        let a = KernelConfiguration::from_mipo(&q(&[1, 0, 1])).unwrap();
        assert_eq!(config_from_json(&config_to_json(&a), None).unwrap(), a);
    }

    #[test]
    fn field_names() {
        assert_eq!(field_from_name("Q").unwrap(), Field::Q);
        assert_eq!(field_from_name("GF(5)").unwrap(), Field::Fp(5));
        assert_eq!(field_from_name("7").unwrap(), Field::Fp(7));
        assert!(field_from_name("GF(6)").is_err());
    }

    #[test]
    fn diagonal_system_survives_diagonalization_as_json() {
        let c = KernelConfiguration::c_infinity(Field::Q);
        let text = r#"{"config":{"default":"inf","exceptions":[],"degree":"inf","field":"Q"},
            "li":1,"ld":[{"xi":{"field":"Q","coeffs":["1","0","1"]},"P":[{"field":"Q","coeffs":["0","1"]}],"Q":[],"u":"y1"}],
            "blocks":[]}"#;
        let t = triangular_from_json(&parse_str(text).unwrap(), None).unwrap();
        assert_eq!(t.config, c);
        let d = diagonalize_system(&t).unwrap();
        let out = diagonalization_to_json(&d);
        assert_eq!(out["system"], triangular_to_json(&t));
        let back = triangular_from_json(&out["system"], None).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn vector_constants_need_a_model() {
        let text = r#"{"config":{"default":"inf","exceptions":[],"degree":"inf","field":"Q"},
            "ld":[{"xi":{"coeffs":["0","1"]},"u":["1","2"]}]}"#;
        assert!(triangular_from_json(&parse_str(text).unwrap(), None).is_err());
    }
}
