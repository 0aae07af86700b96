//! Explicit model builders: companion witnesses, finite extensions, image-completion
//! steps, separating witnesses, realization of diagonal systems and extraction of
//! triangular kernel blocks from a model.

use std::collections::{BTreeMap, BTreeSet};

use crate::diagonalize::rcf::companion;
use crate::diagonalize::system::{ke_sym, ld_sym, validate_diagonal, Binding, DiagonalSystem, FBlock, TriRow};
use crate::diagonalize::{LinearTerm, Sym};
use crate::error::{Error, Result};
use crate::factor::is_irreducible;
use crate::field::{Field, Scalar};
use crate::kernel_config::{KernelConfiguration, Val};
use crate::linalg::{unit_vector, zero_vector, Matrix, Subspace, Vector};
use crate::model::EndoModel;
use crate::poly::Poly;

/// `copies` companion blocks of `rho` on the diagonal.
pub fn build_companion_model(rho: &Poly, copies: usize) -> Result<EndoModel> {
    if copies == 0 {
        return Err(Error::Precondition("at least one copy is required".into()));
    }
    let block = companion(rho)?;
    let mut acc = block.clone();
    for _ in 1..copies {
        acc = acc.block_diag(&block);
    }
    EndoModel::new(acc)
}

/// Appends `extra_blocks` companion blocks to a C-endomorphism. Algebraic configurations
/// use the minimal polynomial; transcendental ones use `surrogate`, defaulting to the
/// product of `f^C(f)` over exceptions with finite nonzero value.
pub fn standard_extend(
    m: &EndoModel,
    c: &KernelConfiguration,
    extra_blocks: usize,
    surrogate: Option<&Poly>,
) -> Result<EndoModel> {
    if !m.is_c_endomorphism(c)? {
        return Err(Error::NotCEndomorphism);
    }
    let rho = if c.is_algebraic() {
        c.mipo()?
    } else {
        match surrogate {
            Some(p) => p.clone(),
            None => c.f_power_product(&c.finite_positive())?,
        }
    };
    if rho.deg().is_none_or(|d| d == 0) {
        return Err(Error::Precondition(format!("block polynomial {rho} must have positive degree")));
    }
    let mut out = m.clone();
    for _ in 0..extra_blocks {
        out = out.direct_sum(&EndoModel::new(companion(&rho)?)?)?;
    }
    if !out.is_c_endomorphism(c)? {
        return Err(Error::Precondition(format!("companion blocks of {rho} break the configuration")));
    }
    Ok(out)
}

/// `Im(f^C) = Im(f^{C+1})` for every relevant `f` with finite value; no
/// C-endomorphism requirement.
fn image_deficiency(m: &EndoModel, c: &KernelConfiguration) -> Result<Option<(Poly, Vector)>> {
    for f in m.relevant_factors(c)? {
        if let Val::Fin(k) = c.value(&f) {
            let fk = m.poly_apply(&f.pow(k))?;
            let fk1 = m.poly_apply(&f.pow(k + 1))?;
            let big = fk.column_space();
            let small = fk1.column_space();
            if let Some(v) = big.basis().iter().find(|v| !small.contains(v)) {
                return Ok(Some((f, v.clone())));
            }
        }
    }
    Ok(None)
}

/// Extends `m` by `deg f` vectors `w^0..w^{d-1}` with `θ'(w^i) = w^{i+1}` and
/// `θ'(w^{d-1}) = x - Σ f_i w^i`, where `f^C[θ](x) = v`, so that `f^{C+1}[θ'](w^0) = v`.
pub fn image_complete_extend_step(m: &EndoModel, c: &KernelConfiguration, f: &Poly, v: &[Scalar]) -> Result<EndoModel> {
    if !c.is_transcendental() {
        return Err(Error::NotTranscendental);
    }
    if !is_irreducible(f)? || !f.is_monic() {
        return Err(Error::NotIrreducible(f.to_string()));
    }
    let k = c.value(f).finite().ok_or_else(|| Error::InfiniteValue(f.to_string()))?;
    let n = m.dim();
    if v.len() != n {
        return Err(Error::Dimension(format!("vector of length {} in a model of dimension {n}", v.len())));
    }
    let x = m
        .poly_apply(&f.pow(k))?
        .solve(v)
        .ok_or_else(|| Error::Precondition(format!("v is not in Im(({f})^{k})")))?;
    if m.poly_apply(&f.pow(k + 1))?.solve(v).is_some() {
        return Err(Error::Precondition(format!("v already lies in Im(({f})^{})", k + 1)));
    }
    let d = f.deg().unwrap_or(0);
    let field = m.field();
    let mut t = Matrix::zero(field, n + d, n + d);
    for i in 0..n {
        for j in 0..n {
            t.set(i, j, m.theta().get(i, j).clone());
        }
    }
    for i in 0..d - 1 {
        t.set(n + i + 1, n + i, field.one());
    }
    for (i, xi) in x.iter().enumerate() {
        t.set(i, n + d - 1, xi.clone());
    }
    for i in 0..d {
        t.set(n + i, n + d - 1, -&f.coeff(i));
    }
    EndoModel::new(t)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DriverOutcome {
    Completed { model: EndoModel, steps: usize },
    GaveUp { model: EndoModel, steps: usize },
}

impl DriverOutcome {
    pub fn model(&self) -> &EndoModel {
        match self {
            DriverOutcome::Completed { model, .. } | DriverOutcome::GaveUp { model, .. } => model,
        }
    }
}

/// Repeats the extension step on the first image deficiency until none is left, giving
/// up after `dim · Σ deg(f^C)` steps.
pub fn image_complete_driver(m: &EndoModel, c: &KernelConfiguration) -> Result<DriverOutcome> {
    let mut weight = 0usize;
    for f in m.relevant_factors(c)? {
        if let Val::Fin(k) = c.value(&f) {
            weight += f.deg().unwrap_or(0) * k as usize;
        }
    }
    let cap = m.dim() * weight;
    let mut model = m.clone();
    for steps in 0..=cap {
        match image_deficiency(&model, c)? {
            None => return Ok(DriverOutcome::Completed { model, steps }),
            Some(_) if steps == cap => return Ok(DriverOutcome::GaveUp { model, steps }),
            Some((f, v)) => model = image_complete_extend_step(&model, c, &f, &v)?,
        }
    }
    unreachable!("loop returns at the cap")
}

fn linear_candidates(field: Field) -> Box<dyn Iterator<Item = Poly>> {
    match field.elements() {
        Some(it) => Box::new(it.collect::<Vec<_>>().into_iter().map(|a| Poly::linear(&a))),
        None => Box::new((0i64..).flat_map(move |n| {
            let vals = if n == 0 { vec![0] } else { vec![n, -n] };
            vals.into_iter().map(move |a| Poly::linear(&field.int(a)))
        })),
    }
}

/// First monic irreducible of degree 2..=max_deg over a finite field that is not in `skip`.
fn higher_irreducible(field: Field, max_deg: usize, skip: &BTreeSet<Poly>) -> Option<Poly> {
    let elems: Vec<Scalar> = field.elements()?.collect();
    let p = elems.len();
    for d in 2..=max_deg {
        let total = p.checked_pow(d as u32)?;
        for code in 0..total {
            let mut coeffs = Vec::with_capacity(d + 1);
            let mut r = code;
            for _ in 0..d {
                coeffs.push(elems[r % p].clone());
                r /= p;
            }
            coeffs.push(field.one());
            let f = Poly::new(field, coeffs);
            if !skip.contains(&f) && is_irreducible(&f).unwrap_or(false) {
                return Some(f);
            }
        }
    }
    None
}

/// A finite model that is a C-endomorphism for exactly one of the two configurations:
/// `companion(f^{v+1})` for the first `f` whose values differ, `v` being the smaller one.
pub fn distinguish_witness(c1: &KernelConfiguration, c2: &KernelConfiguration) -> Result<EndoModel> {
    if c1.field() != c2.field() {
        return Err(Error::ConfigMismatch);
    }
    if c1 == c2 {
        return Err(Error::EqualConfigs);
    }
    let field = c1.field();
    let keys: BTreeSet<Poly> = c1.exceptions().keys().chain(c2.exceptions().keys()).cloned().collect();
    let mut candidates: Vec<Poly> = keys.iter().cloned().collect();
    if c1.default_value() != c2.default_value() {
        let linear = linear_candidates(field).take(keys.len() + 1).find(|f| !keys.contains(f));
        candidates.extend(linear.or_else(|| higher_irreducible(field, 8, &keys)));
    }
    for f in candidates {
        let (v1, v2) = (c1.value(&f), c2.value(&f));
        let (small, big, v) = match (v1, v2) {
            (Val::Fin(a), b) if Val::Fin(a) < b => (c1, c2, a),
            (a, Val::Fin(b)) if Val::Fin(b) < a => (c2, c1, b),
            _ => continue,
        };
        let m = build_companion_model(&f.pow(v + 1), 1)?;
        if m.is_c_endomorphism(big)? && !m.is_c_endomorphism(small)? {
            return Ok(m);
        }
        return Err(Error::Internal(format!("companion witness for {f} does not separate")));
    }
    Err(Error::NoFiniteWitness)
}

/// A finite model realizing a diagonal system without free variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Realization {
    pub model: EndoModel,
    /// Solutions for the system's variables.
    pub witness: BTreeMap<Sym, Vector>,
    /// The bound constants, padded to the new dimension.
    pub constants: BTreeMap<Sym, Vector>,
    pub base_dim: usize,
}

fn pad(v: &[Scalar], n: usize) -> Vector {
    let mut out = v.to_vec();
    out.resize(n, v.first().map(|c| c.field().zero()).unwrap_or_else(|| Field::Q.zero()));
    out
}

/// Appends, for each row `ρ[θ](x) = u` with `d = deg ρ`, fresh vectors `w^0..w^{d-1}` with
/// `θ'(w^i) = w^{i+1}` and `θ'(w^{d-1}) = u - Σ ρ_i w^i`; then `x = w^0` solves the row.
pub fn realize_diagonal(s: &DiagonalSystem) -> Result<Realization> {
    if s.li > 0 {
        return Err(Error::NoFiniteWitness);
    }
    validate_diagonal(s)?;
    let field = s.config.field();
    let empty = Binding { model: EndoModel::empty(field), values: BTreeMap::new() };
    let binding = s.binding.as_ref().unwrap_or(&empty);
    let base = &binding.model;
    let n = base.dim();

    let mut rows: Vec<(Sym, Poly, Vector)> = Vec::new();
    for (k, row) in s.ld.iter().enumerate() {
        rows.push((ld_sym(k), row.xi.clone(), binding.eval(&row.u)?));
    }
    for (k, row) in s.ke.iter().enumerate() {
        rows.push((ke_sym(k), row.f.pow(row.q), binding.eval(&row.u)?));
    }
    let total = n + rows.iter().map(|(_, rho, _)| rho.deg().unwrap_or(0)).sum::<usize>();
    let mut t = Matrix::zero(field, total, total);
    for i in 0..n {
        for j in 0..n {
            t.set(i, j, base.theta().get(i, j).clone());
        }
    }
    let mut witness = BTreeMap::new();
    let mut at = n;
    for (sym, rho, u) in &rows {
        let d = rho.deg().unwrap_or(0);
        for i in 0..d - 1 {
            t.set(at + i + 1, at + i, field.one());
        }
        for (i, ui) in u.iter().enumerate() {
            t.set(i, at + d - 1, ui.clone());
        }
        for i in 0..d {
            t.set(at + i, at + d - 1, -&rho.coeff(i));
        }
        witness.insert(sym.clone(), unit_vector(field, total, at));
        at += d;
    }
    let model = EndoModel::new(t)?;
    let constants: BTreeMap<Sym, Vector> = binding.values.iter().map(|(k, v)| (k.clone(), pad(v, total))).collect();
    for (sym, rho, u) in &rows {
        if model.poly_apply_vec(rho, &witness[sym]) != pad(u, total) {
            return Err(Error::Internal(format!("row for {sym} is not solved")));
        }
    }
    if !model.is_c_endomorphism(&s.config)? {
        return Err(Error::NotCEndomorphism);
    }
    Ok(Realization { model, witness, constants, base_dim: n })
}

pub fn u_sym(k: usize) -> Sym {
    Sym::new("u", &[k + 1])
}

/// A triangular kernel block read off a model, with the values of its constants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtractedBlock {
    pub block: FBlock,
    pub constants: BTreeMap<Sym, Vector>,
}

/// Projects each `w_k` to `Ker(f^C)` and records the least `q` with `f^q[θ](p_k)` in the
/// projected base plus the cyclic spans of the earlier projections, together with the
/// coefficients of that membership. Constants are the base components, named `u{k}`.
pub fn extract_kernel_block(
    m_big: &EndoModel,
    base_dim: usize,
    w: &[Vector],
    c: &KernelConfiguration,
    f: &Poly,
) -> Result<ExtractedBlock> {
    let field = m_big.field();
    let n = m_big.dim();
    if base_dim > n {
        return Err(Error::Dimension(format!("base of dimension {base_dim} in a model of dimension {n}")));
    }
    let base = Subspace::from_vectors(field, n, &(0..base_dim).map(|i| unit_vector(field, n, i)).collect::<Vec<_>>());
    if !base.is_invariant(m_big.theta()) {
        return Err(Error::NotInvariant);
    }
    let k = match c.value_at(f)? {
        Val::Fin(k) if k > 0 => k,
        v => return Err(Error::Precondition(format!("{f} has value {v}, need 0 < C(f) < inf"))),
    };
    let fs: BTreeSet<Poly> = [f.clone()].into();
    let proj = m_big.proj_ker(&fs, c)?;
    let base_proj = base.map(&proj);
    let mut orbit: Vec<Vector> = Vec::new();
    let mut rows = Vec::new();
    let mut constants = BTreeMap::new();
    let mut projected: Vec<(Vector, usize)> = Vec::new();
    for (idx, wk) in w.iter().enumerate() {
        if wk.len() != n {
            return Err(Error::Dimension(format!("vector {} has length {}", idx + 1, wk.len())));
        }
        let p = proj.mul_vec(wk);
        let mut cols: Vec<Vector> = orbit.clone();
        cols.extend(base_proj.basis().iter().cloned());
        let span = Subspace::from_vectors(field, n, &cols);
        let q = (0..=k)
            .find(|&q| span.contains(&m_big.poly_apply_vec(&f.pow(q), &p)))
            .ok_or_else(|| Error::Internal(format!("projection of vector {} escapes Ker(({f})^{k})", idx + 1)))?;
        let target = m_big.poly_apply_vec(&f.pow(q), &p);
        let mat = if cols.is_empty() { Matrix::zero(field, n, 0) } else { Matrix::from_columns(field, n, &cols) };
        let sol = if cols.is_empty() {
            Vec::new()
        } else {
            mat.solve(&target).ok_or_else(|| Error::Internal("membership without coordinates".into()))?
        };
        let mut coeffs = Vec::new();
        let mut at = 0;
        for (_, len) in &projected {
            coeffs.push(Poly::new(field, sol[at..at + len].to_vec()));
            at += len;
        }
        let mut u = zero_vector(field, n);
        for (j, b) in base_proj.basis().iter().enumerate() {
            let c = &sol[at + j];
            u = u.iter().zip(b).map(|(a, e)| a + &(e * c)).collect();
        }
        constants.insert(u_sym(idx), u);
        rows.push(TriRow { q, coeffs, u: LinearTerm::constant(field, u_sym(idx)) });
        let len = f.pow(q).deg().unwrap_or(0);
        let mut e = p.clone();
        for _ in 0..len {
            orbit.push(e.clone());
            e = m_big.apply(&e);
        }
        projected.push((p, len));
    }
    Ok(ExtractedBlock { block: FBlock { f: f.clone(), rows }, constants })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagonalize::system::{validate_triangular, KeRow, TriangularSystem};

    const Q: Field = Field::Q;

    fn q(c: &[i64]) -> Poly {
        Poly::from_ints(Q, c)
    }

    fn x() -> Poly {
        q(&[0, 1])
    }

    fn trans(pairs: &[(Poly, Val)]) -> KernelConfiguration {
        KernelConfiguration::transcendental(Q, Val::Inf, pairs.iter().cloned()).unwrap()
    }

    #[test]
    fn companion_models() {
        let m = build_companion_model(&q(&[-2, 0, 1]), 1).unwrap();
        assert_eq!(m.theta(), &Matrix::from_int_rows(Q, &[&[0, 2], &[1, 0]]));
        assert!(build_companion_model(&x(), 3).unwrap().theta().is_zero());
        let m = build_companion_model(&q(&[1, 0, 1]), 2).unwrap();
        assert_eq!(m.dim(), 4);
        assert_eq!(m.minimal_polynomial(), q(&[1, 0, 1]));
        assert!(matches!(build_companion_model(&q(&[3]), 1), Err(Error::ConstantPolynomial)));
    }

    #[test]
    fn standard_extension_examples() {
        let c = KernelConfiguration::from_mipo(&q(&[1, 0, 1])).unwrap();
        let m = standard_extend(&EndoModel::empty(Q), &c, 1, None).unwrap();
        assert_eq!(m.theta(), &companion(&q(&[1, 0, 1])).unwrap());

        let c = KernelConfiguration::from_mipo(&q(&[0, 0, 1, 1])).unwrap();
        let base = build_companion_model(&q(&[1, 1]), 1).unwrap();
        let m = standard_extend(&base, &c, 1, None).unwrap();
        assert_eq!(m.dim(), 4);
        assert!(m.poly_apply(&q(&[0, 0, 1, 1])).unwrap().is_zero());

        let c = trans(&[(x(), Val::Fin(2))]);
        let base = EndoModel::from_int_rows(Q, &[&[1]]);
        let m = standard_extend(&base, &c, 1, Some(&q(&[0, 0, 1]))).unwrap();
        assert_eq!(m.dim(), 3);
        assert!(m.is_c_endomorphism(&c).unwrap());
        assert!(matches!(standard_extend(&base, &KernelConfiguration::c_infinity(Q), 1, None), Err(Error::Precondition(_))));
    }

    #[test]
    fn extension_step_reaches_higher_image() {
        // companion(X^2) ⊕ companion(X): e2 ∈ Im(X) \ Im(X^2) with C(X) = 1.
        let m = build_companion_model(&q(&[0, 0, 1]), 1).unwrap().direct_sum(&build_companion_model(&x(), 1).unwrap()).unwrap();
        let c = trans(&[(x(), Val::Fin(1))]);
        let v = vec![Q.int(0), Q.int(1), Q.int(0)];
        let ext = image_complete_extend_step(&m, &c, &x(), &v).unwrap();
        assert_eq!(ext.dim(), 4);
        assert!(ext.poly_apply(&q(&[0, 0, 1])).unwrap().solve(&pad(&v, 4)).is_some());
        let err = image_complete_extend_step(&m, &c, &x(), &vec![Q.int(0); 3]).unwrap_err();
        assert!(err.to_string().contains("already lies"));
        let err = image_complete_extend_step(&m, &c, &x(), &[Q.int(1), Q.int(0), Q.int(0)]).unwrap_err();
        assert!(err.to_string().contains("not in Im"));
    }

    #[test]
    fn driver_stops_at_cap_when_kernel_chain_is_unstable() {
        let m = build_companion_model(&q(&[0, 0, 1]), 1).unwrap().direct_sum(&build_companion_model(&x(), 1).unwrap()).unwrap();
        let c = trans(&[(x(), Val::Fin(1))]);
        match image_complete_driver(&m, &c).unwrap() {
            DriverOutcome::GaveUp { steps, model } => {
                assert_eq!(steps, 3);
                assert!(!model.is_c_endomorphism(&c).unwrap());
            }
            other => panic!("unexpected {other:?}"),
        }
        let done = image_complete_driver(&build_companion_model(&x(), 2).unwrap(), &c).unwrap();
        assert_eq!(done, DriverOutcome::Completed { model: build_companion_model(&x(), 2).unwrap(), steps: 0 });
    }

    #[test]
    fn separating_witnesses() {
        let c1 = trans(&[(x(), Val::Fin(0))]);
        let c2 = trans(&[(x(), Val::Fin(1))]);
        assert_eq!(distinguish_witness(&c1, &c2).unwrap(), build_companion_model(&x(), 1).unwrap());
        let a1 = KernelConfiguration::from_mipo(&x()).unwrap();
        let a2 = KernelConfiguration::from_mipo(&q(&[0, 0, 1])).unwrap();
        assert_eq!(distinguish_witness(&a1, &a2).unwrap(), build_companion_model(&q(&[0, 0, 1]), 1).unwrap());
        let w = distinguish_witness(&KernelConfiguration::c_zero(Q), &KernelConfiguration::c_infinity(Q)).unwrap();
        assert_eq!(w, build_companion_model(&x(), 1).unwrap());
        assert!(matches!(distinguish_witness(&c1, &c1), Err(Error::EqualConfigs)));
        let t = KernelConfiguration::transcendental(Q, Val::Fin(0), [(x(), Val::Fin(1))]).unwrap();
        assert!(matches!(distinguish_witness(&a1, &t), Err(Error::NoFiniteWitness)));
    }

    #[test]
    fn witnesses_over_small_fields_use_higher_degree() {
        let f2 = Field::gf(2).unwrap();
        let c1 = KernelConfiguration::transcendental(
            f2,
            Val::Fin(0),
            [(Poly::from_ints(f2, &[0, 1]), Val::Fin(1)), (Poly::from_ints(f2, &[1, 1]), Val::Fin(1))],
        )
        .unwrap();
        let c2 = KernelConfiguration::transcendental(
            f2,
            Val::Inf,
            [(Poly::from_ints(f2, &[0, 1]), Val::Fin(1)), (Poly::from_ints(f2, &[1, 1]), Val::Fin(1))],
        )
        .unwrap();
        let w = distinguish_witness(&c1, &c2).unwrap();
        assert_eq!(w.minimal_polynomial(), Poly::from_ints(f2, &[1, 1, 1]));
    }

    fn diag_system(config: KernelConfiguration, ke: Vec<KeRow>, binding: Option<Binding>) -> DiagonalSystem {
        DiagonalSystem { config, li: 0, ld: vec![], ke, binding }
    }

    #[test]
    fn realize_examples() {
        let c = trans(&[(x(), Val::Fin(1))]);
        let zero = Sym::parse("z").unwrap();
        let base = build_companion_model(&q(&[-1, 1]), 1).unwrap();
        let b = Binding { model: base, values: [(zero.clone(), vec![Q.int(0)])].into() };
        let s = diag_system(c, vec![KeRow { f: x(), q: 1, u: LinearTerm::constant(Q, zero) }], Some(b));
        let r = realize_diagonal(&s).unwrap();
        assert_eq!(r.model.dim(), 2);
        assert!(r.model.apply(&r.witness[&ke_sym(0)]).iter().all(|e| e.is_zero()));

        let c = trans(&[(x(), Val::Fin(3)), (q(&[-1, 1]), Val::Fin(1))]);
        let u = Sym::parse("u").unwrap();
        let base = build_companion_model(&x(), 1).unwrap();
        let b = Binding { model: base, values: [(u.clone(), vec![Q.int(1)])].into() };
        let s = diag_system(
            c,
            vec![
                KeRow { f: x(), q: 2, u: LinearTerm::constant(Q, u.clone()) },
                KeRow { f: q(&[-1, 1]), q: 1, u: LinearTerm::zero(Q) },
            ],
            Some(b),
        );
        let r = realize_diagonal(&s).unwrap();
        assert_eq!(r.model.dim(), 4);
        let w = &r.witness[&ke_sym(0)];
        assert_eq!(r.model.poly_apply_vec(&q(&[0, 0, 1]), w), r.constants[&u]);
        let all: Vec<Vector> = (0..r.model.dim()).skip(1).map(|i| unit_vector(Q, 4, i)).collect();
        assert_eq!(Subspace::from_vectors(Q, 4, &all).dim(), 3);

        let free = DiagonalSystem { config: KernelConfiguration::c_infinity(Q), li: 1, ld: vec![], ke: vec![], binding: None };
        assert!(matches!(realize_diagonal(&free), Err(Error::NoFiniteWitness)));
    }

    #[test]
    fn extraction_examples() {
        let c = trans(&[(x(), Val::Fin(2))]);
        let m = build_companion_model(&q(&[0, 0, 1]), 1).unwrap();
        let e = extract_kernel_block(&m, 0, &[unit_vector(Q, 2, 0)], &c, &x()).unwrap();
        assert_eq!(e.block.rows.len(), 1);
        assert_eq!(e.block.rows[0].q, 2);
        assert!(e.constants[&u_sym(0)].iter().all(|v| v.is_zero()));

        let e = extract_kernel_block(&m, 2, &[unit_vector(Q, 2, 0)], &c, &x()).unwrap();
        assert_eq!(e.block.rows[0].q, 0);
        assert_eq!(e.constants[&u_sym(0)], unit_vector(Q, 2, 0));

        let bad = extract_kernel_block(&m, 1, &[unit_vector(Q, 2, 0)], &c, &x());
        assert!(matches!(bad, Err(Error::NotInvariant)));
    }

    #[test]
    fn extraction_after_realization_is_valid_and_no_larger() {
        let c = trans(&[(x(), Val::Fin(2))]);
        let base = build_companion_model(&x(), 1).unwrap();
        let u = Sym::parse("u").unwrap();
        let b = Binding { model: base, values: [(u.clone(), vec![Q.int(1)])].into() };
        let s = diag_system(
            c.clone(),
            vec![KeRow { f: x(), q: 1, u: LinearTerm::constant(Q, u) }, KeRow { f: x(), q: 2, u: LinearTerm::zero(Q) }],
            Some(b),
        );
        let r = realize_diagonal(&s).unwrap();
        let w: Vec<Vector> = (0..2).map(|k| r.witness[&ke_sym(k)].clone()).collect();
        let e = extract_kernel_block(&r.model, r.base_dim, &w, &c, &x()).unwrap();
        assert!(e.block.rows[0].q <= 1 && e.block.rows[1].q <= 2);
        let tri = TriangularSystem {
            config: c,
            li: 0,
            ld: vec![],
            blocks: vec![e.block],
            binding: Some(Binding { model: r.model, values: e.constants }),
        };
        validate_triangular(&tri).unwrap();
    }
}
