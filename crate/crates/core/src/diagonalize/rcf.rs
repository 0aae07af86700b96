//! Companion matrices, the block matrix of a triangular recurrence, and the rational
//! canonical form computed from the Smith normal form of `X·I − B`.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{unit_vector, zero_vector, Matrix, Vector};
use crate::poly::Poly;

/// Companion matrix: ones on the subdiagonal, `−ρ_i` in the last column.
pub fn companion(rho: &Poly) -> Result<Matrix> {
    let d = rho.deg().ok_or(Error::ZeroPolynomial)?;
    if d == 0 {
        return Err(Error::ConstantPolynomial);
    }
    if !rho.is_monic() {
        return Err(Error::NotMonic(rho.to_string()));
    }
    let field = rho.field();
    let mut m = Matrix::zero(field, d, d);
    for i in 1..d {
        m.set(i, i - 1, field.one());
    }
    for i in 0..d {
        m.set(i, d - 1, -rho.coeff(i));
    }
    Ok(m)
}

/// Block upper triangular matrix with companion blocks of the `ζ_k` on the diagonal and
/// the coefficients of `Q_{k,l}` in the last column of block `k`, rows of block `l`.
/// `q[k][l]` is defined for `l < k`; shorter rows mean zero.
pub fn build_b(zetas: &[Poly], q: &[Vec<Poly>]) -> Result<Matrix> {
    let field = zetas.first().map(|z| z.field()).ok_or(Error::EmptyInput)?;
    let blocks: Vec<Matrix> = zetas.iter().map(companion).collect::<Result<_>>()?;
    let dims: Vec<usize> = blocks.iter().map(|b| b.rows()).collect();
    let offsets: Vec<usize> = dims.iter().scan(0, |acc, &d| {
        let o = *acc;
        *acc += d;
        Some(o)
    }).collect();
    let total: usize = dims.iter().sum();
    let mut b = Matrix::zero(field, total, total);
    for (k, blk) in blocks.iter().enumerate() {
        for i in 0..dims[k] {
            for j in 0..dims[k] {
                b.set(offsets[k] + i, offsets[k] + j, blk.get(i, j).clone());
            }
        }
    }
    for (k, row) in q.iter().enumerate() {
        if k >= zetas.len() || row.len() > k {
            return Err(Error::Dimension(format!("coupling row {} has {} entries", k + 1, row.len())));
        }
        let col = offsets[k] + dims[k] - 1;
        for (l, p) in row.iter().enumerate() {
            if p.field() != field {
                return Err(Error::FieldMismatch(field.to_string(), p.field().to_string()));
            }
            if p.deg().is_some_and(|d| d >= dims[l]) {
                return Err(Error::InvalidSystem(format!(
                    "coupling polynomial {p} at ({}, {}) must have degree below {}",
                    k + 1,
                    l + 1,
                    dims[l]
                )));
            }
            for i in 0..dims[l] {
                b.set(offsets[l] + i, col, p.coeff(i));
            }
        }
    }
    Ok(b)
}

/// Invariant factors `ξ_1 | … | ξ_n` and a transformation `A` with
/// `A^{-1}·B·A = Diag(B_{ξ_1}, …, B_{ξ_n})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rcf {
    pub xis: Vec<Poly>,
    pub a: Matrix,
    pub a_inv: Matrix,
}

impl Rcf {
    pub fn canonical_matrix(&self) -> Result<Matrix> {
        block_diag_companions(&self.xis, self.a.field())
    }
}

pub fn block_diag_companions(polys: &[Poly], field: Field) -> Result<Matrix> {
    let mut out = Matrix::zero(field, 0, 0);
    for p in polys {
        out = out.block_diag(&companion(p)?);
    }
    Ok(out)
}

type PolyMatrix = Vec<Vec<Poly>>;

struct Smith {
    m: PolyMatrix,
    /// Inverse of the accumulated row transformation.
    w: PolyMatrix,
}

impl Smith {
    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            self.m.swap(a, b);
            for row in self.w.iter_mut() {
                row.swap(a, b);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for row in self.m.iter_mut() {
                row.swap(a, b);
            }
        }
    }

    /// `row_i -= c·row_t`.
    fn row_sub(&mut self, i: usize, t: usize, c: &Poly) {
        let src = self.m[t].clone();
        for (dst, s) in self.m[i].iter_mut().zip(&src) {
            *dst = &*dst - &(c * s);
        }
        for row in self.w.iter_mut() {
            row[t] = &row[t] + &(c * &row[i]);
        }
    }

    /// `col_j -= c·col_t`.
    fn col_sub(&mut self, j: usize, t: usize, c: &Poly) {
        for row in self.m.iter_mut() {
            let v = &row[j] - &(c * &row[t]);
            row[j] = v;
        }
    }

    /// `row_t += row_i`.
    fn row_add(&mut self, t: usize, i: usize) {
        let src = self.m[i].clone();
        for (dst, s) in self.m[t].iter_mut().zip(&src) {
            *dst = &*dst + s;
        }
        for row in self.w.iter_mut() {
            row[i] = &row[i] - &row[t];
        }
    }

    fn make_monic(&mut self, t: usize) {
        let Some(lc) = self.m[t][t].lead().cloned() else { return };
        let inv = lc.inv().expect("nonzero lead");
        for p in self.m[t].iter_mut() {
            *p = p.scale(&inv);
        }
        for row in self.w.iter_mut() {
            row[t] = row[t].scale(&lc);
        }
    }

    fn run(&mut self) {
        let d = self.m.len();
        for t in 0..d {
            loop {
                let mut best: Option<(usize, usize, usize)> = None;
                for i in t..d {
                    for j in t..d {
                        if let Some(deg) = self.m[i][j].deg() {
                            if best.is_none_or(|(_, _, bd)| deg < bd) {
                                best = Some((i, j, deg));
                            }
                        }
                    }
                }
                let Some((i, j, _)) = best else { return };
                self.swap_rows(t, i);
                self.swap_cols(t, j);
                let pivot = self.m[t][t].clone();
                let mut clean = true;
                for i in t + 1..d {
                    if !self.m[i][t].is_zero() {
                        let q = self.m[i][t].quo(&pivot);
                        self.row_sub(i, t, &q);
                        clean &= self.m[i][t].is_zero();
                    }
                }
                for j in t + 1..d {
                    if !self.m[t][j].is_zero() {
                        let q = self.m[t][j].quo(&pivot);
                        self.col_sub(j, t, &q);
                        clean &= self.m[t][j].is_zero();
                    }
                }
                if !clean {
                    continue;
                }
                let bad = (t + 1..d).find(|&i| (t + 1..d).any(|j| !pivot.divides(&self.m[i][j])));
                match bad {
                    Some(i) => self.row_add(t, i),
                    None => break,
                }
            }
            self.make_monic(t);
        }
    }
}

/// `Σ_j p_j[B] e_j` for a column of polynomials.
fn apply_poly_column(b: &Matrix, col: &[Poly]) -> Vector {
    let field = b.field();
    let n = b.rows();
    let top = col.iter().filter_map(|p| p.deg()).max();
    let Some(top) = top else { return zero_vector(field, n) };
    let mut acc = zero_vector(field, n);
    for k in (0..=top).rev() {
        acc = b.mul_vec(&acc);
        for (j, p) in col.iter().enumerate() {
            let c = p.coeff(k);
            if !c.is_zero() {
                acc[j] = &acc[j] + &c;
            }
        }
    }
    acc
}

/// Rational canonical form of a square matrix.
pub fn rcf(b: &Matrix) -> Result<Rcf> {
    if !b.is_square() {
        return Err(Error::Dimension(format!("{}x{} matrix has no canonical form", b.rows(), b.cols())));
    }
    let field = b.field();
    let d = b.rows();
    let x = Poly::x(field);
    let m: PolyMatrix = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let c = Poly::constant(-b.get(i, j).clone());
                    if i == j {
                        &x + &c
                    } else {
                        c
                    }
                })
                .collect()
        })
        .collect();
    let w: PolyMatrix = (0..d)
        .map(|i| (0..d).map(|j| if i == j { Poly::one(field) } else { Poly::zero(field) }).collect())
        .collect();
    let mut s = Smith { m, w };
    s.run();
    let mut xis = Vec::new();
    let mut cols: Vec<Vector> = Vec::new();
    for t in 0..d {
        let xi = s.m[t][t].clone();
        if xi.deg().is_none_or(|k| k == 0) {
            if xi.is_zero() {
                return Err(Error::Internal("characteristic matrix is singular".into()));
            }
            continue;
        }
        let wcol: Vec<Poly> = (0..d).map(|i| s.w[i][t].clone()).collect();
        let mut g = apply_poly_column(b, &wcol);
        for _ in 0..xi.deg().unwrap_or(0) {
            cols.push(g.clone());
            g = b.mul_vec(&g);
        }
        xis.push(xi);
    }
    let a = if d == 0 { Matrix::zero(field, 0, 0) } else { Matrix::from_columns(field, d, &cols) };
    let a_inv = a.inverse().map_err(|_| Error::Internal("cyclic vectors are dependent".into()))?;
    let out = Rcf { xis, a, a_inv };
    if out.a_inv.mul(b).mul(&out.a) != out.canonical_matrix()? {
        return Err(Error::Internal("similarity check failed".into()));
    }
    Ok(out)
}

/// Brute-force cyclic vector for a matrix whose minimal and characteristic polynomial
/// agree: the first unit vector sum that generates the whole space. Test helper.
pub fn first_cyclic_vector(b: &Matrix) -> Option<Vector> {
    let field = b.field();
    let n = b.rows();
    let candidates = (0..n).map(|i| unit_vector(field, n, i)).chain(std::iter::once(vec![field.one(); n]));
    for v in candidates {
        let mut cols = vec![v.clone()];
        for _ in 1..n {
            let next = b.mul_vec(cols.last().expect("nonempty"));
            cols.push(next);
        }
        if Matrix::from_columns(field, n, &cols).rank() == n {
            return Some(v);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factor::irreducible_factors;
    use crate::model::EndoModel;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    const Q: Field = Field::Q;

    fn q(c: &[i64]) -> Poly {
        Poly::from_ints(Q, c)
    }

    #[test]
    fn companion_examples() {
        assert_eq!(companion(&q(&[0, 0, 1])).unwrap(), Matrix::from_int_rows(Q, &[&[0, 0], &[1, 0]]));
        assert_eq!(companion(&q(&[1, 0, 1])).unwrap(), Matrix::from_int_rows(Q, &[&[0, -1], &[1, 0]]));
        assert_eq!(companion(&q(&[2, -3, 1])).unwrap(), Matrix::from_int_rows(Q, &[&[0, -2], &[1, 3]]));
        assert!(matches!(companion(&q(&[1, 2])), Err(Error::NotMonic(_))));
    }

    #[test]
    fn build_b_examples() {
        let x = q(&[0, 1]);
        assert_eq!(build_b(&[q(&[1, 0, 1])], &[]).unwrap(), companion(&q(&[1, 0, 1])).unwrap());
        let b = build_b(&[x.clone(), x.clone()], &[vec![], vec![q(&[1])]]).unwrap();
        assert_eq!(b, Matrix::from_int_rows(Q, &[&[0, 1], &[0, 0]]));
        let b = build_b(&[q(&[0, 0, 1]), x.clone()], &[vec![], vec![q(&[5, 7])]]).unwrap();
        assert_eq!(b, Matrix::from_int_rows(Q, &[&[0, 0, 5], &[1, 0, 7], &[0, 0, 0]]));
        assert!(build_b(&[x.clone(), x], &[vec![], vec![q(&[0, 1])]]).is_err());
    }

    #[test]
    fn rcf_examples() {
        let id = Matrix::identity(Q, 2);
        let r = rcf(&id).unwrap();
        assert_eq!(r.xis, vec![q(&[-1, 1]), q(&[-1, 1])]);
        assert_eq!(r.a, id);

        let nil = Matrix::from_int_rows(Q, &[&[0, 1], &[0, 0]]);
        let r = rcf(&nil).unwrap();
        assert_eq!(r.xis, vec![q(&[0, 0, 1])]);

        let diag = Matrix::from_int_rows(Q, &[&[1, 0], &[0, 2]]);
        let r = rcf(&diag).unwrap();
        assert_eq!(r.xis, vec![q(&[2, -3, 1])]);
        let v = first_cyclic_vector(&diag).unwrap();
        assert_eq!(v, vec![Q.one(), Q.one()]);

        let zeta = q(&[3, 0, -2, 1]);
        let r = rcf(&companion(&zeta).unwrap()).unwrap();
        assert_eq!(r.xis, vec![zeta]);
    }

    fn arb_block(p: u64) -> impl Strategy<Value = (Vec<Vec<i64>>, Vec<Vec<Vec<i64>>>)> {
        let p = p as i64;
        prop::collection::vec((1usize..=3).prop_flat_map(move |d| prop::collection::vec(-p..p, d)), 1..=4)
            .prop_flat_map(move |lower| {
                let m = lower.len();
                let dims: Vec<usize> = lower.iter().map(|z| z.len()).collect();
                let coupling = (0..m)
                    .map(|k| {
                        dims[..k]
                            .iter()
                            .map(|&dl| prop::collection::vec(-2i64..=2, dl))
                            .collect::<Vec<_>>()
                    })
                    .collect::<Vec<_>>();
                (Just(lower), coupling)
            })
    }

    fn monic_from(field: Field, lower: &[i64]) -> Poly {
        let mut c = lower.to_vec();
        c.push(1);
        Poly::from_ints(field, &c)
    }

    fn check_rcf(field: Field, lower: &[Vec<i64>], coupling: &[Vec<Vec<i64>>]) {
        let zetas: Vec<Poly> = lower.iter().map(|z| monic_from(field, z)).collect();
        let qs: Vec<Vec<Poly>> = coupling
            .iter()
            .map(|row| row.iter().map(|c| Poly::from_ints(field, c)).collect())
            .collect();
        let b = build_b(&zetas, &qs).unwrap();
        let r = rcf(&b).unwrap();
        for w in r.xis.windows(2) {
            assert!(w[0].divides(&w[1]));
        }
        let prod_xi = r.xis.iter().fold(Poly::one(field), |a, x| &a * x);
        let prod_zeta = zetas.iter().fold(Poly::one(field), |a, x| &a * x);
        assert_eq!(prod_xi, prod_zeta);
        let mipo = EndoModel::new(b.clone()).unwrap().minimal_polynomial();
        assert_eq!(r.xis.last().unwrap(), &mipo);
        assert_eq!(r.a.mul(&r.a_inv), Matrix::identity(field, b.rows()));
        assert_eq!(r.a_inv.mul(&b).mul(&r.a), r.canonical_matrix().unwrap());
        let f1: BTreeSet<Poly> = r.xis.iter().flat_map(|x| irreducible_factors(x).unwrap()).collect();
        let f2: BTreeSet<Poly> = zetas.iter().flat_map(|x| irreducible_factors(x).unwrap()).collect();
        assert_eq!(f1, f2);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn rcf_postconditions_q((lower, coupling) in arb_block(3)) {
            check_rcf(Q, &lower, &coupling);
        }

        #[test]
        fn rcf_postconditions_gf5((lower, coupling) in arb_block(5)) {
            check_rcf(Field::gf(5).unwrap(), &lower, &coupling);
        }
    }
}
