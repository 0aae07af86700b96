//! Finite-dimensional models `(K^n, θ)` with θ acting on column vectors.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::factor::irreducible_factors;
use crate::field::{Field, Scalar};
use crate::kernel_config::{KernelConfiguration, Val};
use crate::linalg::{unit_vector, Matrix, Subspace, Vector};
use crate::poly::Poly;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EndoModel {
    theta: Matrix,
}

impl EndoModel {
    pub fn new(theta: Matrix) -> Result<EndoModel> {
        if !theta.is_square() {
            return Err(Error::Dimension(format!("theta is {}x{}", theta.rows(), theta.cols())));
        }
        Ok(EndoModel { theta })
    }

    pub fn from_int_rows(field: Field, rows: &[&[i64]]) -> EndoModel {
        EndoModel::new(Matrix::from_int_rows(field, rows)).expect("square")
    }

    pub fn empty(field: Field) -> EndoModel {
        EndoModel { theta: Matrix::zero(field, 0, 0) }
    }

    pub fn field(&self) -> Field {
        self.theta.field()
    }

    pub fn dim(&self) -> usize {
        self.theta.rows()
    }

    pub fn theta(&self) -> &Matrix {
        &self.theta
    }

    pub fn apply(&self, v: &[Scalar]) -> Vector {
        self.theta.mul_vec(v)
    }

    fn check_field(&self, field: Field) -> Result<()> {
        if field != self.field() {
            return Err(Error::FieldMismatch(self.field().to_string(), field.to_string()));
        }
        Ok(())
    }

    /// `ρ[θ]`, evaluated by Horner's rule.
    pub fn poly_apply(&self, rho: &Poly) -> Result<Matrix> {
        self.check_field(rho.field())?;
        let n = self.dim();
        let id = Matrix::identity(self.field(), n);
        let mut acc = Matrix::zero(self.field(), n, n);
        for c in rho.coeffs().iter().rev() {
            acc = acc.mul(&self.theta).add(&id.scale(c));
        }
        Ok(acc)
    }

    /// `ρ[θ](v)` without forming the matrix.
    pub fn poly_apply_vec(&self, rho: &Poly, v: &[Scalar]) -> Vector {
        let mut acc = vec![self.field().zero(); self.dim()];
        for c in rho.coeffs().iter().rev() {
            acc = self.apply(&acc);
            for (a, x) in acc.iter_mut().zip(v) {
                *a = &*a + &(c * x);
            }
        }
        acc
    }

    pub fn kernel_basis(&self, rho: &Poly) -> Result<Subspace> {
        Ok(self.poly_apply(rho)?.kernel())
    }

    pub fn image_basis(&self, rho: &Poly) -> Result<Subspace> {
        Ok(self.poly_apply(rho)?.column_space())
    }

    /// Minimal polynomial of `v` relative to θ: the monic generator of `{ρ : ρ[θ](v) = 0}`.
    pub fn vector_minimal_polynomial(&self, v: &[Scalar]) -> Poly {
        let field = self.field();
        let mut orbit: Vec<Vector> = vec![v.to_vec()];
        loop {
            let next = self.apply(orbit.last().expect("nonempty"));
            let m = Matrix::from_columns(field, self.dim(), &orbit);
            if let Some(coef) = m.solve(&next) {
                let mut coeffs: Vec<Scalar> = coef.iter().map(|c| -c).collect();
                coeffs.push(field.one());
                return Poly::new(field, coeffs);
            }
            orbit.push(next);
        }
    }

    pub fn minimal_polynomial(&self) -> Poly {
        let field = self.field();
        let n = self.dim();
        let mut acc = Poly::one(field);
        let mut covered = Subspace::zero(field, n);
        for i in 0..n {
            let e = unit_vector(field, n, i);
            if covered.contains(&e) {
                continue;
            }
            let mp = self.vector_minimal_polynomial(&e);
            acc = acc.lcm(&mp);
            covered = self.poly_apply(&acc).expect("same field").kernel();
            if covered.dim() == n {
                break;
            }
        }
        acc
    }

    /// `Fac(minimal polynomial) ∪ exception keys of C`, the finite set outside of which
    /// every kernel and image condition holds trivially.
    pub fn relevant_factors(&self, c: &KernelConfiguration) -> Result<BTreeSet<Poly>> {
        self.check_field(c.field())?;
        let mut set: BTreeSet<Poly> = irreducible_factors(&self.minimal_polynomial())?.into_iter().collect();
        set.extend(c.exceptions().keys().cloned());
        Ok(set)
    }

    /// `f[θ]^k`, with `k` capped at the dimension (kernel and image chains are stable beyond it).
    fn power_matrix(&self, f: &Poly, k: u32) -> Result<Matrix> {
        let base = self.poly_apply(f)?;
        let k = (k as usize).min(self.dim().max(1));
        let mut acc = Matrix::identity(self.field(), self.dim());
        for _ in 0..k {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    fn chain_stable_at(&self, f: &Poly, k: u32) -> Result<bool> {
        let a = self.power_matrix(f, k)?;
        let b = a.mul(&self.poly_apply(f)?);
        Ok(a.rank() == b.rank())
    }

    pub fn is_c_endomorphism(&self, c: &KernelConfiguration) -> Result<bool> {
        self.check_field(c.field())?;
        if c.is_algebraic() {
            return Ok(self.poly_apply(&c.mipo()?)?.is_zero());
        }
        for f in self.relevant_factors(c)? {
            if let Val::Fin(k) = c.value(&f) {
                if !self.chain_stable_at(&f, k)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// `Im(f^C) = Im(f^{C+1})` for every relevant `f` with finite value.
    pub fn is_image_complete(&self, c: &KernelConfiguration) -> Result<bool> {
        if !self.is_c_endomorphism(c)? {
            return Err(Error::NotCEndomorphism);
        }
        for f in self.relevant_factors(c)? {
            if let Val::Fin(k) = c.value(&f) {
                let a = self.power_matrix(&f, k)?;
                let b = a.mul(&self.poly_apply(&f)?);
                if a.column_space() != b.column_space() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    fn check_finite_set(&self, fs: &BTreeSet<Poly>, c: &KernelConfiguration) -> Result<()> {
        self.check_field(c.field())?;
        for f in fs {
            if c.value_at(f)? == Val::Inf {
                return Err(Error::InfiniteValue(f.to_string()));
            }
        }
        Ok(())
    }

    /// `F^C[θ]` for a set of monic irreducibles with finite values.
    pub fn f_power_matrix(&self, fs: &BTreeSet<Poly>, c: &KernelConfiguration) -> Result<Matrix> {
        let mut acc = Matrix::identity(self.field(), self.dim());
        for f in fs {
            let k = c.value(f).finite().ok_or_else(|| Error::InfiniteValue(f.to_string()))?;
            acc = acc.mul(&self.power_matrix(f, k)?);
        }
        Ok(acc)
    }

    /// Projection onto `Im(F^C)` along `Ker(F^C)`.
    pub fn proj_im(&self, fs: &BTreeSet<Poly>, c: &KernelConfiguration) -> Result<Matrix> {
        self.check_finite_set(fs, c)?;
        self.proj_im_unchecked(fs, c)
    }

    pub(crate) fn proj_im_unchecked(&self, fs: &BTreeSet<Poly>, c: &KernelConfiguration) -> Result<Matrix> {
        let field = self.field();
        let n = self.dim();
        if fs.is_empty() {
            return Ok(Matrix::identity(field, n));
        }
        let g = self.f_power_matrix(fs, c)?;
        let im = g.column_space();
        let ker = g.kernel();
        if im.dim() + ker.dim() != n || im.intersection(&ker).dim() != 0 {
            return Err(Error::NotDirect(format!("Im and Ker of F^C for F = {}", set_to_string(fs))));
        }
        let mut cols: Vec<Vector> = im.basis().to_vec();
        cols.extend(ker.basis().iter().cloned());
        let q = Matrix::from_columns(field, n, &cols);
        let mut d = Matrix::zero(field, n, n);
        for i in 0..im.dim() {
            d.set(i, i, field.one());
        }
        Ok(q.mul(&d).mul(&q.inverse()?))
    }

    /// Projection onto `Ker(F^C)` along `Im(F^C)`.
    pub fn proj_ker(&self, fs: &BTreeSet<Poly>, c: &KernelConfiguration) -> Result<Matrix> {
        self.check_finite_set(fs, c)?;
        self.proj_ker_unchecked(fs, c)
    }

    pub(crate) fn proj_ker_unchecked(&self, fs: &BTreeSet<Poly>, c: &KernelConfiguration) -> Result<Matrix> {
        let p = self.proj_im_unchecked(fs, c)?;
        Ok(Matrix::identity(self.field(), self.dim()).sub(&p))
    }

    /// The partial inverse `η[θ]^{-1}`: maps `x` to the unique `u ∈ Im(G^C)` with
    /// `η[θ](u) = π_Im(G^C)(x)`, where `G = Fac(η) ∩ {0 < C < ∞}`.
    pub fn inv_eta(&self, eta: &Poly, c: &KernelConfiguration) -> Result<Matrix> {
        self.check_field(eta.field())?;
        if eta.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if !eta.is_monic() {
            return Err(Error::NotMonic(eta.to_string()));
        }
        let mut g = BTreeSet::new();
        for f in irreducible_factors(eta)? {
            match c.value(&f) {
                Val::Inf => return Err(Error::InfiniteValue(f.to_string())),
                Val::Fin(0) => {}
                Val::Fin(_) => {
                    g.insert(f);
                }
            }
        }
        self.inv_eta_with(eta, &g, c)
    }

    pub(crate) fn inv_eta_with(&self, eta: &Poly, g: &BTreeSet<Poly>, c: &KernelConfiguration) -> Result<Matrix> {
        let field = self.field();
        let n = self.dim();
        let proj = self.proj_im_unchecked(g, c)?;
        let w = proj.column_space();
        let r = w.dim();
        if r == 0 {
            return Ok(Matrix::zero(field, n, n));
        }
        let bw = w.basis_matrix();
        let t = bw.solve_matrix(&self.theta.mul(&bw)).ok_or(Error::NotInvariant)?;
        let restricted = EndoModel::new(t)?.poly_apply(eta)?;
        let inv = restricted.inverse()?;
        let coords = bw.solve_matrix(&proj).ok_or_else(|| Error::Internal("projection leaves its image".into()))?;
        debug_assert_eq!(coords.rows(), r);
        Ok(bw.mul(&inv).mul(&coords))
    }

    /// Smallest subspace containing `a` closed under θ and, for every `f` dividing the
    /// minimal polynomial with `0 < C(f) < ∞`, under `π_Ker(f^C)`, `π_Im(f^C)` and `f[θ]^{-1}`.
    pub fn c_closure(&self, c: &KernelConfiguration, a: &[Vector]) -> Result<Subspace> {
        self.check_field(c.field())?;
        let mut gens = vec![self.theta.clone()];
        for f in irreducible_factors(&self.minimal_polynomial())? {
            if matches!(c.value(&f), Val::Fin(k) if k > 0) {
                let set: BTreeSet<Poly> = [f.clone()].into();
                gens.push(self.proj_ker_unchecked(&set, c)?);
                gens.push(self.proj_im_unchecked(&set, c)?);
                gens.push(self.inv_eta_with(&f, &set, c)?);
            }
        }
        let mut u = Subspace::from_vectors(self.field(), self.dim(), a);
        loop {
            let mut vecs = u.basis().to_vec();
            for g in &gens {
                vecs.extend(u.basis().iter().map(|v| g.mul_vec(v)));
            }
            let next = Subspace::from_vectors(self.field(), self.dim(), &vecs);
            if next.dim() == u.dim() {
                return Ok(u);
            }
            u = next;
        }
    }

    /// Block-diagonal sum `self ⊕ other`.
    pub fn direct_sum(&self, other: &EndoModel) -> Result<EndoModel> {
        self.check_field(other.field())?;
        EndoModel::new(self.theta.block_diag(&other.theta))
    }
}

pub(crate) fn set_to_string(fs: &BTreeSet<Poly>) -> String {
    let parts: Vec<String> = fs.iter().map(|f| f.to_string()).collect();
    format!("{{{}}}", parts.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: Field = Field::Q;

    fn q(c: &[i64]) -> Poly {
        Poly::from_ints(Q, c)
    }

    fn x() -> Poly {
        q(&[0, 1])
    }

    fn set(fs: &[Poly]) -> BTreeSet<Poly> {
        fs.iter().cloned().collect()
    }

    fn c_x(n: u32) -> KernelConfiguration {
        KernelConfiguration::transcendental(Q, Val::Inf, [(x(), Val::Fin(n))]).unwrap()
    }

    fn diag(entries: &[i64]) -> EndoModel {
        EndoModel::new(Matrix::diagonal(Q, &entries.iter().map(|&e| Q.int(e)).collect::<Vec<_>>())).unwrap()
    }

    #[test]
    fn poly_apply_examples() {
        let m = EndoModel::from_int_rows(Q, &[&[0, 2], &[1, 0]]);
        assert_eq!(m.poly_apply(&q(&[1])).unwrap(), Matrix::identity(Q, 2));
        assert!(m.poly_apply(&q(&[-2, 0, 1])).unwrap().is_zero());
        assert!(diag(&[0, 1]).poly_apply(&q(&[0, -1, 1])).unwrap().is_zero());
        let bad = Poly::from_ints(Field::Fp(3), &[1]);
        assert!(m.poly_apply(&bad).is_err());
    }

    #[test]
    fn kernels_and_images() {
        let m = diag(&[0, 1]);
        assert_eq!(m.kernel_basis(&Poly::zero(Q)).unwrap(), Subspace::full(Q, 2));
        assert_eq!(m.image_basis(&Poly::zero(Q)).unwrap().dim(), 0);
        assert_eq!(m.kernel_basis(&x()).unwrap(), Subspace::from_vectors(Q, 2, &[vec![Q.int(1), Q.int(0)]]));
        assert_eq!(m.image_basis(&x()).unwrap(), Subspace::from_vectors(Q, 2, &[vec![Q.int(0), Q.int(1)]]));
        let shift = EndoModel::from_int_rows(Q, &[&[0, 0], &[1, 0]]);
        assert_eq!(shift.kernel_basis(&x()).unwrap(), Subspace::from_vectors(Q, 2, &[vec![Q.int(0), Q.int(1)]]));
    }

    #[test]
    fn minimal_polynomials() {
        assert_eq!(diag(&[0, 1, 1]).minimal_polynomial(), q(&[0, -1, 1]));
        let shift = EndoModel::from_int_rows(Q, &[&[0, 0], &[1, 0]]);
        assert_eq!(shift.minimal_polynomial(), q(&[0, 0, 1]));
        assert!(EndoModel::empty(Q).minimal_polynomial().is_one());
    }

    #[test]
    fn c_endomorphism_examples() {
        let rot = EndoModel::from_int_rows(Q, &[&[0, -1], &[1, 0]]);
        assert!(rot.is_c_endomorphism(&KernelConfiguration::from_mipo(&q(&[1, 0, 1])).unwrap()).unwrap());
        let shift = EndoModel::from_int_rows(Q, &[&[0, 0], &[1, 0]]);
        assert!(!shift.is_c_endomorphism(&c_x(1)).unwrap());
        assert!(shift.is_c_endomorphism(&c_x(2)).unwrap());
        assert!(shift.is_image_complete(&c_x(2)).unwrap());
        assert_eq!(shift.is_image_complete(&c_x(1)), Err(Error::NotCEndomorphism));
    }

    #[test]
    fn projections() {
        let m = diag(&[0, 1]);
        let c = c_x(1);
        assert_eq!(m.proj_im(&set(&[]), &c).unwrap(), Matrix::identity(Q, 2));
        assert!(m.proj_ker(&set(&[]), &c).unwrap().is_zero());
        assert_eq!(m.proj_im(&set(&[x()]), &c).unwrap(), Matrix::diagonal(Q, &[Q.int(0), Q.int(1)]));
        assert_eq!(m.proj_ker(&set(&[x()]), &c).unwrap(), Matrix::diagonal(Q, &[Q.int(1), Q.int(0)]));
        let m3 = diag(&[0, 1, 2]);
        let c3 = KernelConfiguration::transcendental(Q, Val::Inf, [(x(), Val::Fin(1))]).unwrap();
        assert_eq!(
            m3.proj_ker(&set(&[x()]), &c3).unwrap(),
            Matrix::diagonal(Q, &[Q.int(1), Q.int(0), Q.int(0)])
        );
        let shift = EndoModel::from_int_rows(Q, &[&[0, 0], &[1, 0]]);
        assert!(matches!(shift.proj_im(&set(&[x()]), &c), Err(Error::NotDirect(_))));
        assert!(matches!(m.proj_im(&set(&[q(&[1, 1])]), &c), Err(Error::InfiniteValue(_))));
    }

    #[test]
    fn partial_inverses() {
        let m = diag(&[0, 1]);
        let c = c_x(1);
        assert_eq!(m.inv_eta(&q(&[1]), &c).unwrap(), Matrix::identity(Q, 2));
        assert_eq!(m.inv_eta(&x(), &c).unwrap(), Matrix::diagonal(Q, &[Q.int(0), Q.int(1)]));
        let c0 = KernelConfiguration::transcendental(Q, Val::Inf, [(q(&[-1, 1]), Val::Fin(0))]).unwrap();
        let half = Q.ratio(1, 2).unwrap();
        assert_eq!(diag(&[2, 3]).inv_eta(&q(&[-1, 1]), &c0).unwrap(), Matrix::diagonal(Q, &[Q.int(1), half]));
        assert!(matches!(m.inv_eta(&q(&[1, 1]), &c), Err(Error::InfiniteValue(_))));
    }

    #[test]
    fn closures() {
        let m = diag(&[0, 1]);
        let c = c_x(1);
        assert_eq!(m.c_closure(&c, &[]).unwrap().dim(), 0);
        let e1 = vec![Q.int(1), Q.int(0)];
        assert_eq!(m.c_closure(&c, std::slice::from_ref(&e1)).unwrap(), Subspace::from_vectors(Q, 2, &[e1]));
        assert_eq!(m.c_closure(&c, &[vec![Q.int(1), Q.int(1)]]).unwrap(), Subspace::full(Q, 2));
    }
}
