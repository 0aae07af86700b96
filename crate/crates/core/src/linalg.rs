//! Exact dense matrices and subspaces over a [`Field`].

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};

pub type Vector = Vec<Scalar>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zero(field: Field, rows: usize, cols: usize) -> Matrix {
        Matrix { field, rows, cols, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity(field: Field, n: usize) -> Matrix {
        let mut m = Matrix::zero(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_rows(field: Field, rows: Vec<Vec<Scalar>>) -> Result<Matrix> {
        let cols = rows.first().map_or(0, |r| r.len());
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::Dimension("ragged matrix rows".into()));
            }
            for c in r {
                if c.field() != field {
                    return Err(Error::FieldMismatch(field.to_string(), c.field().to_string()));
                }
                data.push(c);
            }
        }
        Ok(Matrix { field, rows: n, cols, data })
    }

    pub fn from_int_rows(field: Field, rows: &[&[i64]]) -> Matrix {
        let rows = rows.iter().map(|r| r.iter().map(|&c| field.int(c)).collect()).collect();
        Matrix::from_rows(field, rows).expect("rectangular integer rows")
    }

    /// Matrix whose columns are the given vectors of length `n`.
    pub fn from_columns(field: Field, n: usize, cols: &[Vector]) -> Matrix {
        let mut m = Matrix::zero(field, n, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), n, "column length");
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn diagonal(field: Field, entries: &[Scalar]) -> Matrix {
        let mut m = Matrix::zero(field, entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m.set(i, i, e.clone());
        }
        m
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vector {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vector> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vector> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|c| c.is_zero())
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zero(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        Matrix { data: self.data.iter().map(|x| x * c).collect(), ..self.clone() }
    }

    fn check_same_shape(&self, other: &Matrix) {
        assert_eq!(self.field, other.field, "field mismatch");
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        self.check_same_shape(other);
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Matrix { data, ..self.clone() }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.check_same_shape(other);
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Matrix { data, ..self.clone() }
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.field, other.field, "field mismatch");
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut out = Matrix::zero(self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j) + &(a * b);
                        out.set(i, j, v);
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vector {
        assert_eq!(self.cols, v.len(), "shape mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = self.field.zero();
                for (j, x) in v.iter().enumerate() {
                    let a = self.get(i, j);
                    if !a.is_zero() && !x.is_zero() {
                        acc = &acc + &(a * x);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn hconcat(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows, "shape mismatch");
        let mut m = Matrix::zero(self.field, self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j).clone());
            }
            for j in 0..other.cols {
                m.set(i, self.cols + j, other.get(i, j).clone());
            }
        }
        m
    }

    /// Block-diagonal sum.
    pub fn block_diag(&self, other: &Matrix) -> Matrix {
        let mut m = Matrix::zero(self.field, self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                m.set(self.rows + i, self.cols + j, other.get(i, j).clone());
            }
        }
        m
    }

    /// Gauss-Jordan reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m.get(r, c).inv().expect("nonzero pivot");
            for j in c..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let v = m.get(i, j) - &(&f * m.get(r, j));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right nullspace `{x : self * x = 0}`, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vector> {
        let (r, pivots) = self.rref();
        let mut out = Vec::new();
        for free in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![self.field.zero(); self.cols];
            v[free] = self.field.one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -r.get(row, free);
            }
            out.push(v);
        }
        out
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::Dimension("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let (r, pivots) = self.hconcat(&Matrix::identity(self.field, n)).rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::Singular);
        }
        let mut inv = Matrix::zero(self.field, n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j).clone());
            }
        }
        Ok(inv)
    }

    /// Canonical solution of `self * x = b` (free variables set to zero), if any.
    pub fn solve(&self, b: &[Scalar]) -> Option<Vector> {
        assert_eq!(b.len(), self.rows, "shape mismatch");
        let aug = self.hconcat(&Matrix::from_columns(self.field, self.rows, &[b.to_vec()]));
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![self.field.zero(); self.cols];
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = r.get(row, self.cols).clone();
        }
        Some(x)
    }

    /// Solves `self * X = rhs` column by column.
    pub fn solve_matrix(&self, rhs: &Matrix) -> Option<Matrix> {
        let cols: Option<Vec<Vector>> = rhs.columns().iter().map(|c| self.solve(c)).collect();
        Some(Matrix::from_columns(self.field, self.cols, &cols?))
    }

    pub fn column_space(&self) -> Subspace {
        Subspace::from_vectors(self.field, self.rows, &self.columns())
    }

    pub fn kernel(&self) -> Subspace {
        Subspace::from_vectors(self.field, self.cols, &self.nullspace())
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|c| c.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// A subspace of `K^n` stored as the nonzero rows of a reduced echelon form,
/// so equal subspaces compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    field: Field,
    ambient: usize,
    basis: Vec<Vector>,
}

impl Subspace {
    pub fn zero(field: Field, ambient: usize) -> Subspace {
        Subspace { field, ambient, basis: Vec::new() }
    }

    pub fn full(field: Field, ambient: usize) -> Subspace {
        Matrix::identity(field, ambient).column_space()
    }

    pub fn from_vectors(field: Field, ambient: usize, vecs: &[Vector]) -> Subspace {
        if vecs.is_empty() {
            return Subspace::zero(field, ambient);
        }
        let rows = Matrix::from_rows(field, vecs.to_vec()).expect("vectors of equal length");
        assert_eq!(rows.cols(), ambient, "vector length");
        let (r, pivots) = rows.rref();
        let basis = (0..pivots.len()).map(|i| r.row(i)).collect();
        Subspace { field, ambient, basis }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    /// Basis vectors as the columns of an `ambient x dim` matrix.
    pub fn basis_matrix(&self) -> Matrix {
        Matrix::from_columns(self.field, self.ambient, &self.basis)
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        let mut vs = self.basis.clone();
        vs.push(v.to_vec());
        Subspace::from_vectors(self.field, self.ambient, &vs).dim() == self.dim()
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.basis.iter().all(|v| other.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut vs = self.basis.clone();
        vs.extend(other.basis.iter().cloned());
        Subspace::from_vectors(self.field, self.ambient, &vs)
    }

    pub fn intersection(&self, other: &Subspace) -> Subspace {
        if self.dim() == 0 || other.dim() == 0 {
            return Subspace::zero(self.field, self.ambient);
        }
        let a = self.basis_matrix();
        let b = other.basis_matrix().scale(&-self.field.one());
        let vecs: Vec<Vector> = a
            .hconcat(&b)
            .nullspace()
            .iter()
            .map(|coef| a.mul_vec(&coef[..self.dim()]))
            .collect();
        Subspace::from_vectors(self.field, self.ambient, &vecs)
    }

    /// Image of the subspace under a matrix.
    pub fn map(&self, m: &Matrix) -> Subspace {
        let vecs: Vec<Vector> = self.basis.iter().map(|v| m.mul_vec(v)).collect();
        Subspace::from_vectors(self.field, m.rows(), &vecs)
    }

    pub fn is_invariant(&self, m: &Matrix) -> bool {
        self.basis.iter().all(|v| self.contains(&m.mul_vec(v)))
    }

    /// Coordinates of `v` in the stored basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &[Scalar]) -> Option<Vector> {
        self.basis_matrix().solve(v)
    }
}

pub fn zero_vector(field: Field, n: usize) -> Vector {
    vec![field.zero(); n]
}

pub fn unit_vector(field: Field, n: usize, i: usize) -> Vector {
    let mut v = zero_vector(field, n);
    v[i] = field.one();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const Q: Field = Field::Q;

    #[test]
    fn inverse_and_solve() {
        let m = Matrix::from_int_rows(Q, &[&[2, 1], &[1, 1]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(Q, 2));
        let x = m.solve(&[Q.int(3), Q.int(2)]).unwrap();
        assert_eq!(x, vec![Q.int(1), Q.int(1)]);
        let s = Matrix::from_int_rows(Q, &[&[1, 2], &[2, 4]]);
        assert_eq!(s.inverse(), Err(Error::Singular));
        assert!(s.solve(&[Q.int(1), Q.int(0)]).is_none());
    }

    #[test]
    fn subspace_equality_is_structural() {
        let a = Subspace::from_vectors(Q, 2, &[vec![Q.int(1), Q.int(1)]]);
        let b = Subspace::from_vectors(Q, 2, &[vec![Q.int(-3), Q.int(-3)]]);
        assert_eq!(a, b);
        let c = Subspace::from_vectors(Q, 2, &[vec![Q.int(1), Q.int(0)]]);
        assert_eq!(a.sum(&c), Subspace::full(Q, 2));
        assert_eq!(a.intersection(&c), Subspace::zero(Q, 2));
    }

    fn small_matrix(n: usize) -> impl Strategy<Value = Matrix> {
        prop::collection::vec(-3i64..4, n * n).prop_map(move |v| {
            let rows: Vec<Vec<Scalar>> = v.chunks(n).map(|r| r.iter().map(|&c| Q.int(c)).collect()).collect();
            Matrix::from_rows(Q, rows).unwrap()
        })
    }

    proptest! {
        #[test]
        fn rank_nullity(m in small_matrix(4)) {
            prop_assert_eq!(m.rank() + m.nullspace().len(), 4);
            for v in m.nullspace() {
                prop_assert!(m.mul_vec(&v).iter().all(|c| c.is_zero()));
            }
            prop_assert_eq!(m.column_space().dim(), m.rank());
        }

        #[test]
        fn intersection_dimension_formula(a in small_matrix(4), b in small_matrix(4)) {
            let (u, w) = (a.column_space(), b.column_space());
            let i = u.intersection(&w);
            prop_assert_eq!(u.dim() + w.dim(), u.sum(&w).dim() + i.dim());
            prop_assert!(i.is_subspace_of(&u) && i.is_subspace_of(&w));
        }
    }
}
