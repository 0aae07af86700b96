//! Diagonalization of a single triangular block
//! `ζ_k[θ](x_k) = Σ_{l<k} Q_{k,l}[θ](x_l) + y_k` into `ξ_k[θ](x'_k) = μ_k(y)`.
//!
//! Terms use row vectors: `θ(X) = X·B + Y` where `X` lists `θ^i(x_k)` block by block.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::linalg::Matrix;
use crate::poly::Poly;

use super::rcf::{block_diag_companions, build_b, rcf};
use super::term::{reduce, LinearTerm, Relation, Sym};

pub fn x_sym(k: usize) -> Sym {
    Sym::new("x", &[k + 1])
}

pub fn xp_sym(k: usize) -> Sym {
    Sym::new("x'", &[k + 1])
}

pub fn y_sym(k: usize) -> Sym {
    Sym::new("y", &[k + 1])
}

/// Everything produced while diagonalizing one block. Symbols: `x{k}` for the input
/// unknowns, `x'{k}` for the new ones, `y{k}` for the right-hand constants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalizedBlock {
    pub zetas: Vec<Poly>,
    pub q: Vec<Vec<Poly>>,
    pub b: Matrix,
    pub b_prime: Matrix,
    pub a: Matrix,
    pub a_inv: Matrix,
    pub xis: Vec<Poly>,
    /// `δ_{k,i}` for `0 ≤ i ≤ deg ξ_k` (the last entry feeds `μ_k`).
    pub delta: Vec<Vec<LinearTerm>>,
    pub mu: Vec<LinearTerm>,
    /// `τ_k^i(x'; y)` for `i < deg ζ_k`.
    pub tau: Vec<Vec<LinearTerm>>,
    /// `ν_k^i(x; y)` for `i < deg ξ_k`.
    pub nu: Vec<Vec<LinearTerm>>,
}

/// Correction terms and substitutions derived from a similarity transform.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockTerms {
    pub delta: Vec<Vec<LinearTerm>>,
    pub mu: Vec<LinearTerm>,
    pub tau: Vec<Vec<LinearTerm>>,
    pub nu: Vec<Vec<LinearTerm>>,
}

fn offsets(dims: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(dims.len());
    let mut acc = 0;
    for &d in dims {
        out.push(acc);
        acc += d;
    }
    out
}

/// Row vector times matrix, entries being terms.
fn row_times(row: &[LinearTerm], m: &Matrix) -> Vec<LinearTerm> {
    let field = m.field();
    (0..m.cols())
        .map(|j| {
            let mut acc = LinearTerm::zero(field);
            for (i, t) in row.iter().enumerate() {
                let c = m.get(i, j);
                if !c.is_zero() && !t.is_zero() {
                    acc = acc.add(&t.scale(c));
                }
            }
            acc
        })
        .collect()
}

/// `δ`, `μ`, `τ` and `ν` for invariant factors `xis`, transform `a` and input block
/// degrees `d_list`.
pub fn block_terms(xis: &[Poly], a: &Matrix, a_inv: &Matrix, d_list: &[usize]) -> Result<BlockTerms> {
    let field = a.field();
    let d: usize = d_list.iter().sum();
    let dp_list: Vec<usize> = xis.iter().map(|x| x.deg().unwrap_or(0)).collect();
    if dp_list.iter().sum::<usize>() != d || a.rows() != d || a.cols() != d || a_inv.rows() != d || a_inv.cols() != d {
        return Err(Error::Dimension("block degrees and transform do not match".into()));
    }
    let off = offsets(d_list);
    let offp = offsets(&dp_list);

    let mut y_row = vec![LinearTerm::zero(field); d];
    for (k, &dk) in d_list.iter().enumerate() {
        y_row[off[k] + dk - 1] = LinearTerm::constant(field, y_sym(k));
    }
    let y_star = row_times(&y_row, a);

    let mut delta = Vec::with_capacity(xis.len());
    let mut mu = Vec::with_capacity(xis.len());
    for (k, xi) in xis.iter().enumerate() {
        let mut dk = vec![LinearTerm::zero(field)];
        for i in 0..dp_list[k] {
            let next = y_star[offp[k] + i].add(&dk[i].theta());
            dk.push(next);
        }
        let mut m = LinearTerm::zero(field);
        for (i, t) in dk.iter().enumerate() {
            m = m.add(&t.scale(&xi.coeff(i)));
        }
        delta.push(dk);
        mu.push(m);
    }

    let mut delta_row = Vec::with_capacity(d);
    let mut xp_row = Vec::with_capacity(d);
    for (k, &dk) in dp_list.iter().enumerate() {
        for i in 0..dk {
            delta_row.push(delta[k][i].clone());
            xp_row.push(LinearTerm::var_pow(field, xp_sym(k), i));
        }
    }
    let z: Vec<LinearTerm> = xp_row.iter().zip(&delta_row).map(|(x, dl)| x.sub(dl)).collect();
    let tau_row = row_times(&z, a_inv);
    let tau = d_list.iter().enumerate().map(|(k, &dk)| tau_row[off[k]..off[k] + dk].to_vec()).collect();

    let mut x_row = Vec::with_capacity(d);
    for (k, &dk) in d_list.iter().enumerate() {
        for i in 0..dk {
            x_row.push(LinearTerm::var_pow(field, x_sym(k), i));
        }
    }
    let nu_row: Vec<LinearTerm> = row_times(&x_row, a).iter().zip(&delta_row).map(|(t, dl)| t.add(dl)).collect();
    let nu = dp_list.iter().enumerate().map(|(k, &dk)| nu_row[offp[k]..offp[k] + dk].to_vec()).collect();

    Ok(BlockTerms { delta, mu, tau, nu })
}

fn check_input(zetas: &[Poly], q: &[Vec<Poly>]) -> Result<Field> {
    let field = zetas.first().map(|z| z.field()).ok_or(Error::EmptyInput)?;
    for z in zetas {
        if !z.is_monic() {
            return Err(Error::NotMonic(z.to_string()));
        }
        if z.deg() == Some(0) {
            return Err(Error::ConstantPolynomial);
        }
    }
    if q.len() > zetas.len() {
        return Err(Error::Dimension("more coupling rows than equations".into()));
    }
    Ok(field)
}

/// Diagonalizes a block. Blocks without coupling terms are returned unchanged with
/// `A = I`; otherwise the invariant factors of the block matrix are used.
pub fn diagonalize_block(zetas: &[Poly], q: &[Vec<Poly>]) -> Result<DiagonalizedBlock> {
    let field = check_input(zetas, q)?;
    let b = build_b(zetas, q)?;
    let n = b.rows();
    let uncoupled = q.iter().all(|row| row.iter().all(|p| p.is_zero()));
    let (xis, a, a_inv) = if uncoupled {
        (zetas.to_vec(), Matrix::identity(field, n), Matrix::identity(field, n))
    } else {
        let r = rcf(&b)?;
        (r.xis, r.a, r.a_inv)
    };
    let d_list: Vec<usize> = zetas.iter().map(|z| z.deg().unwrap_or(0)).collect();
    let terms = block_terms(&xis, &a, &a_inv, &d_list)?;
    let mut qn: Vec<Vec<Poly>> = q.to_vec();
    qn.resize(zetas.len(), Vec::new());
    let block = DiagonalizedBlock {
        zetas: zetas.to_vec(),
        q: qn,
        b_prime: block_diag_companions(&xis, field)?,
        b,
        a,
        a_inv,
        xis,
        delta: terms.delta,
        mu: terms.mu,
        tau: terms.tau,
        nu: terms.nu,
    };
    check_block(&block).map_err(Error::Internal)?;
    Ok(block)
}

impl DiagonalizedBlock {
    pub fn field(&self) -> Field {
        self.b.field()
    }

    pub fn coupling(&self, k: usize, l: usize) -> Poly {
        self.q.get(k).and_then(|r| r.get(l)).cloned().unwrap_or_else(|| Poly::zero(self.field()))
    }

    /// Relations `ζ_k[θ](x_k) = Σ Q_{k,l}[θ](x_l) + y_k` of the input.
    pub fn input_relations(&self) -> Vec<Relation> {
        let field = self.field();
        (0..self.zetas.len())
            .map(|k| {
                let mut rhs = LinearTerm::constant(field, y_sym(k));
                for l in 0..k {
                    rhs.add_var(&x_sym(l), &self.coupling(k, l));
                }
                Relation { var: x_sym(k), lead: self.zetas[k].clone(), rhs }
            })
            .collect()
    }

    /// Relations `ξ_k[θ](x'_k) = μ_k(y)` of the output.
    pub fn output_relations(&self) -> Vec<Relation> {
        self.xis
            .iter()
            .zip(&self.mu)
            .enumerate()
            .map(|(k, (xi, mu))| Relation { var: xp_sym(k), lead: xi.clone(), rhs: mu.clone() })
            .collect()
    }

    /// `θ^i(τ_k^0)`, with the table entry for `i < deg ζ_k`.
    pub fn tau_at(&self, k: usize, i: usize) -> LinearTerm {
        match self.tau[k].get(i) {
            Some(t) => t.clone(),
            None => self.tau[k][0].apply_poly(&Poly::monomial(self.field().one(), i)),
        }
    }
}

/// Replaces each `c·θ^j(x_l)` (with `j` below the block degree) by `c·table[l][j]`.
fn expand_with_table(t: &LinearTerm, table: &[Vec<LinearTerm>], sym: fn(usize) -> Sym) -> Option<LinearTerm> {
    let mut out = t.const_part();
    for (s, p) in t.vars() {
        let l = (0..table.len()).find(|&l| sym(l) == *s)?;
        for (j, c) in p.coeffs().iter().enumerate() {
            if !c.is_zero() {
                out = out.add(&table[l].get(j)?.scale(c));
            }
        }
    }
    Some(out)
}

/// Coefficient vector of a term over the monomials `θ^j(x'_l)`, `j < deg ξ_l`.
fn coordinates(t: &LinearTerm, dims: &[usize], field: Field) -> Vec<Scalar> {
    let mut v = Vec::new();
    for (l, &dl) in dims.iter().enumerate() {
        let p = t.var_coeff(&xp_sym(l));
        v.extend((0..dl).map(|j| p.coeff(j)));
    }
    debug_assert!(v.iter().all(|c| c.field() == field));
    v
}

/// Symbolic verification of every property the block promises.
pub fn check_block(blk: &DiagonalizedBlock) -> std::result::Result<(), String> {
    let field = blk.field();
    let d = blk.b.rows();
    if blk.a.mul(&blk.a_inv) != Matrix::identity(field, d) {
        return Err("A·A^{-1} is not the identity".into());
    }
    if blk.a_inv.mul(&blk.b).mul(&blk.a) != blk.b_prime {
        return Err("A^{-1}·B·A differs from the companion block matrix".into());
    }
    let dz: Vec<usize> = blk.zetas.iter().map(|z| z.deg().unwrap_or(0)).collect();
    let dx: Vec<usize> = blk.xis.iter().map(|x| x.deg().unwrap_or(0)).collect();
    if dz.iter().sum::<usize>() != dx.iter().sum::<usize>() {
        return Err("degree sums differ".into());
    }
    if blk.xis.iter().any(|x| !x.is_monic() || x.deg() == Some(0)) {
        return Err("output polynomial not monic of positive degree".into());
    }
    let off = offsets(&dx);
    let y_star = {
        let mut y_row = vec![LinearTerm::zero(field); d];
        let zoff = offsets(&dz);
        for (k, &dk) in dz.iter().enumerate() {
            y_row[zoff[k] + dk - 1] = LinearTerm::constant(field, y_sym(k));
        }
        row_times(&y_row, &blk.a)
    };
    for (k, xi) in blk.xis.iter().enumerate() {
        let dk = &blk.delta[k];
        if dk.len() != dx[k] + 1 || !dk[0].is_zero() {
            return Err(format!("correction table {k} malformed"));
        }
        for i in 0..dx[k] {
            if dk[i + 1] != y_star[off[k] + i].add(&dk[i].theta()) {
                return Err(format!("correction recurrence fails at ({k}, {i})"));
            }
        }
        let mut tail = dk[dx[k]].clone();
        for i in 0..dx[k] {
            tail = tail.add(&dk[i].scale(&xi.coeff(i)));
        }
        if tail != blk.mu[k] {
            return Err(format!("final-entry identity fails for block {k}"));
        }
    }

    let tri = blk.input_relations();
    let diag = blk.output_relations();

    for k in 0..blk.zetas.len() {
        let mut lhs = blk.tau[k][0].apply_poly(&blk.zetas[k]);
        for l in 0..k {
            lhs = lhs.sub(&blk.tau[l][0].apply_poly(&blk.coupling(k, l)));
        }
        lhs = lhs.sub(&LinearTerm::constant(field, y_sym(k)));
        if !reduce(&lhs, &diag).is_zero() {
            return Err(format!("input equation {k} fails under the substitution"));
        }
    }

    let top = 2 * dz.iter().copied().max().unwrap_or(0);
    for k in 0..blk.zetas.len() {
        let mut power = blk.tau[k][0].clone();
        for i in 0..top {
            let via_input = reduce(&LinearTerm::var_pow(field, x_sym(k), i), &tri);
            let expected = expand_with_table(&via_input, &blk.tau, x_sym)
                .ok_or_else(|| format!("input reduction of θ^{i}(x{k}) left the table"))?;
            if reduce(&power, &diag) != reduce(&expected, &diag) {
                return Err(format!("θ^{i}(τ_{k}^0) disagrees with the table"));
            }
            power = power.theta();
        }
    }

    for (k, row) in blk.tau.iter().enumerate() {
        if row.len() != dz[k] {
            return Err(format!("substitution table row {k} has wrong length"));
        }
        for t in row {
            for (l, &dl) in dx.iter().enumerate() {
                if t.var_degree(&xp_sym(l)).is_some_and(|j| j >= dl) {
                    return Err(format!("substitution {t} is not bounded"));
                }
            }
            if t.vars().keys().any(|s| !(0..dx.len()).any(|l| xp_sym(l) == *s)) {
                return Err(format!("substitution {t} uses a foreign variable"));
            }
        }
    }
    let coords: Vec<Vec<Scalar>> = blk.tau.iter().flatten().map(|t| coordinates(t, &dx, field)).collect();
    if Matrix::from_rows(field, coords).map_err(|e| e.to_string())?.rank() != d {
        return Err("substitutions are linearly dependent at y = 0".into());
    }

    let nu_map: BTreeMap<Sym, LinearTerm> = (0..blk.xis.len()).map(|k| (xp_sym(k), blk.nu[k][0].clone())).collect();
    for k in 0..blk.zetas.len() {
        let back = blk.tau[k][0].substitute(&nu_map, &BTreeMap::new());
        if reduce(&back, &tri) != LinearTerm::var(field, x_sym(k)) {
            return Err(format!("τ(ν(x)) differs from x{k}"));
        }
    }
    for (k, xi) in blk.xis.iter().enumerate() {
        let lhs = blk.nu[k][0].apply_poly(xi).sub(&blk.mu[k]);
        if !reduce(&lhs, &tri).is_zero() {
            return Err(format!("ν fails output equation {k}"));
        }
        for i in 0..dx[k] {
            let power = blk.nu[k][0].apply_poly(&Poly::monomial(field.one(), i));
            if reduce(&power, &tri) != reduce(&blk.nu[k][i], &tri) {
                return Err(format!("ν table entry ({k}, {i}) is not θ^{i}(ν^0)"));
            }
        }
    }
    Ok(())
}
