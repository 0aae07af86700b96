//! Dense univariate polynomials over a [`Field`], coefficients stored in ascending order.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};

/// Degree of a polynomial; the zero polynomial has degree `NegInfinity`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInfinity,
    Finite(usize),
}

impl Degree {
    pub fn finite(self) -> Option<usize> {
        match self {
            Degree::Finite(d) => Some(d),
            Degree::NegInfinity => None,
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInfinity => write!(f, "-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    field: Field,
    coeffs: Vec<Scalar>,
}

impl Poly {
    /// Builds a polynomial from ascending coefficients, trimming trailing zeros.
    pub fn new(field: Field, coeffs: Vec<Scalar>) -> Poly {
        for c in &coeffs {
            if c.field() != field {
                panic!("field mismatch: {} vs {}", field, c.field());
            }
        }
        let mut p = Poly { field, coeffs };
        p.trim();
        p
    }

    pub fn zero(field: Field) -> Poly {
        Poly { field, coeffs: Vec::new() }
    }

    pub fn one(field: Field) -> Poly {
        Poly::constant(field.one())
    }

    pub fn x(field: Field) -> Poly {
        Poly::monomial(field.one(), 1)
    }

    pub fn constant(c: Scalar) -> Poly {
        Poly::new(c.field(), vec![c])
    }

    pub fn monomial(c: Scalar, n: usize) -> Poly {
        let field = c.field();
        let mut coeffs = vec![field.zero(); n];
        coeffs.push(c);
        Poly::new(field, coeffs)
    }

    /// Ascending integer coefficients, e.g. `[1, 0, 1]` is X^2 + 1.
    pub fn from_ints(field: Field, coeffs: &[i64]) -> Poly {
        Poly::new(field, coeffs.iter().map(|&c| field.int(c)).collect())
    }

    /// `X - a`.
    pub fn linear(a: &Scalar) -> Poly {
        Poly::new(a.field(), vec![-a, a.field().one()])
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Scalar> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// True for nonzero constants.
    pub fn is_unit(&self) -> bool {
        self.coeffs.len() == 1
    }

    pub fn degree(&self) -> Degree {
        match self.coeffs.len() {
            0 => Degree::NegInfinity,
            n => Degree::Finite(n - 1),
        }
    }

    /// Finite degree, `None` for the zero polynomial.
    pub fn deg(&self) -> Option<usize> {
        self.degree().finite()
    }

    /// Number of stored coefficients (degree + 1, or 0).
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn lead(&self) -> Option<&Scalar> {
        self.coeffs.last()
    }

    pub fn coeff(&self, i: usize) -> Scalar {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn is_monic(&self) -> bool {
        self.lead().is_some_and(|c| c.is_one())
    }

    pub fn monic(&self) -> Poly {
        match self.lead() {
            None => self.clone(),
            Some(c) if c.is_one() => self.clone(),
            Some(c) => self.scale(&c.inv().expect("nonzero lead")),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        Poly::new(self.field, self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Multiplication by X^n.
    pub fn shift(&self, n: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![self.field.zero(); n];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { field: self.field, coeffs }
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        let mut acc = self.field.zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * &self.field.int(i as i64))
            .collect();
        Poly::new(self.field, coeffs)
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one(self.field);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn same_field(&self, other: &Poly) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field.to_string(), other.field.to_string()));
        }
        Ok(())
    }

    /// Quotient and remainder; panics on a zero divisor (see [`euclid_divmod`] for the checked form).
    pub fn divmod(&self, d: &Poly) -> (Poly, Poly) {
        assert_eq!(self.field, d.field, "field mismatch");
        let dl = d.lead().expect("division by zero polynomial");
        let inv = dl.inv().expect("nonzero lead");
        let dn = d.coeffs.len();
        if self.coeffs.len() < dn {
            return (Poly::zero(self.field), self.clone());
        }
        let mut r = self.coeffs.clone();
        let mut q = vec![self.field.zero(); r.len() - dn + 1];
        for i in (0..q.len()).rev() {
            let c = &r[i + dn - 1] * &inv;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[i + j] = &r[i + j] - &(&c * dc);
            }
            q[i] = c;
        }
        r.truncate(dn - 1);
        (Poly::new(self.field, q), Poly::new(self.field, r))
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        self.divmod(d).1
    }

    pub fn quo(&self, d: &Poly) -> Poly {
        self.divmod(d).0
    }

    /// True when `self` divides `other`. Zero divides only zero.
    pub fn divides(&self, other: &Poly) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        other.rem(self).is_zero()
    }

    /// Exact quotient; panics if the division leaves a remainder.
    pub fn div_exact(&self, d: &Poly) -> Poly {
        let (q, r) = self.divmod(d);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn mulmod(&self, other: &Poly, m: &Poly) -> Poly {
        (self * other).rem(m)
    }

    pub fn powmod(&self, e: &BigUint, m: &Poly) -> Poly {
        let mut acc = Poly::one(self.field).rem(m);
        let base = self.rem(m);
        let bits = e.bits();
        for i in (0..bits).rev() {
            acc = acc.mulmod(&acc, m);
            if e.bit(i) {
                acc = acc.mulmod(&base, m);
            }
        }
        acc
    }

    /// Monic gcd (zero iff both inputs are zero).
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Extended Euclid: returns `(g, s, t)` with `s*self + t*other = g`, `g` monic or zero.
    pub fn ext_gcd(&self, other: &Poly) -> (Poly, Poly, Poly) {
        let f = self.field;
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Poly::one(f), Poly::zero(f));
        let (mut t0, mut t1) = (Poly::zero(f), Poly::one(f));
        while !r1.is_zero() {
            let (q, r) = r0.divmod(&r1);
            let s = &s0 - &(&q * &s1);
            let t = &t0 - &(&q * &t1);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        match r0.lead().cloned() {
            None => (r0, s0, t0),
            Some(c) => {
                let inv = c.inv().expect("nonzero lead");
                (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
            }
        }
    }

    pub fn lcm(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.field);
        }
        let g = self.gcd(other);
        (self * &other.div_exact(&g)).monic()
    }

    /// Inverse modulo `m`, if `gcd(self, m) = 1`. The result has degree below `deg(m)`.
    pub fn inv_mod(&self, m: &Poly) -> Option<Poly> {
        let (g, s, _) = self.ext_gcd(m);
        if !g.is_one() {
            return None;
        }
        Some(s.rem(m))
    }

    /// Chinese remaindering for pairwise coprime moduli: the unique `r` with
    /// `deg r < deg(prod m_i)` and `r = a_i mod m_i`.
    pub fn crt(field: Field, parts: &[(Poly, Poly)]) -> Result<Poly> {
        let mut acc = Poly::zero(field);
        let mut modulus = Poly::one(field);
        for (a, m) in parts {
            a.same_field(m)?;
            if m.is_zero() {
                return Err(Error::ZeroPolynomial);
            }
            let inv = modulus.inv_mod(m).ok_or(Error::NotCoprime)?;
            let delta = (&(a - &acc) * &inv).rem(m);
            acc = &acc + &(&modulus * &delta);
            modulus = &modulus * m;
            acc = acc.rem(&modulus);
        }
        Ok(acc)
    }

    /// Canonical total order: degree first, then the ascending coefficient sequence.
    pub fn canonical_cmp(&self, other: &Poly) -> Ordering {
        self.field
            .cmp(&other.field)
            .then_with(|| self.degree().cmp(&other.degree()))
            .then_with(|| {
                for (a, b) in self.coeffs.iter().zip(other.coeffs.iter()) {
                    let o = a.canonical_cmp(b);
                    if o != Ordering::Equal {
                        return o;
                    }
                }
                Ordering::Equal
            })
    }

    /// Parses expressions such as `X^2 - 3/2*X + 1`. The variable may be written `X` or `x`.
    pub fn parse(field: Field, s: &str) -> Result<Poly> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut terms = Vec::new();
        let mut cur = String::new();
        for (i, ch) in compact.char_indices() {
            if (ch == '+' || ch == '-') && i > 0 && !compact[..i].ends_with('^') && !compact[..i].ends_with('/') {
                terms.push(std::mem::take(&mut cur));
            }
            cur.push(ch);
        }
        terms.push(cur);
        let mut acc = Poly::zero(field);
        for t in terms {
            acc = &acc + &parse_term(field, &t)?;
        }
        Ok(acc)
    }
}

fn parse_term(field: Field, t: &str) -> Result<Poly> {
    let bad = || Error::Parse(format!("invalid term {t:?}"));
    let (neg, body) = match t.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    if body.is_empty() {
        return Err(bad());
    }
    let (coef, power) = match body.find(['X', 'x']) {
        None => (field.parse(body)?, 0usize),
        Some(pos) => {
            let c = body[..pos].trim_end_matches('*');
            let coef = if c.is_empty() { field.one() } else { field.parse(c)? };
            let rest = &body[pos + 1..];
            let power = if rest.is_empty() {
                1
            } else {
                rest.strip_prefix('^').ok_or_else(bad)?.parse::<usize>().map_err(|_| bad())?
            };
            (coef, power)
        }
    };
    let coef = if neg { -coef } else { coef };
    Ok(Poly::monomial(coef, power))
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Poly) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Poly {
    fn cmp(&self, other: &Poly) -> Ordering {
        self.canonical_cmp(other)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let s = c.to_string();
            let (neg, mag) = match (self.field, s.strip_prefix('-')) {
                (Field::Q, Some(m)) => (true, m.to_string()),
                _ => (false, s),
            };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let unit = mag == "1";
            match i {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !unit {
                        write!(f, "{mag}*")?;
                    }
                    if i == 1 {
                        write!(f, "X")?;
                    } else {
                        write!(f, "X^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        assert_eq!(self.field, rhs.field, "field mismatch");
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| &self.coeff(i) + &rhs.coeff(i)).collect();
        Poly::new(self.field, coeffs)
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        assert_eq!(self.field, rhs.field, "field mismatch");
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| &self.coeff(i) - &rhs.coeff(i)).collect();
        Poly::new(self.field, coeffs)
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.field, rhs.field, "field mismatch");
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero(self.field);
        }
        let mut out = vec![self.field.zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Poly::new(self.field, out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.field, self.coeffs.iter().map(|c| -c).collect())
    }
}

macro_rules! owned_poly_op {
    ($tr:ident, $m:ident) => {
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: &'a Poly) -> Poly {
                (&self).$m(rhs)
            }
        }
    };
}
owned_poly_op!(Add, add);
owned_poly_op!(Sub, sub);
owned_poly_op!(Mul, mul);

/// Checked Euclidean division: `rho = q * xi + r` with `deg r < deg xi`.
pub fn euclid_divmod(rho: &Poly, xi: &Poly) -> Result<(Poly, Poly)> {
    rho.same_field(xi)?;
    if xi.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(rho.divmod(xi))
}

/// Monic gcd of all inputs with a Bezout certificate `sum chi_i * rho_i = g`.
pub fn gcd_bezout(polys: &[Poly]) -> Result<(Poly, Vec<Poly>)> {
    let first = polys.first().ok_or(Error::EmptyInput)?;
    let field = first.field();
    for p in polys {
        first.same_field(p)?;
    }
    let mut g = Poly::zero(field);
    let mut chis: Vec<Poly> = Vec::with_capacity(polys.len());
    for p in polys {
        let (ng, s, t) = g.ext_gcd(p);
        for c in chis.iter_mut() {
            *c = &*c * &s;
        }
        chis.push(t);
        g = ng;
    }
    Ok((g, chis))
}

/// Monic lcm of all inputs; zero if any input is zero.
pub fn lcm_many(polys: &[Poly]) -> Result<Poly> {
    let first = polys.first().ok_or(Error::EmptyInput)?;
    let mut acc = Poly::one(first.field());
    for p in polys {
        first.same_field(p)?;
        acc = acc.lcm(p);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(c: &[i64]) -> Poly {
        Poly::from_ints(Field::Q, c)
    }

    #[test]
    fn divmod_single_step() {
        let (chi, r) = euclid_divmod(&q(&[-2, 0, 1]), &q(&[0, 1])).unwrap();
        assert_eq!(chi, q(&[0, 1]));
        assert_eq!(r, q(&[-2]));
    }

    #[test]
    fn divmod_identity_case() {
        let rho = q(&[3, -1, 4, 1]);
        let (chi, r) = euclid_divmod(&rho, &rho).unwrap();
        assert!(chi.is_one());
        assert!(r.is_zero());
    }

    #[test]
    fn divmod_quintic_reconstructs() {
        let rho = q(&[1, 0, 3, 1, 2, 1]);
        let xi = q(&[1, 0, 1]);
        let (chi, r) = euclid_divmod(&rho, &xi).unwrap();
        assert!(r.deg().unwrap_or(0) < 2);
        assert_eq!(&(&chi * &xi) + &r, rho);
        // long division by hand: X^3 + 2X^2 + 0X + 1, remainder 0*X + 0
        assert_eq!(chi, q(&[1, 0, 2, 1]));
        assert!(r.is_zero());
    }

    #[test]
    fn divmod_errors() {
        assert_eq!(euclid_divmod(&q(&[1]), &Poly::zero(Field::Q)), Err(Error::DivisionByZero));
        let g = Poly::from_ints(Field::Fp(5), &[1, 1]);
        assert!(matches!(euclid_divmod(&q(&[1]), &g), Err(Error::FieldMismatch(..))));
    }

    #[test]
    fn gcd_of_worked_pair() {
        let (g, chis) = gcd_bezout(&[q(&[1, 0, 3, 1, 2, 1]), q(&[4, 1, 4, 1])]).unwrap();
        assert_eq!(g, q(&[1, 0, 1]));
        let combo = &(&chis[0] * &q(&[1, 0, 3, 1, 2, 1])) + &(&chis[1] * &q(&[4, 1, 4, 1]));
        assert_eq!(combo, g);
    }

    #[test]
    fn gcd_with_zero_and_certificate() {
        let rho = q(&[2, 4]);
        let (g, chis) = gcd_bezout(&[rho.clone(), Poly::zero(Field::Q)]).unwrap();
        assert_eq!(g, rho.monic());
        assert_eq!(&chis[0] * &rho, g);

        let (g, chis) = gcd_bezout(&[q(&[-1, 0, 1]), q(&[1, -2, 1])]).unwrap();
        assert_eq!(g, q(&[-1, 1]));
        let half = Field::Q.ratio(1, 2).unwrap();
        assert_eq!(chis[0], Poly::constant(half.clone()));
        assert_eq!(chis[1], Poly::constant(-half));
        assert!(gcd_bezout(&[]).is_err());
        let (g, _) = gcd_bezout(&[Poly::zero(Field::Q), Poly::zero(Field::Q)]).unwrap();
        assert!(g.is_zero());
    }

    #[test]
    fn lcm_examples() {
        assert_eq!(lcm_many(&[q(&[0, 1]), q(&[-1, 1])]).unwrap(), q(&[0, -1, 1]));
        let rho = q(&[3, 6]);
        assert_eq!(lcm_many(&[rho.clone(), rho.clone()]).unwrap(), rho.monic());
        assert_eq!(lcm_many(&[q(&[-1, 1]), q(&[-1, 0, 1])]).unwrap(), q(&[-1, 0, 1]));
        assert!(lcm_many(&[q(&[1, 1]), Poly::zero(Field::Q)]).unwrap().is_zero());
        assert!(lcm_many(&[]).is_err());
    }

    #[test]
    fn zero_degree_is_negative_infinity() {
        let z = Poly::zero(Field::Q);
        assert_eq!(z.degree(), Degree::NegInfinity);
        assert!(z.degree() < q(&[5]).degree());
    }

    #[test]
    fn parse_and_display() {
        let p = Poly::parse(Field::Q, "X^2 - 3/2*X + 1").unwrap();
        assert_eq!(p.to_string(), "X^2 - 3/2*X + 1");
        assert_eq!(Poly::parse(Field::Q, "-x").unwrap(), q(&[0, -1]));
        let f5 = Field::Fp(5);
        assert_eq!(Poly::parse(f5, "X^2+1").unwrap(), Poly::from_ints(f5, &[1, 0, 1]));
    }

    #[test]
    fn crt_recombines() {
        let m1 = q(&[0, 1]);
        let m2 = q(&[-1, 1]);
        let r = Poly::crt(Field::Q, &[(q(&[0]), m1.clone()), (q(&[1]), m2.clone())]).unwrap();
        assert_eq!(r.rem(&m1), q(&[0]));
        assert_eq!(r.rem(&m2), q(&[1]));
        assert_eq!(r, q(&[0, 1]));
    }
}
