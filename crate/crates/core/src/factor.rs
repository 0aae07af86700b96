//! Irreducible factorization over GF(p) (Cantor-Zassenhaus) and over Q
//! (Zassenhaus: modular factorization, Hensel lifting, subset recombination).

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{is_prime_u64, Field, Scalar};
use crate::poly::Poly;

/// Factorizations over Q are refused above this degree.
pub const MAX_Q_DEGREE: usize = 64;

const RNG_SEED: u64 = 0x6b65_7263_6f6e_66;

/// `unit * prod f_i^{e_i}` with monic irreducible `f_i`, sorted canonically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub unit: Scalar,
    pub factors: Vec<(Poly, u32)>,
}

impl Factorization {
    pub fn reconstruct(&self) -> Poly {
        let mut acc = Poly::constant(self.unit.clone());
        for (f, e) in &self.factors {
            acc = &acc * &f.pow(*e);
        }
        acc
    }

    pub fn irreducibles(&self) -> Vec<Poly> {
        self.factors.iter().map(|(f, _)| f.clone()).collect()
    }

    pub fn multiplicity(&self, f: &Poly) -> u32 {
        self.factors.iter().find(|(g, _)| g == f).map_or(0, |(_, e)| *e)
    }
}

pub fn factor(rho: &Poly) -> Result<Factorization> {
    let unit = rho.lead().cloned().ok_or(Error::ZeroPolynomial)?;
    let monic = rho.monic();
    let mut acc: BTreeMap<Poly, u32> = BTreeMap::new();
    if monic.deg() != Some(0) {
        match rho.field() {
            Field::Fp(p) => {
                let mut rng = ChaCha8Rng::seed_from_u64(RNG_SEED);
                for (g, m) in squarefree_fp(&monic, p) {
                    for (h, d) in distinct_degree(&g, p) {
                        for f in equal_degree(&h, d, p, &mut rng) {
                            *acc.entry(f).or_insert(0) += m;
                        }
                    }
                }
            }
            Field::Q => {
                let n = monic.deg().unwrap_or(0);
                if n > MAX_Q_DEGREE {
                    return Err(Error::DegreeTooLarge(n));
                }
                for (g, m) in squarefree_yun(&monic) {
                    for f in factor_squarefree_q(&g) {
                        *acc.entry(f).or_insert(0) += m;
                    }
                }
            }
        }
    }
    Ok(Factorization { unit, factors: acc.into_iter().collect() })
}

/// Monic irreducible factors of `rho`, sorted canonically.
pub fn irreducible_factors(rho: &Poly) -> Result<Vec<Poly>> {
    Ok(factor(rho)?.irreducibles())
}

pub fn is_irreducible(rho: &Poly) -> Result<bool> {
    match rho.deg() {
        None => Err(Error::ZeroPolynomial),
        Some(0) => Err(Error::ConstantPolynomial),
        Some(_) => {
            let fac = factor(rho)?;
            Ok(fac.factors.len() == 1 && fac.factors[0].1 == 1)
        }
    }
}

/// Yun's squarefree decomposition; valid in characteristic zero.
fn squarefree_yun(f: &Poly) -> Vec<(Poly, u32)> {
    let mut out = Vec::new();
    let d = f.derivative();
    let a = f.gcd(&d);
    let mut b = f.div_exact(&a);
    let mut c = &d.div_exact(&a) - &b.derivative();
    let mut i = 1;
    while !b.is_unit() {
        let a = b.gcd(&c);
        b = b.div_exact(&a);
        c = &c.div_exact(&a) - &b.derivative();
        if !a.is_unit() {
            out.push((a.clone(), i));
        }
        i += 1;
    }
    out
}

fn pth_root(f: &Poly, p: u64) -> Poly {
    let p = p as usize;
    let coeffs = f.coeffs().iter().step_by(p).cloned().collect();
    Poly::new(f.field(), coeffs)
}

/// Squarefree decomposition over GF(p), handling p-th powers.
fn squarefree_fp(f: &Poly, p: u64) -> Vec<(Poly, u32)> {
    let mut out = Vec::new();
    if f.is_unit() {
        return out;
    }
    let d = f.derivative();
    if d.is_zero() {
        for (g, m) in squarefree_fp(&pth_root(f, p), p) {
            out.push((g, m * p as u32));
        }
        return out;
    }
    let mut c = f.gcd(&d);
    let mut w = f.div_exact(&c);
    let mut i = 1;
    while !w.is_unit() {
        let y = w.gcd(&c);
        let z = w.div_exact(&y);
        if !z.is_unit() {
            out.push((z, i));
        }
        i += 1;
        w = y;
        c = c.div_exact(&w);
    }
    if !c.is_unit() {
        for (g, m) in squarefree_fp(&pth_root(&c, p), p) {
            out.push((g, m * p as u32));
        }
    }
    out
}

/// Splits a squarefree monic polynomial into products of irreducibles of equal degree.
fn distinct_degree(f: &Poly, p: u64) -> Vec<(Poly, usize)> {
    let field = f.field();
    let x = Poly::x(field);
    let pe = BigUint::from(p);
    let mut out = Vec::new();
    let mut rest = f.clone();
    let mut h = x.rem(&rest);
    let mut d = 1;
    while rest.deg().unwrap_or(0) >= 2 * d {
        h = h.powmod(&pe, &rest);
        let g = rest.gcd(&(&h - &x));
        if !g.is_unit() {
            rest = rest.div_exact(&g);
            h = h.rem(&rest);
            out.push((g, d));
        }
        d += 1;
    }
    if let Some(n) = rest.deg() {
        if n > 0 {
            out.push((rest, n));
        }
    }
    out
}

fn random_poly(field: Field, below: usize, rng: &mut ChaCha8Rng) -> Poly {
    let p = field.characteristic();
    let coeffs = (0..below).map(|_| Scalar::Fp { v: rng.gen_range(0..p), p }).collect();
    Poly::new(field, coeffs)
}

/// Cantor-Zassenhaus splitting of a product of distinct irreducibles of degree `d`.
fn equal_degree(f: &Poly, d: usize, p: u64, rng: &mut ChaCha8Rng) -> Vec<Poly> {
    let n = f.deg().unwrap_or(0);
    if n == d {
        return vec![f.clone()];
    }
    let field = f.field();
    let exp = (BigUint::from(p).pow(d as u32) - 1u32) / 2u32;
    loop {
        let a = random_poly(field, n, rng);
        if a.deg().unwrap_or(0) == 0 {
            continue;
        }
        let b = if p == 2 {
            let mut t = a.clone();
            let mut s = a.clone();
            for _ in 1..d {
                t = t.mulmod(&t, f);
                s = &s + &t;
            }
            s
        } else {
            &a.powmod(&exp, f) - &Poly::one(field)
        };
        let g = f.gcd(&b);
        if !g.is_unit() && g.deg() != f.deg() {
            let mut out = equal_degree(&g, d, p, rng);
            out.extend(equal_degree(&f.div_exact(&g), d, p, rng));
            return out;
        }
    }
}

type IntPoly = Vec<BigInt>;

fn trim_int(mut v: IntPoly) -> IntPoly {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

/// Primitive integer polynomial with positive lead, proportional to `f`.
fn to_primitive_int(f: &Poly) -> IntPoly {
    let rats: Vec<&BigRational> = f.coeffs().iter().map(|c| c.as_rational().expect("rational poly")).collect();
    let den = rats.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let ints: IntPoly = rats.iter().map(|r| r.numer() * (&den / r.denom())).collect();
    let content = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    let sign = if ints.last().is_some_and(|c| c.is_negative()) { -BigInt::one() } else { BigInt::one() };
    ints.into_iter().map(|c| c / &content * &sign).collect()
}

fn int_to_q(v: &IntPoly) -> Poly {
    Poly::new(Field::Q, v.iter().map(|c| Scalar::Q(BigRational::from_integer(c.clone()))).collect())
}

fn int_to_fp(v: &IntPoly, p: u64) -> Poly {
    let field = Field::Fp(p);
    Poly::new(field, v.iter().map(|c| field.from_bigint(c)).collect())
}

fn fp_to_int(f: &Poly) -> IntPoly {
    f.coeffs().iter().map(|c| BigInt::from(c.residue().expect("prime field"))).collect()
}

fn int_mul(a: &IntPoly, b: &IntPoly) -> IntPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn int_mod(v: &IntPoly, m: &BigInt) -> IntPoly {
    trim_int(v.iter().map(|c| c.mod_floor(m)).collect())
}

fn symmetric(c: &BigInt, m: &BigInt) -> BigInt {
    let r = c.mod_floor(m);
    if &r * 2 > *m {
        r - m
    } else {
        r
    }
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.mod_floor(m).extended_gcd(m);
    e.x.mod_floor(m)
}

fn small_primes() -> impl Iterator<Item = u64> {
    (3u64..).filter(|&n| is_prime_u64(n))
}

/// Factors a monic squarefree rational polynomial into monic irreducibles.
fn factor_squarefree_q(g: &Poly) -> Vec<Poly> {
    let n = g.deg().unwrap_or(0);
    if n <= 1 {
        return vec![g.clone()];
    }
    let big = to_primitive_int(g);
    let lc = big.last().cloned().expect("nonzero");

    // Among a few good primes, keep the one giving the fewest modular factors.
    let mut best: Option<(u64, Vec<Poly>)> = None;
    let mut good = 0;
    for p in small_primes() {
        if (&lc % BigInt::from(p)).is_zero() {
            continue;
        }
        let gp = int_to_fp(&big, p).monic();
        if gp.deg() != Some(n) || !gp.gcd(&gp.derivative()).is_one() {
            continue;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(RNG_SEED ^ p);
        let mut facs = Vec::new();
        for (h, d) in distinct_degree(&gp, p) {
            facs.extend(equal_degree(&h, d, p, &mut rng));
        }
        if facs.len() == 1 {
            return vec![g.clone()];
        }
        if best.as_ref().is_none_or(|(_, b)| facs.len() < b.len()) {
            best = Some((p, facs));
        }
        good += 1;
        if good >= 4 {
            break;
        }
    }
    let (p, modular) = best.expect("some prime is good");

    let max_coeff = big.iter().map(|c| c.abs()).max().expect("nonzero");
    let bound = BigInt::from(2) * lc.abs() * (BigInt::one() << n) * BigInt::from(n + 1) * max_coeff;
    let pb = BigInt::from(p);
    let mut k = 1u32;
    let mut pk = pb.clone();
    while pk <= bound {
        pk *= &pb;
        k += 1;
    }

    let target = int_mod(&big.iter().map(|c| c * mod_inverse(&lc, &pk)).collect(), &pk);
    let lifted: Vec<IntPoly> = modular
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let rest = modular
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .fold(Poly::one(Field::Fp(p)), |acc, (_, h)| &acc * h);
            hensel_lift(&target, f, &rest, p, k)
        })
        .collect();

    recombine(big, lc, lifted, &pk)
        .into_iter()
        .map(|f| int_to_q(&f).monic())
        .collect()
}

/// Lifts `target = f * h mod p` to a factorization mod `p^k`, returning the lift of `f`.
fn hensel_lift(target: &IntPoly, f: &Poly, h: &Poly, p: u64, k: u32) -> IntPoly {
    let (g, s, t) = f.ext_gcd(h);
    debug_assert!(g.is_one());
    let pb = BigInt::from(p);
    let mut fi = fp_to_int(f);
    let mut hi = fp_to_int(h);
    let mut pj = pb.clone();
    for _ in 1..k {
        let diff: IntPoly = {
            let prod = int_mul(&fi, &hi);
            let n = target.len().max(prod.len());
            (0..n)
                .map(|i| {
                    let a = target.get(i).cloned().unwrap_or_default();
                    let b = prod.get(i).cloned().unwrap_or_default();
                    a - b
                })
                .collect()
        };
        let e = int_to_fp(&diff.iter().map(|c| c.div_floor(&pj)).collect(), p);
        let (q, r) = (&t * &e).divmod(f);
        // deg(dh) < deg(h) follows from deg(e) < deg(f * h)
        let dh = &(&e * &s) + &(&q * h);
        let df = r;
        fi = add_scaled(&fi, &fp_to_int(&df), &pj);
        hi = add_scaled(&hi, &fp_to_int(&dh), &pj);
        pj *= &pb;
    }
    int_mod(&fi, &pj)
}

fn add_scaled(a: &IntPoly, b: &IntPoly, scale: &BigInt) -> IntPoly {
    let n = a.len().max(b.len());
    trim_int(
        (0..n)
            .map(|i| a.get(i).cloned().unwrap_or_default() + b.get(i).cloned().unwrap_or_default() * scale)
            .collect(),
    )
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(idx.clone());
        let mut i = k;
        while i > 0 && idx[i - 1] == i - 1 + n - k {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn primitive_part(v: IntPoly) -> IntPoly {
    let content = v.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    let sign = if v.last().is_some_and(|c| c.is_negative()) { -BigInt::one() } else { BigInt::one() };
    v.into_iter().map(|c| c / &content * &sign).collect()
}

/// Classic subset recombination of lifted modular factors with trial division over Z.
fn recombine(mut g: IntPoly, mut lc: BigInt, mut lifted: Vec<IntPoly>, pk: &BigInt) -> Vec<IntPoly> {
    let mut found = Vec::new();
    let mut s = 1;
    while 2 * s <= lifted.len() {
        let mut hit = None;
        for subset in combinations(lifted.len(), s) {
            let mut cand = vec![lc.clone()];
            for &i in &subset {
                cand = int_mod(&int_mul(&cand, &lifted[i]), pk);
            }
            let cand: IntPoly = trim_int(cand.iter().map(|c| symmetric(c, pk)).collect());
            let cand = primitive_part(cand);
            // cheap constant-term screen before the full division
            let c0 = cand.first().cloned().unwrap_or_default();
            let g0 = g.first().cloned().unwrap_or_default();
            if !g0.is_zero() && (c0.is_zero() || !(&g0 % &c0).is_zero()) {
                continue;
            }
            let (quo, rem) = int_to_q(&g).divmod(&int_to_q(&cand));
            if rem.is_zero() {
                hit = Some((subset, cand, quo));
                break;
            }
        }
        match hit {
            Some((subset, cand, quo)) => {
                found.push(cand);
                g = primitive_part(to_primitive_int(&quo));
                lc = g.last().cloned().expect("nonzero");
                lifted = lifted
                    .into_iter()
                    .enumerate()
                    .filter(|(i, _)| !subset.contains(i))
                    .map(|(_, f)| f)
                    .collect();
            }
            None => s += 1,
        }
    }
    if g.len() > 1 {
        found.push(g);
    }
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;
    use proptest::prelude::*;

    fn q(c: &[i64]) -> Poly {
        Poly::from_ints(Field::Q, c)
    }

    fn fp(p: u64, c: &[i64]) -> Poly {
        Poly::from_ints(Field::Fp(p), c)
    }

    /// Independent oracle: repeated trial division by every monic polynomial in
    /// increasing degree; the first divisor found is always irreducible.
    fn brute_force_fp(f: &Poly, p: u64) -> Vec<(Poly, u32)> {
        let field = Field::Fp(p);
        let mut rest = f.monic();
        let mut out: Vec<(Poly, u32)> = Vec::new();
        let mut d = 1;
        while rest.deg().unwrap_or(0) >= 1 {
            if 2 * d > rest.deg().unwrap() {
                out.push((rest.clone(), 1));
                break;
            }
            let mut found = false;
            let count = p.pow(d as u32);
            for idx in 0..count {
                let mut coeffs = Vec::with_capacity(d + 1);
                let mut v = idx;
                for _ in 0..d {
                    coeffs.push(Scalar::Fp { v: v % p, p });
                    v /= p;
                }
                coeffs.push(field.one());
                let cand = Poly::new(field, coeffs);
                if cand.divides(&rest) {
                    out.push((cand.clone(), 1));
                    rest = rest.div_exact(&cand);
                    found = true;
                    break;
                }
            }
            if !found {
                d += 1;
            }
        }
        let mut merged: BTreeMap<Poly, u32> = BTreeMap::new();
        for (f, e) in out {
            *merged.entry(f).or_insert(0) += e;
        }
        merged.into_iter().collect()
    }

    fn rational_root_free(f: &Poly) -> bool {
        let v = to_primitive_int(f);
        let a0 = v[0].abs();
        let an = v.last().unwrap().abs();
        if a0.is_zero() {
            return false;
        }
        let divisors = |n: &BigInt| -> Vec<BigInt> {
            let n = n.to_i64().unwrap();
            (1..=n).filter(|d| n % d == 0).map(BigInt::from).collect()
        };
        for num in divisors(&a0) {
            for den in divisors(&an) {
                for s in [1, -1] {
                    let r = Scalar::Q(BigRational::new(&num * s, den.clone()));
                    if f.eval(&r).is_zero() {
                        return false;
                    }
                }
            }
        }
        true
    }

    #[test]
    fn x4_minus_1_over_q() {
        let fac = factor(&q(&[-1, 0, 0, 0, 1])).unwrap();
        assert_eq!(fac.irreducibles(), vec![q(&[-1, 1]), q(&[1, 1]), q(&[1, 0, 1])]);
        assert!(fac.factors.iter().all(|(_, e)| *e == 1));
        assert!(rational_root_free(&q(&[1, 0, 1])));
        assert_eq!(fac.reconstruct(), q(&[-1, 0, 0, 0, 1]));
    }

    #[test]
    fn constant_has_no_factors() {
        let fac = factor(&q(&[7])).unwrap();
        assert!(fac.factors.is_empty());
        assert_eq!(fac.unit, Field::Q.int(7));
        assert_eq!(factor(&Poly::zero(Field::Q)), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn irreducibility_examples() {
        assert!(is_irreducible(&fp(2, &[1, 1, 1])).unwrap());
        assert!(is_irreducible(&q(&[1, 0, 1])).unwrap());
        assert!(!is_irreducible(&q(&[-1, 0, 1])).unwrap());
        assert!(!is_irreducible(&fp(5, &[1, 0, 1])).unwrap());
        assert!(fp(5, &[1, 0, 1]).eval(&Field::Fp(5).int(2)).is_zero());
        assert_eq!(is_irreducible(&q(&[3])), Err(Error::ConstantPolynomial));
    }

    #[test]
    fn q_repeated_and_rational_factors() {
        // (2X - 1)^2 (X^2 + X + 1)^3 / 5
        let a = q(&[-1, 2]);
        let b = q(&[1, 1, 1]);
        let rho = (&a.pow(2) * &b.pow(3)).scale(&Field::Q.ratio(1, 5).unwrap());
        let fac = factor(&rho).unwrap();
        assert_eq!(fac.reconstruct(), rho);
        assert_eq!(fac.multiplicity(&a.monic()), 2);
        assert_eq!(fac.multiplicity(&b), 3);
    }

    #[test]
    fn swinnerton_dyer_style_recombination() {
        // X^4 - 10X^2 + 1 is irreducible over Q but splits modulo every prime.
        let f = q(&[1, 0, -10, 0, 1]);
        assert!(is_irreducible(&f).unwrap());
        let g = &f * &q(&[-2, 0, 1]);
        let fac = factor(&g).unwrap();
        assert_eq!(fac.irreducibles(), vec![q(&[-2, 0, 1]), f]);
    }

    #[test]
    fn cyclotomic_split() {
        // X^12 - 1 has the cyclotomic factors of 1, 2, 3, 4, 6, 12.
        let mut c = vec![0i64; 13];
        c[0] = -1;
        c[12] = 1;
        let fac = factor(&q(&c)).unwrap();
        assert_eq!(fac.factors.len(), 6);
        assert_eq!(fac.reconstruct(), q(&c));
        assert!(fac.factors.iter().any(|(f, _)| *f == q(&[1, 0, -1, 0, 1])));
    }

    #[test]
    fn gf2_and_gf3_high_multiplicity() {
        let f = fp(2, &[1, 1]).pow(6);
        let fac = factor(&f).unwrap();
        assert_eq!(fac.factors, vec![(fp(2, &[1, 1]), 6)]);
        let g = &fp(3, &[0, 1]).pow(3) * &fp(3, &[1, 0, 1]).pow(2);
        let fac = factor(&g).unwrap();
        assert_eq!(fac.factors, vec![(fp(3, &[0, 1]), 3), (fp(3, &[1, 0, 1]), 2)]);
    }

    #[test]
    fn degree_cap() {
        let mut c = vec![0i64; 66];
        c[0] = 1;
        c[65] = 1;
        assert_eq!(factor(&q(&c)), Err(Error::DegreeTooLarge(65)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn fp_matches_brute_force(
            p in prop::sample::select(vec![2u64, 3, 5, 7]),
            coeffs in prop::collection::vec(0i64..7, 2..=7),
        ) {
            let f = fp(p, &coeffs);
            prop_assume!(f.deg().unwrap_or(0) >= 1);
            let fac = factor(&f).unwrap();
            prop_assert_eq!(fac.reconstruct(), f.clone());
            prop_assert_eq!(fac.factors, brute_force_fp(&f, p));
        }

        #[test]
        fn q_factor_reconstructs(
            parts in prop::collection::vec(prop::collection::vec(-4i64..5, 2..4), 1..4),
        ) {
            let mut rho = q(&[1]);
            for c in &parts {
                let f = q(c);
                if f.deg().unwrap_or(0) >= 1 {
                    rho = &rho * &f;
                }
            }
            prop_assume!(rho.deg().unwrap_or(0) >= 1);
            let fac = factor(&rho).unwrap();
            prop_assert_eq!(fac.reconstruct(), rho);
            for (f, _) in &fac.factors {
                prop_assert!(f.is_monic());
                if f.deg().unwrap() <= 3 && f.deg().unwrap() >= 2 {
                    prop_assert!(rational_root_free(f));
                }
            }
        }
    }
}
