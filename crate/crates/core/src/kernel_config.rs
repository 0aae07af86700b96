//! Kernel configurations and the normalization of kernel-constraint systems.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::factor::{factor, is_irreducible};
use crate::field::Field;
use crate::poly::{gcd_bezout, lcm_many, Poly};

/// A value in `N ∪ {∞}`; `Fin(_) < Inf`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Val {
    Fin(u32),
    Inf,
}

impl Val {
    pub fn finite(self) -> Option<u32> {
        match self {
            Val::Fin(n) => Some(n),
            Val::Inf => None,
        }
    }

    pub fn is_finite(self) -> bool {
        self != Val::Inf
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Fin(n) => write!(f, "{n}"),
            Val::Inf => write!(f, "inf"),
        }
    }
}

/// A kernel configuration with a two-level value function: a default in `{0, ∞}` and
/// finitely many exceptions. Algebraic iff `degree` is finite.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KernelConfiguration {
    field: Field,
    default: Val,
    exceptions: BTreeMap<Poly, Val>,
    degree: Val,
}

impl KernelConfiguration {
    /// Validates and builds a configuration. Exceptions equal to the default are dropped.
    pub fn new(
        field: Field,
        default: Val,
        exceptions: impl IntoIterator<Item = (Poly, Val)>,
        degree: Val,
    ) -> Result<KernelConfiguration> {
        if default != Val::Fin(0) && default != Val::Inf {
            return Err(Error::InvalidConfig("default must be 0 or inf".into()));
        }
        let mut map = BTreeMap::new();
        for (f, v) in exceptions {
            if f.field() != field {
                return Err(Error::FieldMismatch(field.to_string(), f.field().to_string()));
            }
            if !f.is_monic() {
                return Err(Error::NotMonic(f.to_string()));
            }
            if f.deg() == Some(0) || !is_irreducible(&f)? {
                return Err(Error::NotIrreducible(f.to_string()));
            }
            if map.insert(f.clone(), v).is_some() {
                return Err(Error::InvalidConfig(format!("duplicate exception {f}")));
            }
        }
        map.retain(|_, v| *v != default);
        if let Val::Fin(d) = degree {
            if default != Val::Fin(0) {
                return Err(Error::InvalidConfig("algebraic configuration needs default 0".into()));
            }
            let mut sum = 0u64;
            for (f, v) in &map {
                let n = v.finite().ok_or_else(|| Error::InvalidConfig("algebraic configuration with value inf".into()))?;
                sum += f.deg().unwrap_or(0) as u64 * n as u64;
            }
            if sum != d as u64 || d == 0 {
                return Err(Error::InvalidConfig(format!("degree {d} does not match the exceptions (sum {sum})")));
            }
        }
        Ok(KernelConfiguration { field, default, exceptions: map, degree })
    }

    /// Algebraic configuration with the given positive multiplicities; the degree is derived.
    pub fn algebraic(field: Field, exceptions: impl IntoIterator<Item = (Poly, u32)>) -> Result<KernelConfiguration> {
        let ex: Vec<(Poly, Val)> = exceptions.into_iter().map(|(f, n)| (f, Val::Fin(n))).collect();
        let d: u64 = ex.iter().map(|(f, v)| f.deg().unwrap_or(0) as u64 * v.finite().unwrap_or(0) as u64).sum();
        let d = u32::try_from(d).map_err(|_| Error::InvalidConfig("degree too large".into()))?;
        KernelConfiguration::new(field, Val::Fin(0), ex, Val::Fin(d))
    }

    /// Algebraic configuration whose minimal polynomial is `rho` (made monic).
    pub fn from_mipo(rho: &Poly) -> Result<KernelConfiguration> {
        let fac = factor(rho)?;
        KernelConfiguration::algebraic(rho.field(), fac.factors)
    }

    pub fn transcendental(
        field: Field,
        default: Val,
        exceptions: impl IntoIterator<Item = (Poly, Val)>,
    ) -> Result<KernelConfiguration> {
        KernelConfiguration::new(field, default, exceptions, Val::Inf)
    }

    /// `C_∞`: every value infinite.
    pub fn c_infinity(field: Field) -> KernelConfiguration {
        KernelConfiguration { field, default: Val::Inf, exceptions: BTreeMap::new(), degree: Val::Inf }
    }

    /// `C_0`: the transcendental configuration with every value zero.
    pub fn c_zero(field: Field) -> KernelConfiguration {
        KernelConfiguration { field, default: Val::Fin(0), exceptions: BTreeMap::new(), degree: Val::Inf }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn default_value(&self) -> Val {
        self.default
    }

    pub fn exceptions(&self) -> &BTreeMap<Poly, Val> {
        &self.exceptions
    }

    pub fn degree(&self) -> Val {
        self.degree
    }

    pub fn is_algebraic(&self) -> bool {
        self.degree.is_finite()
    }

    pub fn is_transcendental(&self) -> bool {
        !self.is_algebraic()
    }

    /// Degree-one configurations, i.e. `MiPo = X + q`.
    pub fn is_trivial(&self) -> bool {
        self.degree == Val::Fin(1)
    }

    /// Value at a monic irreducible `f`, without checking irreducibility.
    pub fn value(&self, f: &Poly) -> Val {
        self.exceptions.get(f).copied().unwrap_or(self.default)
    }

    /// Value at `f`, rejecting polynomials that are not monic irreducible.
    pub fn value_at(&self, f: &Poly) -> Result<Val> {
        if f.field() != self.field {
            return Err(Error::FieldMismatch(self.field.to_string(), f.field().to_string()));
        }
        if !f.is_monic() {
            return Err(Error::NotMonic(f.to_string()));
        }
        if f.deg() == Some(0) || !is_irreducible(f)? {
            return Err(Error::NotIrreducible(f.to_string()));
        }
        Ok(self.value(f))
    }

    pub fn support(&self) -> BTreeSet<Poly> {
        self.exceptions.iter().filter(|(_, v)| **v != Val::Fin(0)).map(|(f, _)| f.clone()).collect()
    }

    /// The finite set `{f : 0 < C(f) < ∞}`.
    pub fn finite_positive(&self) -> BTreeSet<Poly> {
        self.exceptions
            .iter()
            .filter(|(_, v)| matches!(v, Val::Fin(n) if *n > 0))
            .map(|(f, _)| f.clone())
            .collect()
    }

    pub fn mipo(&self) -> Result<Poly> {
        if !self.is_algebraic() {
            return Err(Error::NotAlgebraic);
        }
        self.f_power_product(self.exceptions.keys())
    }

    /// `F^C = prod_{f in F} f^{C(f)}`.
    pub fn f_power_product<'a>(&self, fs: impl IntoIterator<Item = &'a Poly>) -> Result<Poly> {
        let mut acc = Poly::one(self.field);
        for f in fs {
            match self.value(f) {
                Val::Fin(n) => acc = &acc * &f.pow(n),
                Val::Inf => return Err(Error::InfiniteValue(f.to_string())),
            }
        }
        Ok(acc)
    }

    /// The partial order: every `self`-endomorphism is an `other`-endomorphism.
    pub fn leq(&self, other: &KernelConfiguration) -> Result<bool> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field.to_string(), other.field.to_string()));
        }
        if other.is_algebraic() {
            if !self.is_algebraic() {
                return Ok(false);
            }
            return Ok(self.mipo()?.divides(&other.mipo()?));
        }
        if other.default.is_finite() && self.default > other.default {
            return Ok(false);
        }
        for f in self.exceptions.keys().chain(other.exceptions.keys()) {
            let v2 = other.value(f);
            if v2.is_finite() && self.value(f) > v2 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// A finite constraint system whose normalization is `self`, when one exists
    /// (algebraic configurations, and transcendental ones with default ∞).
    pub fn canonical_theory(&self) -> Result<ConstraintSystem> {
        let field = self.field;
        let single = |p: Poly| vec![vec![p]];
        let equations = if self.is_algebraic() {
            vec![Equation { lhs: single(self.mipo()?), rhs: single(Poly::zero(field)) }]
        } else if self.default == Val::Inf {
            self.exceptions
                .iter()
                .map(|(f, v)| {
                    let n = v.finite().expect("exceptions differ from the default");
                    Equation { lhs: single(f.pow(n)), rhs: single(f.pow(n + 1)) }
                })
                .collect()
        } else {
            return Err(Error::InvalidConfig("configuration with default 0 has no finite theory".into()));
        };
        Ok(ConstraintSystem { field, equations })
    }
}

impl fmt::Display for KernelConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ex: Vec<String> = self.exceptions.iter().map(|(p, v)| format!("{p} -> {v}")).collect();
        write!(f, "default {}, {{{}}}, degree {}", self.default, ex.join(", "), self.degree)
    }
}

/// `Σ_k ∩_l Ker(ρ_{k,l})` on each side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equation {
    pub lhs: Vec<Vec<Poly>>,
    pub rhs: Vec<Vec<Poly>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintSystem {
    pub field: Field,
    pub equations: Vec<Equation>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Normalized {
    Consistent(KernelConfiguration),
    Inconsistent,
}

impl Normalized {
    pub fn config(&self) -> Option<&KernelConfiguration> {
        match self {
            Normalized::Consistent(c) => Some(c),
            Normalized::Inconsistent => None,
        }
    }
}

/// Collapses a sum of intersections of kernels into one kernel: `lcm_k gcd_l ρ_{k,l}`.
pub fn side_to_single_kernel(side: &[Vec<Poly>]) -> Result<Poly> {
    if side.is_empty() {
        return Err(Error::EmptyInput);
    }
    let gcds: Vec<Poly> = side.iter().map(|inner| gcd_bezout(inner).map(|(g, _)| g)).collect::<Result<_>>()?;
    lcm_many(&gcds)
}

pub fn normalize(sys: &ConstraintSystem) -> Result<Normalized> {
    let field = sys.field;
    let mut candidate: Option<Poly> = None;
    let mut bounds: BTreeMap<Poly, u32> = BTreeMap::new();
    for eq in &sys.equations {
        let r1 = side_to_single_kernel(&eq.lhs)?;
        let r2 = side_to_single_kernel(&eq.rhs)?;
        r1.same_field(&r2)?;
        if r1.field() != field {
            return Err(Error::FieldMismatch(field.to_string(), r1.field().to_string()));
        }
        match (r1.is_zero(), r2.is_zero()) {
            (true, true) => {}
            (true, false) | (false, true) => {
                let rho = if r1.is_zero() { r2 } else { r1 };
                candidate = Some(match candidate {
                    None => rho.monic(),
                    Some(c) => c.gcd(&rho),
                });
            }
            (false, false) => {
                let (f1, f2) = (factor(&r1)?, factor(&r2)?);
                let keys: BTreeSet<Poly> = f1.irreducibles().into_iter().chain(f2.irreducibles()).collect();
                for f in keys {
                    let (n1, n2) = (f1.multiplicity(&f), f2.multiplicity(&f));
                    if n1 != n2 {
                        let m = n1.min(n2);
                        bounds.entry(f).and_modify(|b| *b = (*b).min(m)).or_insert(m);
                    }
                }
            }
        }
    }
    match candidate {
        None => Ok(Normalized::Consistent(KernelConfiguration::transcendental(
            field,
            Val::Inf,
            bounds.into_iter().map(|(f, n)| (f, Val::Fin(n))),
        )?)),
        Some(rho) => {
            let fac = factor(&rho)?;
            let ex: Vec<(Poly, u32)> = fac
                .factors
                .into_iter()
                .map(|(f, r)| {
                    let c = bounds.get(&f).map_or(r, |b| r.min(*b));
                    (f, c)
                })
                .filter(|(_, c)| *c > 0)
                .collect();
            if ex.is_empty() {
                return Ok(Normalized::Inconsistent);
            }
            Ok(Normalized::Consistent(KernelConfiguration::algebraic(field, ex)?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(c: &[i64]) -> Poly {
        Poly::from_ints(Field::Q, c)
    }

    fn eq(l: Poly, r: Poly) -> Equation {
        Equation { lhs: vec![vec![l]], rhs: vec![vec![r]] }
    }

    fn sys(eqs: Vec<Equation>) -> ConstraintSystem {
        ConstraintSystem { field: Field::Q, equations: eqs }
    }

    #[test]
    fn single_kernel_of_sides() {
        assert_eq!(side_to_single_kernel(&[vec![q(&[0, 1])]]).unwrap(), q(&[0, 1]));
        assert_eq!(side_to_single_kernel(&[vec![q(&[0, 1]), q(&[0, 0, 1])]]).unwrap(), q(&[0, 1]));
        assert_eq!(side_to_single_kernel(&[vec![q(&[0, 1])], vec![q(&[-1, 1])]]).unwrap(), q(&[0, -1, 1]));
        assert_eq!(side_to_single_kernel(&[]), Err(Error::EmptyInput));
    }

    #[test]
    fn worked_pair_is_algebraic() {
        let s = sys(vec![
            eq(q(&[1, 0, 3, 1, 2, 1]), Poly::zero(Field::Q)),
            eq(q(&[4, 1, 4, 1]), Poly::zero(Field::Q)),
        ]);
        let c = normalize(&s).unwrap().config().cloned().unwrap();
        assert!(c.is_algebraic());
        assert_eq!(c.mipo().unwrap(), q(&[1, 0, 1]));
    }

    #[test]
    fn inconsistency_and_empty_system() {
        let s = sys(vec![eq(q(&[0, 1]), Poly::zero(Field::Q)), eq(q(&[0, 1]), q(&[1]))]);
        assert_eq!(normalize(&s).unwrap(), Normalized::Inconsistent);
        assert_eq!(
            normalize(&sys(vec![])).unwrap(),
            Normalized::Consistent(KernelConfiguration::c_infinity(Field::Q))
        );
    }

    #[test]
    fn kernel_chain_bound() {
        let c = normalize(&sys(vec![eq(q(&[0, 0, 1]), q(&[0, 0, 0, 1]))])).unwrap();
        let c = c.config().unwrap();
        assert!(c.is_transcendental());
        assert_eq!(c.default_value(), Val::Inf);
        assert_eq!(c.value_at(&q(&[0, 1])).unwrap(), Val::Fin(2));
        assert_eq!(c.value_at(&q(&[1, 1])).unwrap(), Val::Inf);
        assert!(c.value_at(&q(&[0, 0, 1])).is_err());
    }

    #[test]
    fn linear_equation_is_trivial() {
        let c = normalize(&sys(vec![eq(q(&[3, 1]), Poly::zero(Field::Q))])).unwrap();
        assert!(c.config().unwrap().is_trivial());
    }

    #[test]
    fn mipo_examples() {
        let x = q(&[0, 1]);
        let c = KernelConfiguration::algebraic(Field::Q, [(x.clone(), 2), (q(&[1, 1]), 1)]).unwrap();
        assert_eq!(c.mipo().unwrap(), q(&[0, 0, 1, 1]));
        assert_eq!(c.degree(), Val::Fin(3));
        let c = KernelConfiguration::algebraic(Field::Q, [(q(&[-1, 1]), 1), (q(&[-2, 1]), 1)]).unwrap();
        assert_eq!(c.mipo().unwrap(), q(&[2, -3, 1]));
        assert_eq!(KernelConfiguration::c_infinity(Field::Q).mipo(), Err(Error::NotAlgebraic));
    }

    #[test]
    fn f_power_products() {
        let x = q(&[0, 1]);
        let xm1 = q(&[-1, 1]);
        let c = KernelConfiguration::transcendental(Field::Q, Val::Inf, [(x.clone(), Val::Fin(1)), (xm1.clone(), Val::Fin(2))])
            .unwrap();
        assert!(c.f_power_product([].iter()).unwrap().is_one());
        assert_eq!(c.f_power_product([x.clone(), xm1.clone()].iter()).unwrap(), &x * &xm1.pow(2));
        assert!(matches!(c.f_power_product([q(&[1, 1])].iter()), Err(Error::InfiniteValue(_))));
    }

    #[test]
    fn invalid_configurations() {
        assert!(KernelConfiguration::algebraic(Field::Q, [(q(&[-1, 0, 1]), 1)]).is_err());
        assert!(KernelConfiguration::algebraic(Field::Q, [(q(&[0, 2]), 1)]).is_err());
        assert!(KernelConfiguration::new(Field::Q, Val::Fin(0), [(q(&[0, 1]), Val::Fin(1))], Val::Fin(2)).is_err());
        assert!(KernelConfiguration::new(Field::Q, Val::Fin(0), [(q(&[0, 1]), Val::Inf)], Val::Fin(1)).is_err());
    }

    #[test]
    fn leq_extremes_and_divisibility() {
        let inf = KernelConfiguration::c_infinity(Field::Q);
        let zero = KernelConfiguration::c_zero(Field::Q);
        let a = KernelConfiguration::from_mipo(&q(&[0, 1])).unwrap();
        let b = KernelConfiguration::from_mipo(&q(&[0, -1, 1])).unwrap();
        let t = normalize(&sys(vec![eq(q(&[0, 0, 1]), q(&[0, 0, 0, 1]))])).unwrap().config().cloned().unwrap();
        for c in [&inf, &zero, &a, &b, &t] {
            assert!(c.leq(&inf).unwrap());
            assert!(c.leq(c).unwrap());
        }
        assert!(zero.leq(&t).unwrap());
        assert!(a.leq(&b).unwrap());
        assert!(!b.leq(&a).unwrap());
        assert!(!inf.leq(&zero).unwrap());
    }

    #[test]
    fn canonical_theory_round_trips() {
        let t = normalize(&sys(vec![eq(q(&[0, 0, 1]), q(&[0, 0, 0, 1])), eq(q(&[1, 0, 1]), q(&[1]))]))
            .unwrap()
            .config()
            .cloned()
            .unwrap();
        let again = normalize(&t.canonical_theory().unwrap()).unwrap();
        assert_eq!(again.config(), Some(&t));
        assert!(KernelConfiguration::c_zero(Field::Q).canonical_theory().is_err());
    }
}
