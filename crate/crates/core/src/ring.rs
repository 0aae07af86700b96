//! The ring of definable operators over a kernel configuration, kept in a canonical
//! normal form: an image part `ρ/η` plus kernel components modulo `f^C(f)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::factor::{irreducible_factors, is_irreducible};
use crate::kernel_config::{KernelConfiguration, Val};
use crate::linalg::Matrix;
use crate::model::EndoModel;
use crate::poly::Poly;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Generator {
    /// `ρ[θ]`.
    Rho(Poly),
    /// Projection onto `Im(F^C)`.
    ProjIm(BTreeSet<Poly>),
    /// Projection onto `Ker(F^C)`.
    ProjKer(BTreeSet<Poly>),
    /// The partial inverse `η[θ]^{-1}`.
    Inv(Poly),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Gen(Generator),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
}

impl Expr {
    pub fn rho(p: Poly) -> Expr {
        Expr::Gen(Generator::Rho(p))
    }

    pub fn proj_im(fs: impl IntoIterator<Item = Poly>) -> Expr {
        Expr::Gen(Generator::ProjIm(fs.into_iter().collect()))
    }

    pub fn proj_ker(fs: impl IntoIterator<Item = Poly>) -> Expr {
        Expr::Gen(Generator::ProjKer(fs.into_iter().collect()))
    }

    pub fn inv(eta: Poly) -> Expr {
        Expr::Gen(Generator::Inv(eta))
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Add(vec![a, b])
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Mul(vec![a, b])
    }
}

/// Canonical element. `im` is present iff the configuration is transcendental and holds a
/// reduced fraction with monic denominator. For algebraic configurations `ker` has every
/// support polynomial as a key; otherwise a key `f` is kept only when `f` divides `η` or
/// its component differs from the one induced by `ρ/η`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RingElem {
    config: KernelConfiguration,
    im: Option<(Poly, Poly)>,
    ker: BTreeMap<Poly, Poly>,
}

/// Image fraction plus a component for every `f` with `0 < C(f) < ∞`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Full {
    im: Option<(Poly, Poly)>,
    comps: BTreeMap<Poly, Poly>,
}

fn reduce_fraction(rho: &Poly, eta: &Poly) -> (Poly, Poly) {
    let field = eta.field();
    if rho.is_zero() {
        return (Poly::zero(field), Poly::one(field));
    }
    let g = rho.gcd(eta);
    let (r, e) = (rho.div_exact(&g), eta.div_exact(&g));
    let lc = e.lead().expect("nonzero denominator").clone();
    let inv = lc.inv().expect("nonzero leading coefficient");
    (r.scale(&inv), e.scale(&inv))
}

fn modulus(config: &KernelConfiguration, f: &Poly) -> Poly {
    f.pow(config.value(f).finite().expect("kernel key with finite value"))
}

/// Action of `ρ·η^{-1}` on `Ker(f^C)`, zero when `f` divides `η`.
fn induced(config: &KernelConfiguration, f: &Poly, rho: &Poly, eta: &Poly) -> Poly {
    let m = modulus(config, f);
    if f.divides(eta) {
        return Poly::zero(f.field());
    }
    let inv = eta.inv_mod(&m).expect("denominator coprime to the modulus");
    rho.mulmod(&inv, &m)
}

impl Full {
    fn canonical(self, config: &KernelConfiguration) -> RingElem {
        let ker = match &self.im {
            None => self.comps,
            Some((rho, eta)) => self
                .comps
                .into_iter()
                .filter(|(f, c)| f.divides(eta) || *c != induced(config, f, rho, eta))
                .collect(),
        };
        RingElem { config: config.clone(), im: self.im, ker }
    }

    fn zip(
        &self,
        other: &Full,
        config: &KernelConfiguration,
        im_op: impl Fn(&(Poly, Poly), &(Poly, Poly)) -> (Poly, Poly),
        op: impl Fn(&Poly, &Poly, &Poly) -> Poly,
    ) -> Full {
        let im = match (&self.im, &other.im) {
            (Some(a), Some(b)) => Some(im_op(a, b)),
            _ => None,
        };
        let comps = self
            .comps
            .iter()
            .map(|(f, a)| {
                let m = modulus(config, f);
                (f.clone(), op(a, &other.comps[f], &m))
            })
            .collect();
        Full { im, comps }
    }
}

fn kernel_keys(config: &KernelConfiguration) -> BTreeSet<Poly> {
    config.finite_positive()
}

fn check_projection_set(config: &KernelConfiguration, fs: &BTreeSet<Poly>) -> Result<()> {
    for f in fs {
        if f.field() != config.field() || !f.is_monic() || f.deg().is_none_or(|d| d == 0) || !is_irreducible(f)? {
            return Err(Error::IllegalGenerator(format!("{f} is not monic irreducible")));
        }
        if !matches!(config.value(f), Val::Fin(n) if n > 0) {
            return Err(Error::IllegalGenerator(format!("{f} has value {}, need 0 < C(f) < inf", config.value(f))));
        }
    }
    Ok(())
}

fn check_denominator(config: &KernelConfiguration, eta: &Poly) -> Result<()> {
    if eta.field() != config.field() {
        return Err(Error::FieldMismatch(config.field().to_string(), eta.field().to_string()));
    }
    if eta.is_zero() || !eta.is_monic() {
        return Err(Error::IllegalGenerator(format!("inverse of {eta} needs a monic polynomial")));
    }
    for g in irreducible_factors(eta)? {
        if config.value(&g) == Val::Inf {
            return Err(Error::IllegalGenerator(format!("factor {g} of {eta} has infinite value")));
        }
    }
    Ok(())
}

impl RingElem {
    fn from_full(config: &KernelConfiguration, full: Full) -> RingElem {
        full.canonical(config)
    }

    fn full(&self) -> Full {
        let comps = kernel_keys(&self.config)
            .into_iter()
            .map(|f| {
                let c = match (self.ker.get(&f), &self.im) {
                    (Some(c), _) => c.clone(),
                    (None, Some((rho, eta))) => induced(&self.config, &f, rho, eta),
                    (None, None) => Poly::zero(f.field()),
                };
                (f, c)
            })
            .collect();
        Full { im: self.im.clone(), comps }
    }

    fn uniform(config: &KernelConfiguration, im: Option<(Poly, Poly)>, comp: impl Fn(&Poly) -> Poly) -> RingElem {
        let im = if config.is_transcendental() { im } else { None };
        let comps = kernel_keys(config).into_iter().map(|f| (f.clone(), comp(&f))).collect();
        RingElem::from_full(config, Full { im, comps })
    }

    pub fn config(&self) -> &KernelConfiguration {
        &self.config
    }

    pub fn im_part(&self) -> Option<&(Poly, Poly)> {
        self.im.as_ref()
    }

    pub fn ker_parts(&self) -> &BTreeMap<Poly, Poly> {
        &self.ker
    }

    /// Builds a canonical element from raw parts; kernel keys must have `0 < C(f) < ∞`.
    pub fn from_parts(
        config: &KernelConfiguration,
        im: Option<(Poly, Poly)>,
        ker: BTreeMap<Poly, Poly>,
    ) -> Result<RingElem> {
        let field = config.field();
        if im.is_some() != config.is_transcendental() {
            return Err(Error::IllegalGenerator("image part present iff the configuration is transcendental".into()));
        }
        let keys: BTreeSet<Poly> = ker.keys().cloned().collect();
        check_projection_set(config, &keys)?;
        let im = match im {
            Some((rho, eta)) => {
                check_denominator(config, &eta)?;
                if rho.field() != field {
                    return Err(Error::FieldMismatch(field.to_string(), rho.field().to_string()));
                }
                Some(reduce_fraction(&rho, &eta))
            }
            None => None,
        };
        let base = RingElem { config: config.clone(), im, ker: BTreeMap::new() };
        let mut full = base.full();
        for (f, c) in ker {
            let m = modulus(config, &f);
            full.comps.insert(f, c.rem(&m));
        }
        Ok(RingElem::from_full(config, full))
    }

    pub fn zero(config: &KernelConfiguration) -> RingElem {
        let field = config.field();
        RingElem::uniform(config, Some((Poly::zero(field), Poly::one(field))), |f| Poly::zero(f.field()))
    }

    pub fn one(config: &KernelConfiguration) -> RingElem {
        let field = config.field();
        RingElem::uniform(config, Some((Poly::one(field), Poly::one(field))), |f| Poly::one(f.field()))
    }

    pub fn from_generator(config: &KernelConfiguration, g: &Generator) -> Result<RingElem> {
        let field = config.field();
        match g {
            Generator::Rho(rho) => {
                if rho.field() != field {
                    return Err(Error::FieldMismatch(field.to_string(), rho.field().to_string()));
                }
                Ok(RingElem::uniform(config, Some((rho.clone(), Poly::one(field))), |f| rho.rem(&modulus(config, f))))
            }
            Generator::ProjIm(fs) => {
                check_projection_set(config, fs)?;
                let one = Poly::one(field);
                Ok(RingElem::uniform(config, Some((one.clone(), one)), |f| {
                    if fs.contains(f) { Poly::zero(field) } else { Poly::one(field) }
                }))
            }
            Generator::ProjKer(fs) => {
                check_projection_set(config, fs)?;
                Ok(RingElem::uniform(config, Some((Poly::zero(field), Poly::one(field))), |f| {
                    if fs.contains(f) { Poly::one(field) } else { Poly::zero(field) }
                }))
            }
            Generator::Inv(eta) => {
                check_denominator(config, eta)?;
                let one = Poly::one(field);
                Ok(RingElem::uniform(config, Some(reduce_fraction(&one, eta)), |f| induced(config, f, &one, eta)))
            }
        }
    }

    fn same_ring(&self, other: &RingElem) -> Result<()> {
        if self.config != other.config {
            return Err(Error::ConfigMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &RingElem) -> Result<RingElem> {
        self.same_ring(other)?;
        let full = self.full().zip(
            &other.full(),
            &self.config,
            |(r1, e1), (r2, e2)| reduce_fraction(&(&(r1 * e2) + &(r2 * e1)), &(e1 * e2)),
            |a, b, m| (a + b).rem(m),
        );
        Ok(RingElem::from_full(&self.config, full))
    }

    pub fn neg(&self) -> RingElem {
        let field = self.config.field();
        let minus = Poly::constant(-&field.one());
        RingElem {
            config: self.config.clone(),
            im: self.im.as_ref().map(|(r, e)| (r * &minus, e.clone())),
            ker: self.ker.iter().map(|(f, c)| (f.clone(), c * &minus)).collect(),
        }
    }

    pub fn sub(&self, other: &RingElem) -> Result<RingElem> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RingElem) -> Result<RingElem> {
        self.same_ring(other)?;
        let full = self.full().zip(
            &other.full(),
            &self.config,
            |(r1, e1), (r2, e2)| reduce_fraction(&(r1 * r2), &(e1 * e2)),
            |a, b, m| a.mulmod(b, m),
        );
        Ok(RingElem::from_full(&self.config, full))
    }

    /// The unique `ρ` with `deg ρ < deg f^C` and `r ∘ π_Ker(f^C) = ρ[θ] ∘ π_Ker(f^C)`.
    pub fn kernel_component(&self, f: &Poly) -> Result<Poly> {
        if !kernel_keys(&self.config).contains(f) {
            return Err(Error::Precondition(format!("{f} does not have a finite positive value")));
        }
        Ok(self.full().comps.remove(f).expect("component for every kernel key"))
    }

    /// `ρ(θ)·η(θ)^{-1}·π_Im(F^C) + Σ ρ_f(θ)·π_Ker(f^C)` with `F` the stored keys.
    pub fn eval_on_model(&self, m: &EndoModel) -> Result<Matrix> {
        if m.field() != self.config.field() {
            return Err(Error::FieldMismatch(self.config.field().to_string(), m.field().to_string()));
        }
        if !m.is_c_endomorphism(&self.config)? {
            return Err(Error::NotImageComplete);
        }
        let n = m.dim();
        let mut acc = Matrix::zero(m.field(), n, n);
        let keys: BTreeSet<Poly> = self.ker.keys().cloned().collect();
        for (f, c) in &self.ker {
            let single: BTreeSet<Poly> = [f.clone()].into();
            acc = acc.add(&m.poly_apply(c)?.mul(&m.proj_ker(&single, &self.config)?));
        }
        if let Some((rho, eta)) = &self.im {
            let t = m.poly_apply(rho)?.mul(&m.inv_eta(eta, &self.config)?).mul(&m.proj_im(&keys, &self.config)?);
            acc = acc.add(&t);
        }
        Ok(acc)
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some((rho, eta)) = &self.im {
            parts.push(format!("({rho})/({eta})·π_Im"));
        }
        for (g, c) in &self.ker {
            parts.push(format!("({c})·π_Ker({g})"));
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        write!(f, "{}", parts.join(" + "))
    }
}

pub fn canonicalize(config: &KernelConfiguration, e: &Expr) -> Result<RingElem> {
    match e {
        Expr::Gen(g) => RingElem::from_generator(config, g),
        Expr::Add(args) => {
            let mut acc = RingElem::zero(config);
            for a in args {
                acc = acc.add(&canonicalize(config, a)?)?;
            }
            Ok(acc)
        }
        Expr::Mul(args) => {
            let mut acc = RingElem::one(config);
            for a in args {
                acc = acc.mul(&canonicalize(config, a)?)?;
            }
            Ok(acc)
        }
    }
}

/// `χ₁, χ₂` with `1 = χ₁·η + χ₂·ζ` and `deg χ₁ < deg ζ`.
pub fn inverse_identity(zeta: &Poly, eta: &Poly) -> Result<(Poly, Poly)> {
    if zeta.is_zero() || eta.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !zeta.gcd(eta).is_one() {
        return Err(Error::NotCoprime);
    }
    let chi1 = eta.inv_mod(zeta).ok_or(Error::NotCoprime)?;
    let rest = &Poly::one(zeta.field()) - &(&chi1 * eta);
    let chi2 = rest.div_exact(zeta);
    Ok((chi1, chi2))
}

/// `R_C ≅ R_{C'} ⊕ ⊕_{f∈F} K[X]/(f^C)` where `C'` zeroes the values on `F`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoSplit {
    pub full: KernelConfiguration,
    /// `None` when `C'` would be algebraic with empty support (the zero ring).
    pub reduced: Option<KernelConfiguration>,
    pub split: Vec<Poly>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitElem {
    pub rest: Option<RingElem>,
    pub parts: Vec<Poly>,
}

pub fn iso_split(c: &KernelConfiguration, fs: &BTreeSet<Poly>) -> Result<IsoSplit> {
    check_projection_set(c, fs)?;
    let field = c.field();
    let reduced = if c.is_algebraic() {
        let rest: Vec<(Poly, u32)> = c
            .exceptions()
            .iter()
            .filter(|(f, _)| !fs.contains(*f))
            .filter_map(|(f, v)| v.finite().map(|n| (f.clone(), n)))
            .collect();
        if rest.is_empty() {
            None
        } else {
            Some(KernelConfiguration::algebraic(field, rest)?)
        }
    } else {
        let ex = c
            .exceptions()
            .iter()
            .map(|(f, v)| (f.clone(), if fs.contains(f) { Val::Fin(0) } else { *v }))
            .chain(fs.iter().map(|f| (f.clone(), Val::Fin(0))).filter(|(f, _)| !c.exceptions().contains_key(f)));
        Some(KernelConfiguration::transcendental(field, c.default_value(), ex)?)
    };
    Ok(IsoSplit { full: c.clone(), reduced, split: fs.iter().cloned().collect() })
}

impl IsoSplit {
    pub fn forward(&self, r: &RingElem) -> Result<SplitElem> {
        if r.config != self.full {
            return Err(Error::ConfigMismatch);
        }
        let mut full = r.full();
        let parts = self.split.iter().map(|f| full.comps.remove(f).expect("split key present")).collect();
        let rest = self.reduced.as_ref().map(|c2| RingElem::from_full(c2, full));
        Ok(SplitElem { rest, parts })
    }

    pub fn backward(&self, s: &SplitElem) -> Result<RingElem> {
        if s.parts.len() != self.split.len() {
            return Err(Error::Dimension(format!("expected {} components", self.split.len())));
        }
        let mut full = match (&self.reduced, &s.rest) {
            (Some(c2), Some(r)) => {
                if r.config != *c2 {
                    return Err(Error::ConfigMismatch);
                }
                r.full()
            }
            (None, None) => Full { im: None, comps: BTreeMap::new() },
            _ => return Err(Error::ConfigMismatch),
        };
        for (f, p) in self.split.iter().zip(&s.parts) {
            full.comps.insert(f.clone(), p.rem(&modulus(&self.full, f)));
        }
        Ok(RingElem::from_full(&self.full, full))
    }
}
