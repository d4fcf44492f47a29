//! Laurent polynomials over cyclotomic scalars, and fractions whose
//! non-monomial denominators are kept as a list of normalized factors.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::arith::{CycloNumber, Ring};
use crate::chargroup::GroupChar;
use crate::reps::ArtinRep;

use super::SymError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Motive {
    /// The CM elliptic curve E = Ind psi-bar.
    E,
    /// M(f), attached to Ind psi.
    Mf,
    /// M(f)^dual, attached to Ind psi-bar.
    MfDual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gross {
    PsiBar,
    Psi,
    PsiInv,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LSym {
    Artin { motive: Motive, rho: ArtinRep, s: i64, imprimitive: bool },
    Hecke { gr: Gross, chi: GroupChar, s: i64, imprimitive: bool },
}

/// Formal indeterminates. Character-valued atoms always carry the
/// representative at the prime P (values at P-bar are transported by c).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    OmegaPlus,
    OmegaMinus,
    OmegaInf,
    OmegaP,
    TwoPi,
    U,
    W,
    P,
    EpsF,
    /// chi(Frob_P) for chi unramified at P.
    Frob(GroupChar),
    /// e_P(chi).
    Eps(GroupChar),
    /// e_p(rho), before splitting over the two places.
    EpsRep(ArtinRep),
    /// Product of the local constants of psi chi-bar omega_{1-j} away from p.
    EpsAway(GroupChar, i64),
    /// Prime-to-p local constant attached to a character of Delta.
    EpsTheta(String),
    L(LSym),
    Opaque(String),
}

impl Atom {
    /// Atoms declared to be local units.
    pub fn is_declared_unit(&self) -> bool {
        matches!(
            self,
            Atom::OmegaPlus
                | Atom::OmegaMinus
                | Atom::OmegaInf
                | Atom::OmegaP
                | Atom::TwoPi
                | Atom::U
                | Atom::EpsF
                | Atom::Frob(_)
                | Atom::EpsTheta(_)
        )
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::OmegaPlus => write!(f, "Omega+"),
            Atom::OmegaMinus => write!(f, "Omega-"),
            Atom::OmegaInf => write!(f, "Omega_inf"),
            Atom::OmegaP => write!(f, "Omega_p"),
            Atom::TwoPi => write!(f, "2pi"),
            Atom::U => write!(f, "u"),
            Atom::W => write!(f, "w"),
            Atom::P => write!(f, "p"),
            Atom::EpsF => write!(f, "eps_f(p)"),
            Atom::Frob(c) => write!(f, "Frob_P[{c}]"),
            Atom::Eps(c) => write!(f, "e_P[{c}]"),
            Atom::EpsRep(r) => write!(f, "e_p[{r}]"),
            Atom::EpsAway(c, j) => write!(f, "e_away[{c};j={j}]"),
            Atom::EpsTheta(s) => write!(f, "e_theta[{s}]"),
            Atom::L(l) => write!(f, "{l}"),
            Atom::Opaque(s) => write!(f, "{s}"),
        }
    }
}

impl fmt::Display for LSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = |imp: &bool| if *imp { "_{p}" } else { "" };
        match self {
            LSym::Artin { motive, rho, s, imprimitive } => {
                let m = match motive {
                    Motive::E => "E",
                    Motive::Mf => "M(f)",
                    Motive::MfDual => "M(f)^v",
                };
                write!(f, "L{}({m}, {rho}, {s})", tag(imprimitive))
            }
            LSym::Hecke { gr, chi, s, imprimitive } => {
                let g = match gr {
                    Gross::PsiBar => "psibar",
                    Gross::Psi => "psi",
                    Gross::PsiInv => "psi^-1",
                };
                write!(f, "L{}({g}*{chi}, {s})", tag(imprimitive))
            }
        }
    }
}

pub type Mono = BTreeMap<Atom, i64>;

fn mono_mul(a: &Mono, b: &Mono) -> Mono {
    let mut r = a.clone();
    for (k, e) in b {
        let x = r.entry(k.clone()).or_insert(0);
        *x += e;
        if *x == 0 {
            r.remove(k);
        }
    }
    r
}

fn mono_inv(a: &Mono) -> Mono {
    a.iter().map(|(k, e)| (k.clone(), -e)).collect()
}

/// Lexicographic order with the smallest atom most significant.
fn lex_cmp(a: &Mono, b: &Mono) -> Ordering {
    let keys: BTreeSet<&Atom> = a.keys().chain(b.keys()).collect();
    for k in keys {
        let x = a.get(k).copied().unwrap_or(0);
        let y = b.get(k).copied().unwrap_or(0);
        if x != y {
            return x.cmp(&y);
        }
    }
    Ordering::Equal
}

fn mono_divides(a: &Mono, b: &Mono) -> bool {
    a.iter().all(|(k, e)| b.get(k).copied().unwrap_or(0) >= *e)
}

fn mono_text(m: &Mono) -> String {
    m.iter()
        .map(|(a, e)| if *e == 1 { a.to_string() } else { format!("{a}^{e}") })
        .collect::<Vec<_>>()
        .join("*")
}

fn coeff_text(c: &CycloNumber) -> String {
    let t = c.to_string();
    if t.contains(" + ") {
        format!("({t})")
    } else {
        t
    }
}

/// Laurent polynomial; zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Poly {
    terms: BTreeMap<Mono, CycloNumber>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: CycloNumber) -> Self {
        Self::term(Mono::new(), c)
    }

    pub fn term(m: Mono, c: CycloNumber) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn terms(&self) -> &BTreeMap<Mono, CycloNumber> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn single(&self) -> Option<(&Mono, &CycloNumber)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    fn add_term(&mut self, m: Mono, c: CycloNumber) {
        match self.terms.get_mut(&m) {
            Some(x) => {
                *x = Ring::add(x, &c);
                if x.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                if !c.is_zero() {
                    self.terms.insert(m, c);
                }
            }
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.clone(), c.clone());
        }
        r
    }

    pub fn neg(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), CycloNumber::neg(c))).collect() }
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut r = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                r.add_term(mono_mul(m1, m2), Ring::mul(c1, c2));
            }
        }
        r
    }

    pub fn mul_term(&self, m: &Mono, c: &CycloNumber) -> Poly {
        let mut r = Poly::zero();
        for (m1, c1) in &self.terms {
            r.add_term(mono_mul(m1, m), Ring::mul(c1, c));
        }
        r
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut r = Poly::constant(CycloNumber::one());
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        self.terms.keys().flat_map(|m| m.keys().cloned()).collect()
    }

    /// Componentwise minimum of the exponents (absent atoms count as 0).
    fn min_mono(&self) -> Mono {
        let atoms = self.atoms();
        let mut r = Mono::new();
        for a in atoms {
            let e = self.terms.keys().map(|m| m.get(&a).copied().unwrap_or(0)).min().unwrap_or(0);
            if e != 0 {
                r.insert(a, e);
            }
        }
        r
    }

    fn lead(&self) -> Option<(&Mono, &CycloNumber)> {
        self.terms.iter().max_by(|a, b| lex_cmp(a.0, b.0))
    }

    /// Writes a non-monomial poly as c * m * g with g a monic polynomial
    /// without monomial content.
    pub fn normalize(&self) -> (CycloNumber, Mono, Poly) {
        let m = self.min_mono();
        let g0 = self.mul_term(&mono_inv(&m), &CycloNumber::one());
        let c = g0.lead().map(|(_, c)| c.clone()).unwrap_or_else(CycloNumber::one);
        let ci = c.try_inv().expect("leading coefficient is nonzero");
        (c, m, g0.mul_term(&Mono::new(), &ci))
    }

    /// Exact quotient by a normalized factor, if it divides.
    pub fn div_exact(&self, g: &Poly) -> Option<Poly> {
        if self.is_zero() {
            return Some(Poly::zero());
        }
        let shift = self.min_mono();
        let mut r = self.mul_term(&mono_inv(&shift), &CycloNumber::one());
        let (gm, gc) = {
            let (m, c) = g.lead()?;
            (m.clone(), c.clone())
        };
        let gci = gc.try_inv().ok()?;
        let mut q = Poly::zero();
        while let Some((rm, rc)) = r.lead().map(|(m, c)| (m.clone(), c.clone())) {
            if !mono_divides(&gm, &rm) {
                return None;
            }
            let tm = mono_mul(&rm, &mono_inv(&gm));
            let tc = Ring::mul(&rc, &gci);
            r = r.add(&g.mul_term(&tm, &tc).neg());
            q.add_term(tm, tc);
        }
        Some(q.mul_term(&shift, &CycloNumber::one()))
    }

    pub fn to_text(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut ts: Vec<_> = self.terms.iter().collect();
        ts.sort_by(|a, b| lex_cmp(b.0, a.0));
        ts.iter()
            .map(|(m, c)| {
                if m.is_empty() {
                    coeff_text(c)
                } else if **c == CycloNumber::one() {
                    mono_text(m)
                } else if **c == CycloNumber::from_int(-1) {
                    format!("-{}", mono_text(m))
                } else {
                    format!("{}*{}", coeff_text(c), mono_text(m))
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// num * prod g_i^{e_i}; each g_i is a normalized non-monomial polynomial.
/// Factors with negative exponent never divide `num`.
#[derive(Clone, Debug)]
pub struct SymExpr {
    num: Poly,
    factors: Vec<(Poly, i32)>,
}

impl SymExpr {
    pub fn zero() -> Self {
        SymExpr { num: Poly::zero(), factors: Vec::new() }
    }

    pub fn one() -> Self {
        Self::cyclo(CycloNumber::one())
    }

    pub fn int(n: i64) -> Self {
        Self::cyclo(CycloNumber::from_int(n))
    }

    pub fn rational(n: i64, d: i64) -> Self {
        Self::cyclo(CycloNumber::from_rational(&BigRational::new(BigInt::from(n), BigInt::from(d))))
    }

    pub fn cyclo(c: CycloNumber) -> Self {
        SymExpr { num: Poly::constant(c), factors: Vec::new() }
    }

    /// iUnit, modelled as zeta_4.
    pub fn i_unit() -> Self {
        Self::cyclo(CycloNumber::root(4, 1))
    }

    pub fn atom(a: Atom) -> Self {
        Self::mono(&[(a, 1)])
    }

    pub fn mono(parts: &[(Atom, i64)]) -> Self {
        let mut m = Mono::new();
        for (a, e) in parts {
            if *e != 0 {
                m.insert(a.clone(), *e);
            }
        }
        SymExpr { num: Poly::term(m, CycloNumber::one()), factors: Vec::new() }
    }

    pub fn from_poly(p: Poly) -> Self {
        SymExpr { num: p, factors: Vec::new() }
    }

    /// Like `from_poly`, but a non-monomial poly is kept as a separate factor.
    pub fn factored(p: Poly) -> Self {
        if p.terms.len() <= 1 {
            return Self::from_poly(p);
        }
        let (c, m, g) = p.normalize();
        SymExpr { num: Poly::term(m, c), factors: vec![(g, 1)] }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn factors(&self) -> &[(Poly, i32)] {
        &self.factors
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty() && self.num == Poly::constant(CycloNumber::one())
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut s = self.num.atoms();
        for (g, _) in &self.factors {
            s.extend(g.atoms());
        }
        s
    }

    fn push_factor(factors: &mut Vec<(Poly, i32)>, g: Poly, e: i32) {
        if let Some(slot) = factors.iter_mut().find(|(h, _)| *h == g) {
            slot.1 += e;
        } else {
            factors.push((g, e));
        }
        factors.retain(|(_, e)| *e != 0);
    }

    fn fix(mut self) -> Self {
        if self.num.is_zero() {
            self.factors.clear();
            return self;
        }
        let mut out: Vec<(Poly, i32)> = Vec::new();
        for (g, mut e) in std::mem::take(&mut self.factors) {
            while e < 0 {
                match self.num.div_exact(&g) {
                    Some(q) => {
                        self.num = q;
                        e += 1;
                    }
                    None => break,
                }
            }
            if e != 0 {
                Self::push_factor(&mut out, g, e);
            }
        }
        out.sort_by_key(|(g, _)| g.to_text());
        self.factors = out;
        self
    }

    pub fn mul(&self, o: &SymExpr) -> SymExpr {
        let mut factors = self.factors.clone();
        for (g, e) in &o.factors {
            Self::push_factor(&mut factors, g.clone(), *e);
        }
        SymExpr { num: self.num.mul(&o.num), factors }.fix()
    }

    pub fn try_inv(&self) -> Result<SymExpr, SymError> {
        if self.num.is_zero() {
            return Err(SymError::Vanishing(self.to_text()));
        }
        let mut factors: Vec<(Poly, i32)> = self.factors.iter().map(|(g, e)| (g.clone(), -e)).collect();
        let num = match self.num.single() {
            Some((m, c)) => Poly::term(mono_inv(m), c.try_inv().map_err(|e| SymError::Arith(e.to_string()))?),
            None => {
                let (c, m, g) = self.num.normalize();
                Self::push_factor(&mut factors, g, -1);
                Poly::term(mono_inv(&m), c.try_inv().map_err(|e| SymError::Arith(e.to_string()))?)
            }
        };
        // positive factors have to be multiplied out against the new denominators
        Ok(SymExpr { num, factors }.fix())
    }

    pub fn try_div(&self, o: &SymExpr) -> Result<SymExpr, SymError> {
        Ok(self.mul(&o.try_inv()?))
    }

    pub fn neg(&self) -> SymExpr {
        SymExpr { num: self.num.neg(), factors: self.factors.clone() }
    }

    pub fn add(&self, o: &SymExpr) -> SymExpr {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let mut keys: Vec<Poly> = Vec::new();
        for (g, _) in self.factors.iter().chain(&o.factors) {
            if !keys.contains(g) {
                keys.push(g.clone());
            }
        }
        let exp = |x: &SymExpr, g: &Poly| x.factors.iter().find(|(h, _)| h == g).map(|(_, e)| *e).unwrap_or(0);
        let mut den = Vec::new();
        let mut a = self.num.clone();
        let mut b = o.num.clone();
        for g in keys {
            let (ea, eb) = (exp(self, &g), exp(o, &g));
            let d = (-ea).max(-eb).max(0);
            a = a.mul(&g.pow((ea + d) as u32));
            b = b.mul(&g.pow((eb + d) as u32));
            if d > 0 {
                den.push((g, -d));
            }
        }
        SymExpr { num: a.add(&b), factors: den }.fix()
    }

    pub fn sub(&self, o: &SymExpr) -> SymExpr {
        self.add(&o.neg())
    }

    pub fn pow_i(&self, e: i64) -> Result<SymExpr, SymError> {
        let base = if e < 0 { self.try_inv()? } else { self.clone() };
        let mut r = SymExpr::one();
        for _ in 0..e.unsigned_abs() {
            r = r.mul(&base);
        }
        Ok(r)
    }

    pub fn equals(&self, o: &SymExpr) -> bool {
        self.sub(o).is_zero()
    }

    /// The expression as a single coefficient times a Laurent monomial.
    pub fn as_monomial(&self) -> Option<(Mono, CycloNumber)> {
        if !self.factors.is_empty() {
            return None;
        }
        self.num.single().map(|(m, c)| (m.clone(), c.clone()))
    }

    pub fn as_cyclo(&self) -> Option<CycloNumber> {
        match self.as_monomial() {
            Some((m, c)) if m.is_empty() => Some(c),
            _ => None,
        }
    }

    /// Replaces atoms by expressions; `f` returns `None` for atoms kept as is.
    pub fn map_atoms(&self, f: &mut dyn FnMut(&Atom) -> Result<Option<SymExpr>, SymError>) -> Result<SymExpr, SymError> {
        let mut cache: BTreeMap<Atom, Option<SymExpr>> = BTreeMap::new();
        let mut subst_poly = |p: &Poly| -> Result<SymExpr, SymError> {
            let mut acc = SymExpr::zero();
            for (m, c) in &p.terms {
                let mut t = SymExpr::cyclo(c.clone());
                for (a, e) in m {
                    if !cache.contains_key(a) {
                        cache.insert(a.clone(), f(a)?);
                    }
                    let part = match &cache[a] {
                        Some(x) => x.pow_i(*e)?,
                        None => SymExpr::mono(&[(a.clone(), *e)]),
                    };
                    t = t.mul(&part);
                }
                acc = acc.add(&t);
            }
            Ok(acc)
        };
        let mut r = subst_poly(&self.num)?;
        for (g, e) in &self.factors {
            let mut x = subst_poly(g)?;
            if x.factors.is_empty() {
                x = SymExpr::factored(x.num);
            }
            r = r.mul(&x.pow_i(*e as i64)?);
        }
        Ok(r)
    }

    /// Numerical value; `leaf` evaluates atoms and `coeff` embeds scalars.
    pub fn eval<R: Ring>(
        &self,
        proto: &R,
        leaf: &mut dyn FnMut(&Atom) -> Result<R, SymError>,
        coeff: &dyn Fn(&CycloNumber) -> Result<R, SymError>,
    ) -> Result<R, SymError> {
        let mut cache: BTreeMap<Atom, R> = BTreeMap::new();
        let mut poly_val = |p: &Poly| -> Result<R, SymError> {
            let mut acc = proto.zero_like();
            for (m, c) in &p.terms {
                let mut t = coeff(c)?;
                for (a, e) in m {
                    if !cache.contains_key(a) {
                        let v = leaf(a)?;
                        cache.insert(a.clone(), v);
                    }
                    let v = cache[a].pow_i(*e).ok_or_else(|| SymError::Vanishing(a.to_string()))?;
                    t = t.mul(&v);
                }
                acc = acc.add(&t);
            }
            Ok(acc)
        };
        let mut r = poly_val(&self.num)?;
        for (g, e) in &self.factors {
            let v = poly_val(g)?;
            if v.is_zero() {
                return Err(SymError::Vanishing(g.to_text()));
            }
            r = r.mul(&v.pow_i(*e as i64).ok_or_else(|| SymError::Vanishing(g.to_text()))?);
        }
        Ok(r)
    }

    /// alpha^a tau^b with alpha = Omega+/Omega_inf and tau = Omega-/Omega+.
    pub fn as_period_unit(&self) -> Option<(i64, i64)> {
        let (m, c) = self.as_monomial()?;
        if c != CycloNumber::one() {
            return None;
        }
        let get = |a: &Atom| m.get(a).copied().unwrap_or(0);
        if m.keys().any(|a| !matches!(a, Atom::OmegaPlus | Atom::OmegaMinus | Atom::OmegaInf)) {
            return None;
        }
        let a = -get(&Atom::OmegaInf);
        let b = get(&Atom::OmegaMinus);
        (get(&Atom::OmegaPlus) == a - b).then_some((a, b))
    }

    pub fn to_text(&self) -> String {
        if let Some((a, b)) = self.as_period_unit() {
            if (a, b) != (0, 0) {
                let pa = match a {
                    1 => "alpha".to_string(),
                    _ => format!("alpha^{a}"),
                };
                return match b {
                    0 => pa,
                    1 => format!("{pa}*tau"),
                    _ => format!("{pa}*tau^{b}"),
                };
            }
        }
        let mut s = self.num.to_text();
        if self.num.terms.len() > 1 && !self.factors.is_empty() {
            s = format!("({s})");
        }
        for (g, e) in &self.factors {
            s.push_str(&format!(" * ({})^{}", g.to_text(), e));
        }
        s
    }
}

impl PartialEq for SymExpr {
    fn eq(&self, o: &Self) -> bool {
        self.equals(o)
    }
}

impl fmt::Display for SymExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

fn rational_unit_at(q: &BigRational, p: u64) -> bool {
    let p = BigInt::from(p);
    !q.is_zero() && !(q.numer() % &p).is_zero() && !(q.denom() % &p).is_zero()
}

impl Ring for SymExpr {
    fn zero_like(&self) -> Self {
        SymExpr::zero()
    }
    fn one_like(&self) -> Self {
        SymExpr::one()
    }
    fn add(&self, o: &Self) -> Self {
        SymExpr::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        SymExpr::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        SymExpr::mul(self, o)
    }
    fn neg(&self) -> Self {
        SymExpr::neg(self)
    }
    fn is_zero(&self) -> bool {
        SymExpr::is_zero(self)
    }
    fn inv(&self) -> Option<Self> {
        self.try_inv().ok()
    }
    fn from_rational(&self, q: &BigRational) -> Option<Self> {
        Some(SymExpr::cyclo(CycloNumber::from_rational(q)))
    }
    fn root_of_unity(&self, order: u64, exp: i64) -> Option<Self> {
        Some(SymExpr::cyclo(CycloNumber::root(order, exp)))
    }
    /// Decidable for monomials in the declared unit symbols with a
    /// rational coefficient (or a root of unity times one).
    fn local_unit(&self, p: u64) -> Result<bool, String> {
        if self.is_zero() {
            return Ok(false);
        }
        let (m, c) = self.as_monomial().ok_or_else(|| format!("{} is not a monomial", self.to_text()))?;
        if let Some(bad) = m.keys().find(|a| !a.is_declared_unit()) {
            return if *bad == Atom::P { Ok(false) } else { Err(format!("{bad} is not a declared unit")) };
        }
        if let Some(q) = c.as_rational() {
            return Ok(rational_unit_at(&q, p));
        }
        // c = q * zeta: c^m is rational for m the conductor
        let n = c.conductor();
        match c.pow(n).as_rational() {
            Some(q) if q.is_positive() || q.is_negative() => Ok(rational_unit_at(&q, p)),
            _ => Err(format!("cannot decide whether {c} is a unit")),
        }
    }
    fn ring_tag(&self) -> String {
        "sym".into()
    }
    fn to_text(&self) -> String {
        SymExpr::to_text(self)
    }
}

impl From<i64> for SymExpr {
    fn from(n: i64) -> Self {
        SymExpr::int(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> SymExpr {
        SymExpr::atom(Atom::U)
    }

    fn y() -> SymExpr {
        SymExpr::atom(Atom::P)
    }

    #[test]
    fn cancels_factors() {
        // (1 - u^-1)/(1 - u^-1) and (u^2 - 1)/(u - 1) = u + 1
        let a = SymExpr::factored(SymExpr::one().sub(&x().try_inv().unwrap()).num().clone());
        assert!(a.try_div(&a).unwrap().is_one());
        let num = x().mul(&x()).sub(&SymExpr::one());
        let q = num.try_div(&x().sub(&SymExpr::one())).unwrap();
        assert_eq!(q.factors().len(), 0);
        assert!(q.equals(&x().add(&SymExpr::one())));
    }

    #[test]
    fn field_laws_on_samples() {
        let a = x().add(&y().mul(&SymExpr::int(3)));
        let b = x().try_inv().unwrap().sub(&SymExpr::i_unit());
        let c = a.try_div(&b).unwrap();
        assert!(c.mul(&b).equals(&a));
        assert!(a.add(&b).sub(&b).equals(&a));
        assert!(c.try_inv().unwrap().mul(&c).is_one());
    }

    #[test]
    fn zero_denominator_is_reported() {
        let z = x().sub(&x());
        assert!(matches!(z.try_inv(), Err(SymError::Vanishing(_))));
    }

    #[test]
    fn period_names() {
        let e = SymExpr::mono(&[(Atom::OmegaPlus, 1), (Atom::OmegaMinus, 1), (Atom::OmegaInf, -2)]);
        assert_eq!(e.to_text(), "alpha^2*tau");
        let e = SymExpr::mono(&[(Atom::OmegaMinus, 1), (Atom::OmegaInf, -1)]);
        assert_eq!(e.to_text(), "alpha*tau");
    }

    #[test]
    fn local_units() {
        assert_eq!(SymExpr::rational(3, 2).local_unit(5), Ok(true));
        assert_eq!(SymExpr::int(10).local_unit(5), Ok(false));
        assert_eq!(x().mul(&SymExpr::i_unit()).local_unit(5), Ok(true));
        assert_eq!(y().local_unit(5), Ok(false));
        assert!(x().add(&SymExpr::one()).local_unit(5).is_err());
    }

    #[test]
    fn map_atoms_substitutes_inside_factors() {
        // w -> p u^-1 in 1/(1 - w^-1)
        let w = SymExpr::atom(Atom::W);
        let e = SymExpr::one().try_div(&SymExpr::one().sub(&w.try_inv().unwrap())).unwrap();
        let r = e
            .map_atoms(&mut |a| Ok((*a == Atom::W).then(|| y().mul(&x().try_inv().unwrap()))))
            .unwrap();
        let direct = SymExpr::one().try_div(&SymExpr::one().sub(&x().try_div(&y()).unwrap())).unwrap();
        assert!(r.equals(&direct));
    }
}
