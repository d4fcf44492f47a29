use std::fmt;

use crate::arith::{CycloNumber, Ring};
use crate::chargroup::{char_table, conductor_exponent, conjugate_char, Elem, FinAbGroup, GroupChar, Place};
use crate::grpring::{Carrier, Measure};
use crate::reps::{rep_invariants, restrict, ArtinRep, Metabelian};

use super::expr::{Atom, Gross, LSym, Motive, SymExpr};
use super::SymError;

type Result<T> = std::result::Result<T, SymError>;

fn mono(parts: &[(Atom, i64)]) -> SymExpr {
    SymExpr::mono(parts)
}

fn factorial(n: i64) -> SymExpr {
    (1..=n).fold(SymExpr::one(), |acc, i| acc.mul(&SymExpr::int(i)))
}

/// Gamma(n), expanded at positive integers only.
pub fn gamma_int(n: i64) -> Result<SymExpr> {
    if n <= 0 {
        return Err(SymError::Pole(n));
    }
    Ok(factorial(n - 1))
}

fn check_kj(k: i64, j: i64) -> Result<()> {
    if k < 2 {
        return Err(SymError::Range(format!("weight k = {k} < 2")));
    }
    if j > 0 {
        return Err(SymError::Range(format!("j = {j} > 0")));
    }
    if k - 1 + j <= 0 {
        return Err(SymError::Pole(k - 1 + j));
    }
    Ok(())
}

/// Gamma_phi(s) = Gamma(s - m) / (2pi)^(s - m), m the smaller infinity type.
fn gamma_phi(s: i64, m: i64) -> Result<SymExpr> {
    Ok(gamma_int(s - m)?.mul(&mono(&[(Atom::TwoPi, -(s - m))])))
}

/// Gamma_psi(1-j) / Gamma_psibar(k-1+j) from the definition, psi of type (k-1, 0).
pub fn gamma_ratio(k: i64, j: i64) -> Result<SymExpr> {
    check_kj(k, j)?;
    let m = 0.min(k - 1);
    gamma_phi(1 - j, m)?.try_div(&gamma_phi(k - 1 + j, m)?)
}

/// Gamma(1-j)/Gamma(k-1+j) (2pi)^(k-2+2j).
pub fn gamma_ratio_closed(k: i64, j: i64) -> Result<SymExpr> {
    check_kj(k, j)?;
    Ok(gamma_int(1 - j)?
        .try_div(&gamma_int(k - 1 + j)?)?
        .mul(&mono(&[(Atom::TwoPi, k - 2 + 2 * j)])))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureVariant {
    /// Elliptic, epsilon factor at P.
    LPrime,
    /// Elliptic, epsilon factor at P-bar.
    L,
    Lcm1,
    Lcm2,
}

impl MeasureVariant {
    pub fn name(self) -> &'static str {
        match self {
            MeasureVariant::LPrime => "L'",
            MeasureVariant::L => "L",
            MeasureVariant::Lcm1 => "p-LCM1",
            MeasureVariant::Lcm2 => "p-LCM2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropVariant {
    /// Value of L' at rho kappa^j against L_{p}(M(f)^v, rho, k-1+j).
    Dual,
    /// Value of the twisted L' against L_{p}(M(f), rho-check, 1-j).
    Twisted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Rule {
    Inductivity,
    EpsilonInductivity,
    Primitive,
    Shift,
    Relation,
    FunctionalEquation,
    AwayFactorization,
}

impl Rule {
    pub const DEFAULT: [Rule; 5] =
        [Rule::Inductivity, Rule::EpsilonInductivity, Rule::Primitive, Rule::Shift, Rule::Relation];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Inductivity => "inductivity",
            Rule::EpsilonInductivity => "epsilon_inductivity",
            Rule::Primitive => "remove_euler_factors",
            Rule::Shift => "shift",
            Rule::Relation => "relation_uw",
            Rule::FunctionalEquation => "functional_equation",
            Rule::AwayFactorization => "away_factorization",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub rule: String,
    pub before: String,
    pub after: String,
}

#[derive(Debug, Clone)]
pub struct Reduction {
    pub value: SymExpr,
    pub trace: Vec<Step>,
}

/// Prime-to-p data of one character theta of Delta.
#[derive(Debug, Clone)]
pub struct ThetaRecord {
    pub theta: GroupChar,
    /// N_K of the prime-to-p conductor times the different.
    pub norm: u64,
    /// The Artin symbol of that ideal, in the complement of Delta.
    pub sigma: Elem,
    pub eps: SymExpr,
}

#[derive(Debug, Clone)]
pub struct ThetaTable {
    pub p: u64,
    pub group: FinAbGroup,
    pub delta_rank: usize,
    pub records: Vec<ThetaRecord>,
}

impl ThetaTable {
    fn split(&self) -> (FinAbGroup, FinAbGroup) {
        let o = self.group.orders();
        let part = |x: &[u64]| if x.is_empty() { FinAbGroup::trivial() } else { FinAbGroup::new(x).unwrap() };
        (part(&o[..self.delta_rank]), part(&o[self.delta_rank..]))
    }

    pub fn record_for(&self, chi: &GroupChar) -> Result<&ThetaRecord> {
        let theta = chi.restrict_coords(0..self.delta_rank);
        self.records
            .iter()
            .find(|r| r.theta == theta)
            .ok_or_else(|| SymError::Missing(format!("theta record for {theta}")))
    }
}

/// Group data and weight for building and reducing formulas.
pub struct Ctx<'a> {
    pub grp: &'a Metabelian,
    pub k: i64,
    /// eps_f(p) = 1 (the elliptic case).
    pub eps_trivial: bool,
    pub thetas: Option<&'a ThetaTable>,
}

impl<'a> Ctx<'a> {
    pub fn elliptic(grp: &'a Metabelian) -> Self {
        Ctx { grp, k: 2, eps_trivial: true, thetas: None }
    }

    pub fn weight(grp: &'a Metabelian, k: i64) -> Self {
        Ctx { grp, k, eps_trivial: false, thetas: None }
    }

    pub fn with_thetas(mut self, t: &'a ThetaTable) -> Self {
        self.thetas = Some(t);
        self
    }

    pub fn conj(&self, chi: &GroupChar) -> GroupChar {
        conjugate_char(chi, &self.grp.c)
    }

    pub fn cond(&self, chi: &GroupChar, place: Place) -> Result<i64> {
        Ok(conductor_exponent(&self.grp.g, chi, place)? as i64)
    }

    fn at_p(&self, chi: &GroupChar, place: Place) -> GroupChar {
        match place {
            Place::P => chi.clone(),
            Place::PBar => self.conj(chi),
        }
    }

    /// chi(Frob_place); the caller checks that chi is unramified there.
    pub fn frob(&self, place: Place, chi: &GroupChar) -> SymExpr {
        let x = self.at_p(chi, place);
        if x.is_trivial() {
            return SymExpr::one();
        }
        let xi = x.inv();
        if xi < x {
            mono(&[(Atom::Frob(xi), -1)])
        } else {
            SymExpr::atom(Atom::Frob(x))
        }
    }

    /// e_place(chi), 1 when unramified.
    pub fn eps(&self, place: Place, chi: &GroupChar) -> Result<SymExpr> {
        if self.cond(chi, place)? == 0 {
            return Ok(SymExpr::one());
        }
        Ok(SymExpr::atom(Atom::Eps(self.at_p(chi, place))))
    }

    /// P_place(chi, X) = 1 - chi(Frob) X, or 1 when chi is ramified.
    pub fn euler(&self, place: Place, chi: &GroupChar, x: &SymExpr) -> Result<SymExpr> {
        if self.cond(chi, place)? > 0 {
            return Ok(SymExpr::one());
        }
        Ok(SymExpr::factored(SymExpr::one().sub(&self.frob(place, chi).mul(x)).num().clone()))
    }

    /// P_p(rho, X): the product of the two place factors for an induced rep,
    /// P_P(rho|_G, X) for a Type A rep.
    pub fn euler_rep(&self, rho: &ArtinRep, x: &SymExpr) -> Result<SymExpr> {
        match rho {
            ArtinRep::TypeA { chi, .. } => self.euler(Place::P, chi, x),
            ArtinRep::Induced { chi, .. } => Ok(self.euler(Place::P, chi, x)?.mul(&self.euler(Place::PBar, chi, x)?)),
        }
    }

    fn eps_rep(&self, rho: &ArtinRep) -> Result<SymExpr> {
        let f = rep_invariants(self.grp, rho)?.f_p.ok_or_else(|| SymError::Missing("inertia data".into()))?;
        Ok(if f == 0 { SymExpr::one() } else { SymExpr::atom(Atom::EpsRep(rho.clone())) })
    }

    fn f_p(&self, rho: &ArtinRep) -> Result<i64> {
        Ok(rep_invariants(self.grp, rho)?.f_p.ok_or_else(|| SymError::Missing("inertia data".into()))? as i64)
    }

    fn periods(&self, rho: &ArtinRep) -> Result<SymExpr> {
        let inv = rep_invariants(self.grp, rho)?;
        Ok(mono(&[(Atom::OmegaPlus, -(inv.d_plus as i64)), (Atom::OmegaMinus, -(inv.d_minus as i64))]))
    }

    fn eps_f(&self) -> SymExpr {
        if self.eps_trivial {
            SymExpr::one()
        } else {
            SymExpr::atom(Atom::EpsF)
        }
    }

    /// Value of the Hecke character gr at the prime above p.
    fn gross_at(&self, gr: Gross, place: Place) -> Result<SymExpr> {
        let k = self.k;
        Ok(match (gr, place) {
            (Gross::PsiBar, Place::P) => mono(&[(Atom::P, k - 1), (Atom::W, -1)]),
            (Gross::PsiBar, Place::PBar) => mono(&[(Atom::P, k - 1), (Atom::U, -1)]),
            (Gross::Psi, Place::P) => SymExpr::atom(Atom::W),
            (Gross::Psi, Place::PBar) => SymExpr::atom(Atom::U),
            (Gross::PsiInv, _) => return Err(SymError::Missing("Euler factor of psi^-1".into())),
        })
    }

    fn hecke(&self, gr: Gross, chi: &GroupChar, s: i64, imprimitive: bool) -> SymExpr {
        SymExpr::atom(Atom::L(LSym::Hecke { gr, chi: chi.clone(), s, imprimitive }))
    }

    /// Right-hand side of the interpolation formula for the elliptic curve
    /// (weight 2) at rho-check, with the L-value imprimitive at p.
    pub fn build_conj2_rhs(&self, rho: &ArtinRep) -> Result<SymExpr> {
        let rc = rho.contragredient();
        let f = self.f_p(&rc)?;
        let l = SymExpr::atom(Atom::L(LSym::Artin { motive: Motive::E, rho: rho.clone(), s: 1, imprimitive: true }));
        let u_inv = mono(&[(Atom::U, -1)]);
        let w_inv = mono(&[(Atom::W, -1)]);
        l.mul(&self.periods(rho)?)
            .mul(&self.eps_rep(&rc)?)
            .mul(&self.euler_rep(&rc, &u_inv)?)
            .try_div(&self.euler_rep(rho, &w_inv)?)
            .map(|x| x.mul(&mono(&[(Atom::U, -f)])))
    }

    /// Interpolated value at a single character, for the selected measure.
    pub fn build_measure_rhs(&self, chi: &GroupChar, variant: MeasureVariant, j: i64) -> Result<SymExpr> {
        let cb = chi.inv();
        let (k, u_inv) = (self.k, mono(&[(Atom::U, -1)]));
        match variant {
            MeasureVariant::LPrime | MeasureVariant::L => {
                if j != 0 || k != 2 {
                    return Err(SymError::Range("the elliptic formulas have k = 2, j = 0".into()));
                }
                let place = if variant == MeasureVariant::LPrime { Place::P } else { Place::PBar };
                let f = self.cond(&cb, place)?;
                Ok(self
                    .hecke(Gross::PsiBar, chi, 1, false)
                    .mul(&mono(&[(Atom::OmegaInf, -1), (Atom::U, -f)]))
                    .mul(&self.eps(place, &cb)?)
                    .mul(&self.euler(Place::P, &cb, &u_inv)?)
                    .mul(&self.euler(Place::PBar, chi, &u_inv)?))
            }
            MeasureVariant::Lcm1 | MeasureVariant::Lcm2 => {
                check_kj(k, j)?;
                let fp = self.cond(&cb, Place::P)?;
                let head = gamma_int(k - 1 + j)?.mul(&mono(&[(Atom::TwoPi, -j), (Atom::OmegaInf, -(k - 1))]));
                let euler = self
                    .euler(Place::P, &cb, &mono(&[(Atom::W, 1), (Atom::P, j - 1)]))?
                    .mul(&self.euler(Place::PBar, chi, &mono(&[(Atom::U, -1), (Atom::P, -j)]))?);
                if variant == MeasureVariant::Lcm1 {
                    Ok(head
                        .mul(&SymExpr::i_unit().pow_i(k - 1 + j)?)
                        .mul(&self.hecke(Gross::PsiBar, chi, k - 1 + j, false))
                        .mul(&self.eps(Place::P, &cb)?)
                        .mul(&euler)
                        .mul(&mono(&[(Atom::W, fp), (Atom::P, -fp + j * fp)])))
                } else {
                    let fpb = self.cond(&cb, Place::PBar)?;
                    Ok(head
                        .mul(&SymExpr::i_unit().pow_i(j)?)
                        .mul(&self.hecke(Gross::Psi, &cb, 1 - j, false))
                        .mul(&self.eps(Place::PBar, chi)?)
                        .mul(&euler)
                        .mul(&mono(&[(Atom::U, -fpb), (Atom::P, -j * fp)]))
                        .mul(&gamma_ratio(k, j)?))
                }
            }
        }
    }

    /// Product of the single-character values over the restriction of rho.
    pub fn assemble_rep(&self, rho: &ArtinRep, variant: MeasureVariant, j: i64) -> Result<SymExpr> {
        restrict(rho)
            .iter()
            .try_fold(SymExpr::one(), |acc, chi| Ok(acc.mul(&self.build_measure_rhs(chi, variant, j)?)))
    }

    /// Right-hand side of the weight-k propositions at rho kappa^j. With
    /// `literal` the powers of i and 2pi are those printed for d(rho) = 2;
    /// otherwise they scale with d(rho) and follow the single-character formulas.
    pub fn build_prop_rhs(&self, rho: &ArtinRep, variant: PropVariant, j: i64, literal: bool) -> Result<SymExpr> {
        let k = self.k;
        check_kj(k, j)?;
        let d = rho.dim() as i64;
        let rc = rho.contragredient();
        let f = self.f_p(&rc)?;
        match variant {
            PropVariant::Dual => {
                let (ipow, tpow) = if literal { (d * j, 2 * (k - 2) + 2 * j) } else { (d * (k - 1 + j), d * (k - 2 + j)) };
                let l = LSym::Artin { motive: Motive::MfDual, rho: rho.clone(), s: k - 1 + j, imprimitive: true };
                gamma_int(k - 1 + j)?
                    .pow_i(d)?
                    .mul(&SymExpr::i_unit().pow_i(ipow)?)
                    .mul(&SymExpr::atom(Atom::L(l)))
                    .mul(&mono(&[(Atom::TwoPi, -tpow)]))
                    .mul(&self.periods(rho)?)
                    .mul(&self.eps_rep(&rc)?)
                    .mul(&self.euler_rep(&rc, &mono(&[(Atom::W, 1), (Atom::P, j - 1)]))?)
                    .try_div(&self.euler_rep(rho, &mono(&[(Atom::W, -1), (Atom::P, -j)]))?)
                    .map(|x| x.mul(&mono(&[(Atom::W, f), (Atom::P, -f + j * f)])))
            }
            PropVariant::Twisted => {
                let tpow = if literal { -2 * j } else { -d * j };
                let l = LSym::Artin { motive: Motive::Mf, rho: rc.clone(), s: 1 - j, imprimitive: true };
                gamma_int(1 - j)?
                    .pow_i(d)?
                    .mul(&SymExpr::i_unit().pow_i(d * j)?)
                    .mul(&SymExpr::atom(Atom::L(l)))
                    .mul(&mono(&[(Atom::TwoPi, -tpow)]))
                    .mul(&self.periods(rho)?)
                    .mul(&self.eps_rep(rho)?)
                    .mul(&self.euler_rep(rho, &mono(&[(Atom::U, -1), (Atom::P, -j)]))?)
                    .try_div(&self.euler_rep(&rc, &mono(&[(Atom::U, 1), (Atom::P, j - 1)]))?)
                    .map(|x| x.mul(&mono(&[(Atom::U, -f), (Atom::P, -j * f)])))
            }
        }
    }

    fn rewrite(&self, rule: Rule, a: &Atom) -> Result<Option<SymExpr>> {
        let k = self.k;
        match (rule, a) {
            (Rule::Inductivity, Atom::L(LSym::Artin { motive, rho, s, imprimitive })) => {
                let gr = if *motive == Motive::Mf { Gross::Psi } else { Gross::PsiBar };
                let v = restrict(rho)
                    .iter()
                    .fold(SymExpr::one(), |acc, chi| acc.mul(&self.hecke(gr, chi, *s, *imprimitive)));
                Ok(Some(v))
            }
            (Rule::EpsilonInductivity, Atom::EpsRep(rho)) => Ok(Some(match rho {
                ArtinRep::TypeA { chi, .. } => self.eps(Place::PBar, chi)?,
                ArtinRep::Induced { chi, .. } => self.eps(Place::P, chi)?.mul(&self.eps(Place::PBar, chi)?),
            })),
            (Rule::Primitive, Atom::L(LSym::Hecke { gr, chi, s, imprimitive: true })) if *gr != Gross::PsiInv => {
                let mut v = self.hecke(*gr, chi, *s, false);
                for place in [Place::P, Place::PBar] {
                    let x = self.gross_at(*gr, place)?.mul(&mono(&[(Atom::P, -s)]));
                    let e = self.euler(place, chi, &x)?;
                    if e.is_zero() {
                        return Err(SymError::Vanishing(format!("Euler factor of {a} at {place:?}")));
                    }
                    v = v.mul(&e);
                }
                Ok(Some(v))
            }
            (Rule::Shift, Atom::L(LSym::Hecke { gr: Gross::PsiInv, chi, s, imprimitive })) => {
                Ok(Some(self.hecke(Gross::PsiBar, chi, s + k - 1, *imprimitive)))
            }
            (Rule::Relation, Atom::W) => Ok(Some(mono(&[(Atom::P, k - 1), (Atom::U, -1)]).mul(&self.eps_f()))),
            (Rule::FunctionalEquation, Atom::L(LSym::Hecke { gr: Gross::PsiBar, chi, s, imprimitive: false })) => {
                let j = s - (k - 1);
                check_kj(k, j)?;
                let cb = chi.inv();
                let fp = self.cond(&cb, Place::P)?;
                let fpb = self.cond(&cb, Place::PBar)?;
                // local constants of psi chi-bar omega_{1-j} at P and (inverted) at P-bar
                let at_p = self.eps(Place::P, &cb)?.mul(&mono(&[(Atom::W, fp), (Atom::P, -fp + j * fp)]));
                let at_pbar_inv = self.eps(Place::PBar, chi)?.mul(&mono(&[(Atom::U, -fpb), (Atom::P, -j * fp)]));
                let away = SymExpr::atom(Atom::EpsAway(chi.clone(), j));
                let v = gamma_ratio(k, j)?
                    .mul(&self.hecke(Gross::Psi, &cb, 1 - j, false))
                    .mul(&at_pbar_inv)
                    .try_div(&at_p.mul(&away))?;
                Ok(Some(v))
            }
            (Rule::AwayFactorization, Atom::EpsAway(chi, j)) => {
                let t = self.thetas.ok_or_else(|| SymError::Missing("theta records".into()))?;
                let r = t.record_for(chi)?;
                let full: Elem = vec![0; t.delta_rank].into_iter().chain(r.sigma.iter().copied()).collect();
                let chi_sigma = SymExpr::cyclo(chi.value(&full));
                let n = SymExpr::int(r.norm as i64).pow_i(-(1 - j))?;
                Ok(Some(
                    SymExpr::i_unit()
                        .pow_i(k - 1)?
                        .try_div(&chi_sigma)?
                        .mul(&n)
                        .mul(&r.eps),
                ))
            }
            _ => Ok(None),
        }
    }

    /// Applies the rules in order until none fires, recording each step.
    pub fn reduce(&self, x: &SymExpr, rules: &[Rule]) -> Result<Reduction> {
        let mut value = x.clone();
        let mut trace = Vec::new();
        for _ in 0..32 {
            let mut any = false;
            for &rule in rules {
                let mut fired = false;
                let next = value.map_atoms(&mut |a| {
                    let r = self.rewrite(rule, a)?;
                    fired |= r.is_some();
                    Ok(r)
                })?;
                if fired {
                    trace.push(Step { rule: rule.name().into(), before: value.to_text(), after: next.to_text() });
                    value = next;
                    any = true;
                }
            }
            if !any {
                return Ok(Reduction { value, trace });
            }
        }
        Err(SymError::Range("rewriting did not terminate".into()))
    }

    pub fn reduce_ratio(&self, num: &SymExpr, den: &SymExpr, rules: &[Rule]) -> Result<Reduction> {
        let q = num.try_div(den)?;
        let mut r = self.reduce(&q, rules)?;
        r.trace.insert(0, Step { rule: "quotient".into(), before: format!("({num}) / ({den})"), after: q.to_text() });
        Ok(r)
    }

    /// Numerical value of an unreduced expression: compound atoms are
    /// evaluated through their rewrite rules, the rest through `leaf`.
    pub fn eval_numeric<R: Ring>(
        &self,
        x: &SymExpr,
        proto: &R,
        rules: &[Rule],
        leaf: &mut dyn FnMut(&Atom) -> Result<R>,
        coeff: &dyn Fn(&CycloNumber) -> Result<R>,
    ) -> Result<R> {
        let mut f = |a: &Atom| -> Result<R> {
            for &rule in rules {
                if let Some(y) = self.rewrite(rule, a)? {
                    return self.eval_numeric(&y, proto, rules, leaf, coeff);
                }
            }
            leaf(a)
        };
        x.eval(proto, &mut f, coeff)
    }

    /// Expected period unit of the elliptic ratio L(rho-check) / L'_E(rho-check).
    pub fn expected_elliptic_ratio(&self, rho: &ArtinRep) -> SymExpr {
        match rho {
            ArtinRep::Induced { .. } => mono(&[(Atom::OmegaPlus, 1), (Atom::OmegaMinus, 1), (Atom::OmegaInf, -2)]),
            ArtinRep::TypeA { sign, .. } if *sign > 0 => mono(&[(Atom::OmegaPlus, 1), (Atom::OmegaInf, -1)]),
            ArtinRep::TypeA { .. } => mono(&[(Atom::OmegaMinus, 1), (Atom::OmegaInf, -1)]),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RatioReport {
    pub label: String,
    pub rep: ArtinRep,
    pub expected: SymExpr,
    pub value: SymExpr,
    /// value / expected; 1 when the chain closes.
    pub residual: SymExpr,
    pub trace: Vec<Step>,
}

impl RatioReport {
    pub fn ok(&self) -> bool {
        self.residual.is_one()
    }
}

impl fmt::Display for RatioReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}: {} (expected {})", self.label, self.rep, self.value, self.expected)?;
        if !self.ok() {
            write!(f, ", residual {}", self.residual)?;
        }
        Ok(())
    }
}

fn report(label: &str, rho: &ArtinRep, expected: SymExpr, red: Reduction) -> Result<RatioReport> {
    let residual = red.value.try_div(&expected)?;
    Ok(RatioReport { label: label.into(), rep: rho.clone(), expected, value: red.value, residual, trace: red.trace })
}

/// L(rho-check) / L'_E(rho-check) with L from the measure of the given variant.
pub fn elliptic_ratio(ctx: &Ctx<'_>, rho: &ArtinRep, variant: MeasureVariant) -> Result<RatioReport> {
    let num = ctx.assemble_rep(rho, variant, 0)?;
    let den = ctx.build_conj2_rhs(rho)?;
    let red = ctx.reduce_ratio(&num, &den, &Rule::DEFAULT)?;
    report(&format!("ratio[{}]", variant.name()), rho, ctx.expected_elliptic_ratio(rho), red)
}

/// L'_E(rho-check) L_Omega(rho-check) against L(rho-check); the residual is 1 on success.
pub fn elliptic_product_check(ctx: &Ctx<'_>, rho: &ArtinRep, l_omega: &Measure<SymExpr>) -> Result<RatioReport> {
    let lo = l_omega.eval_rep(&rho.contragredient())?;
    let num = ctx.assemble_rep(rho, MeasureVariant::L, 0)?;
    let den = ctx.build_conj2_rhs(rho)?.mul(&lo);
    let red = ctx.reduce_ratio(&num, &den, &Rule::DEFAULT)?;
    report("L'_E * L_Omega / L", rho, SymExpr::one(), red)
}

/// [prod over Res rho of the weight-k measure] / L_Omega(rho) against the
/// proposition's right-hand side.
pub fn prop_ratio(
    ctx: &Ctx<'_>,
    rho: &ArtinRep,
    variant: PropVariant,
    j: i64,
    l_omega: &Measure<SymExpr>,
    literal: bool,
) -> Result<RatioReport> {
    let mv = match variant {
        PropVariant::Dual => MeasureVariant::Lcm1,
        PropVariant::Twisted => MeasureVariant::Lcm2,
    };
    let lo = l_omega.eval_rep(rho)?;
    let num = ctx.assemble_rep(rho, mv, j)?.try_div(&lo)?;
    let den = ctx.build_prop_rhs(rho, variant, j, literal)?;
    let red = ctx.reduce_ratio(&num, &den, &Rule::DEFAULT)?;
    let label = format!("prop[{}{}] k={} j={}", mv.name(), if literal { ", literal" } else { "" }, ctx.k, j);
    report(&label, rho, SymExpr::one(), red)
}

/// a(1+c)/2 + b(1-c)/2 on the semidirect product.
pub fn build_l_omega_ab<R: Ring>(grp: &Metabelian, a: &R, b: &R) -> Result<Measure<R>> {
    let n = grp.order() as usize;
    let half = crate::grpring::scalar(a, 1, 2)?;
    let mut coeffs = vec![a.zero_like(); n];
    coeffs[0] = a.add(b).mul(&half);
    coeffs[grp.index(&grp.g.identity(), 1)] = a.sub(b).mul(&half);
    Ok(Measure::from_coeffs(Carrier::Metabelian(grp.clone()), coeffs)?)
}

/// The period-change element of weight k.
pub fn build_l_omega(grp: &Metabelian, k: i64) -> Result<Measure<SymExpr>> {
    let part = |om: Atom| mono(&[(Atom::TwoPi, k - 2), (om, 1), (Atom::OmegaInf, -(k - 1))]);
    build_l_omega_ab(grp, &part(Atom::OmegaPlus), &part(Atom::OmegaMinus))
}

/// The candidate inverse a^-1(1+c)/2 + b^-1(1-c)/2.
pub fn l_omega_inverse<R: Ring>(grp: &Metabelian, a: &R, b: &R) -> Result<Measure<R>> {
    let inv = |x: &R| x.inv().ok_or_else(|| SymError::Vanishing(x.to_text()));
    build_l_omega_ab(grp, &inv(a)?, &inv(b)?)
}

/// E with theta-components N^-1 eps_theta sigma_theta^-1.
pub fn build_twist_unit_e(t: &ThetaTable) -> Result<Measure<SymExpr>> {
    let (delta, g1) = t.split();
    let mut comps = Vec::new();
    for theta in char_table(&delta) {
        let r = t
            .records
            .iter()
            .find(|r| r.theta == theta)
            .ok_or_else(|| SymError::Missing(format!("theta record for {theta}")))?;
        if r.eps.local_unit(t.p) != Ok(true) || r.norm % t.p == 0 {
            return Err(SymError::Range(format!("component of {theta} is not a unit")));
        }
        let c = SymExpr::rational(1, r.norm as i64).mul(&r.eps);
        let idx = g1.index(&g1.inv(&r.sigma));
        comps.push((theta, Measure::delta(Carrier::Abelian(g1.clone()), idx, c)));
    }
    Ok(Measure::assemble(&t.group, t.delta_rank, &comps)?)
}

/// E(chi kappa^j), computed from the theta-components of `e` with
/// kappa(sigma_theta^-1) = N_theta.
pub fn eval_twist_unit(e: &Measure<SymExpr>, t: &ThetaTable, chi: &GroupChar, j: i64) -> Result<SymExpr> {
    let (_, g1) = t.split();
    let r = t.record_for(chi)?;
    let theta = chi.restrict_coords(0..t.delta_rank);
    let comps = e.idempotent_split(t.delta_rank)?;
    let comp = &comps.iter().find(|(th, _)| *th == theta).ok_or_else(|| SymError::Missing(theta.to_string()))?.1;
    let chi_g = chi.restrict_coords(t.delta_rank..t.group.rank());
    let s_inv = g1.index(&g1.inv(&r.sigma));
    let mut acc = SymExpr::zero();
    for (h, c) in comp.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        if h != s_inv {
            return Err(SymError::Missing("kappa on the support of E".into()));
        }
        let kappa = SymExpr::int(r.norm as i64).pow_i(j)?;
        acc = acc.add(&c.mul(&SymExpr::cyclo(chi_g.value(&g1.elem(h)))).mul(&kappa));
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumericCheck {
    pub agrees: bool,
    /// Assignments discarded because some Euler factor or denominator vanished.
    pub resampled: usize,
}

/// Substitutes pseudo-random p-adic units for every leaf symbol and compares
/// num / den, evaluated through the rewrite rules, with the reduced value.
pub fn numeric_check(
    ctx: &Ctx<'_>,
    num: &SymExpr,
    den: &SymExpr,
    reduced: &SymExpr,
    p: u64,
    precision: u32,
    seed: u64,
) -> Result<NumericCheck> {
    use crate::arith::{PadicExt, PadicNumber};
    use std::collections::hash_map::DefaultHasher;
    use std::hash::{Hash, Hasher};

    let ext = PadicExt::base(p, precision).map_err(|e| SymError::Arith(e.to_string()))?;
    let proto = PadicNumber::from_int(&ext, 0);
    let modulus = ext.modulus();
    let coeff = |c: &CycloNumber| PadicNumber::embed_cyclo(c, &ext).map_err(|e| SymError::Arith(e.to_string()));
    for attempt in 0..64u64 {
        let mut leaf = |a: &Atom| -> Result<PadicNumber> {
            let mut h = DefaultHasher::new();
            (seed, attempt, a).hash(&mut h);
            let mut v = h.finish() % modulus;
            if v.is_multiple_of(p) {
                v += 1;
            }
            Ok(PadicNumber::from_int(&ext, v as i64))
        };
        let run = |leaf: &mut dyn FnMut(&Atom) -> Result<PadicNumber>| -> Result<bool> {
            let n = ctx.eval_numeric(num, &proto, &Rule::DEFAULT, leaf, &coeff)?;
            let d = ctx.eval_numeric(den, &proto, &Rule::DEFAULT, leaf, &coeff)?;
            let r = ctx.eval_numeric(reduced, &proto, &Rule::DEFAULT, leaf, &coeff)?;
            Ok(n == d.mul(&r))
        };
        match run(&mut leaf) {
            Ok(agrees) => return Ok(NumericCheck { agrees, resampled: attempt as usize }),
            Err(SymError::Vanishing(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(SymError::Vanishing("every sampled assignment hit a non-unit denominator".into()))
}
