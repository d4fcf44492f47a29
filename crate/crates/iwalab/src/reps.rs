//! Representations of the metabelian groups G_n x| <c>: Type A characters,
//! Type B inductions, restriction, inner products and conductor data.

use std::fmt;

use num_traits::ToPrimitive;
use thiserror::Error;

use crate::arith::{CycloNumber, Ring};
use crate::chargroup::{char_table, conductor_exponent, conjugate_char, CAction, Elem, FinAbGroup, GroupChar, GroupError, Place};
use crate::nt;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RepError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("inner product {0} is not a nonnegative integer")]
    NonInteger(String),
    #[error("representation does not belong to this group")]
    Mismatch,
}

/// The group G x| <c> with c^2 = e acting on G through an involution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Metabelian {
    pub g: FinAbGroup,
    pub c: CAction,
}

impl Metabelian {
    pub fn new(g: FinAbGroup, c: CAction) -> Self {
        Metabelian { g, c }
    }

    pub fn order(&self) -> u64 {
        2 * self.g.order()
    }

    /// Common order N of all character values (lcm of exp(G) and 2).
    pub fn value_modulus(&self) -> u64 {
        nt::lcm(self.g.exponent(), 2)
    }

    pub fn index(&self, g: &[u64], s: u8) -> usize {
        self.g.index(g) + s as usize * self.g.order() as usize
    }

    pub fn elem(&self, idx: usize) -> (Elem, u8) {
        let n = self.g.order() as usize;
        (self.g.elem(idx % n), (idx / n) as u8)
    }

    /// (g1, s1)(g2, s2) = (g1 c^s1(g2), s1 + s2).
    pub fn mul(&self, a: &(Elem, u8), b: &(Elem, u8)) -> (Elem, u8) {
        let moved = if a.1 == 1 { self.c.apply(&b.0) } else { b.0.clone() };
        (self.g.op(&a.0, &moved), a.1 ^ b.1)
    }

    pub fn mul_idx(&self, a: usize, b: usize) -> usize {
        let (x, y) = (self.elem(a), self.elem(b));
        let (g, s) = self.mul(&x, &y);
        self.index(&g, s)
    }

    pub fn inv(&self, a: &(Elem, u8)) -> (Elem, u8) {
        if a.1 == 0 {
            (self.g.inv(&a.0), 0)
        } else {
            (self.g.inv(&self.c.apply(&a.0)), 1)
        }
    }

    pub fn inv_idx(&self, a: usize) -> usize {
        let (g, s) = self.inv(&self.elem(a));
        self.index(&g, s)
    }
}

/// An Artin representation of G x| <c>.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArtinRep {
    /// One-dimensional: chi on G (with chi = chi^c) and rho(c) = sign.
    TypeA { chi: GroupChar, sign: i8 },
    /// Ind chi: rho(g) = diag(chi(g), chi^c(g)), rho(c) = swap.
    /// Irreducible exactly when chi != chi^c (Type B).
    Induced { chi: GroupChar, chi_c: GroupChar },
}

impl fmt::Display for ArtinRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArtinRep::TypeA { chi, sign } => write!(f, "A({}, c={:+})", chi, sign),
            ArtinRep::Induced { chi, chi_c } => write!(f, "Ind({} | {})", chi, chi_c),
        }
    }
}

impl ArtinRep {
    pub fn dim(&self) -> usize {
        match self {
            ArtinRep::TypeA { .. } => 1,
            ArtinRep::Induced { .. } => 2,
        }
    }

    pub fn is_type_b(&self) -> bool {
        matches!(self, ArtinRep::Induced { chi, chi_c } if chi != chi_c)
    }

    pub fn is_irreducible(&self) -> bool {
        match self {
            ArtinRep::TypeA { .. } => true,
            ArtinRep::Induced { chi, chi_c } => chi != chi_c,
        }
    }

    /// Character values at an element as exponents k of zeta_N^k (a sum).
    pub fn char_terms(&self, grp: &Metabelian, x: &(Elem, u8)) -> Vec<u64> {
        let n = grp.value_modulus();
        match self {
            ArtinRep::TypeA { chi, sign } => {
                let t = chi.value_exp(&x.0) * (n / chi.modulus());
                let flip = if *sign < 0 && x.1 == 1 { n / 2 } else { 0 };
                vec![(t + flip) % n]
            }
            ArtinRep::Induced { chi, chi_c } => {
                if x.1 == 1 {
                    Vec::new()
                } else {
                    vec![
                        chi.value_exp(&x.0) * (n / chi.modulus()),
                        chi_c.value_exp(&x.0) * (n / chi_c.modulus()),
                    ]
                }
            }
        }
    }

    pub fn character(&self, grp: &Metabelian, x: &(Elem, u8)) -> CycloNumber {
        let n = grp.value_modulus();
        let mut acc = crate::arith::CycloAccumulator::new(n);
        for t in self.char_terms(grp, x) {
            acc.add_root_int(1, t as i64);
        }
        acc.finish()
    }

    /// Matrix realization with entries in a coefficient ring.
    pub fn matrix_in<R: Ring>(&self, grp: &Metabelian, proto: &R, x: &(Elem, u8)) -> Option<Vec<Vec<R>>> {
        let _ = grp;
        match self {
            ArtinRep::TypeA { chi, sign } => {
                let mut v = chi.value_in(proto, &x.0)?;
                if *sign < 0 && x.1 == 1 {
                    v = v.neg();
                }
                Some(vec![vec![v]])
            }
            ArtinRep::Induced { chi, chi_c } => {
                let a = chi.value_in(proto, &x.0)?;
                let b = chi_c.value_in(proto, &x.0)?;
                let z = proto.zero_like();
                Some(if x.1 == 0 {
                    vec![vec![a, z.clone()], vec![z, b]]
                } else {
                    // diag(a, b) * swap
                    vec![vec![z.clone(), a], vec![b, z]]
                })
            }
        }
    }

    pub fn contragredient(&self) -> ArtinRep {
        match self {
            ArtinRep::TypeA { chi, sign } => ArtinRep::TypeA { chi: chi.inv(), sign: *sign },
            ArtinRep::Induced { chi, chi_c } => ArtinRep::Induced { chi: chi.inv(), chi_c: chi_c.inv() },
        }
    }
}

/// All irreducible representations of G x| <c>.
///
/// Order: walk the characters of G in [`char_table`] order; a c-fixed chi gives
/// Type A with rho(c) = +1 then -1; a non-fixed chi gives Ind chi the first time
/// either member of {chi, chi^c} is met. The position in this list is the
/// stable index used by the CLI.
pub fn classify_irreps(grp: &Metabelian) -> Vec<ArtinRep> {
    let table = char_table(&grp.g);
    let mut out = Vec::new();
    for chi in &table {
        let cc = conjugate_char(chi, &grp.c);
        if cc == *chi {
            out.push(ArtinRep::TypeA { chi: chi.clone(), sign: 1 });
            out.push(ArtinRep::TypeA { chi: chi.clone(), sign: -1 });
        } else if grp.g.index(chi.exps()) < grp.g.index(cc.exps()) {
            out.push(ArtinRep::Induced { chi: chi.clone(), chi_c: cc });
        }
    }
    out
}

pub fn induce(grp: &Metabelian, chi: &GroupChar) -> ArtinRep {
    ArtinRep::Induced { chi: chi.clone(), chi_c: conjugate_char(chi, &grp.c) }
}

pub fn restrict(rep: &ArtinRep) -> Vec<GroupChar> {
    match rep {
        ArtinRep::TypeA { chi, .. } => vec![chi.clone()],
        ArtinRep::Induced { chi, chi_c } => vec![chi.clone(), chi_c.clone()],
    }
}

fn counts_to_integer(n: u64, counts: &[i64], denom: u64) -> Result<u64, RepError> {
    let coeffs: Vec<_> = counts.iter().map(|&c| crate::arith::rat(c, denom as i64)).collect();
    let v = CycloNumber::from_coeffs(n, &coeffs).map_err(|e| RepError::NonInteger(e.to_string()))?;
    q_to_u64(&v)
}

fn q_to_u64(v: &CycloNumber) -> Result<u64, RepError> {
    let q = v.as_rational().ok_or_else(|| RepError::NonInteger(v.to_string()))?;
    if !q.is_integer() {
        return Err(RepError::NonInteger(q.to_string()));
    }
    q.numer().to_u64().ok_or_else(|| RepError::NonInteger(q.to_string()))
}

/// <rho1, rho2> = |G~|^-1 sum chi1(x) conj(chi2(x)).
pub fn inner_product(grp: &Metabelian, r1: &ArtinRep, r2: &ArtinRep) -> Result<u64, RepError> {
    let n = grp.value_modulus();
    let mut counts = vec![0i64; n as usize];
    for idx in 0..grp.order() as usize {
        let x = grp.elem(idx);
        let a = r1.char_terms(grp, &x);
        if a.is_empty() {
            continue;
        }
        for tb in r2.char_terms(grp, &x) {
            for &ta in &a {
                counts[((ta + n - tb) % n) as usize] += 1;
            }
        }
    }
    counts_to_integer(n, &counts, grp.order())
}

/// Inner product on G of the sums of characters `a` and `b`.
pub fn inner_product_g(g: &FinAbGroup, a: &[GroupChar], b: &[GroupChar]) -> Result<u64, RepError> {
    let n = g.exponent();
    let mut counts = vec![0i64; n as usize];
    for x in g.elements() {
        for cb in b {
            let tb = cb.value_exp(&x) * (n / cb.modulus());
            for ca in a {
                let ta = ca.value_exp(&x) * (n / ca.modulus());
                counts[((ta + n - tb) % n) as usize] += 1;
            }
        }
    }
    counts_to_integer(n, &counts, g.order())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepInvariants {
    pub d_plus: usize,
    pub d_minus: usize,
    pub contragredient: ArtinRep,
    pub f_p: Option<u32>,
}

/// d+ / d- (eigenspaces of rho(c)), the contragredient, and the p-conductor
/// exponent when the group carries inertia chains.
pub fn rep_invariants(grp: &Metabelian, rep: &ArtinRep) -> Result<RepInvariants, RepError> {
    let (d_plus, d_minus) = match rep {
        ArtinRep::TypeA { sign, .. } => {
            if *sign > 0 {
                (1, 0)
            } else {
                (0, 1)
            }
        }
        ArtinRep::Induced { .. } => (1, 1),
    };
    let f_p = if grp.g.has_inertia() {
        Some(match rep {
            ArtinRep::TypeA { chi, .. } => conductor_exponent(&grp.g, chi, Place::PBar)?,
            ArtinRep::Induced { chi, .. } => {
                conductor_exponent(&grp.g, chi, Place::P)? + conductor_exponent(&grp.g, chi, Place::PBar)?
            }
        })
    } else {
        None
    };
    Ok(RepInvariants { d_plus, d_minus, contragredient: rep.contragredient(), f_p })
}

/// One row of the reciprocity table: (Res rho, chi)_G against (rho, Ind chi).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReciprocityEntry {
    pub rep: usize,
    pub chi: GroupChar,
    pub restricted: u64,
    pub induced: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepSuite {
    pub order: u64,
    pub dim_square_sum: u64,
    pub irreps: Vec<ArtinRep>,
    pub table: Vec<ReciprocityEntry>,
}

impl RepSuite {
    pub fn failures(&self) -> impl Iterator<Item = &ReciprocityEntry> {
        self.table.iter().filter(|e| e.restricted != e.induced)
    }

    pub fn pass(&self) -> bool {
        self.dim_square_sum == self.order && self.failures().next().is_none()
    }
}

/// Sum of squared dimensions and the full Frobenius reciprocity table over
/// every classified irreducible and every character of G.
pub fn rep_suite(grp: &Metabelian) -> Result<RepSuite, RepError> {
    let irreps = classify_irreps(grp);
    let dim_square_sum = irreps.iter().map(|r| (r.dim() * r.dim()) as u64).sum();
    let mut table = Vec::new();
    for (i, rho) in irreps.iter().enumerate() {
        let res = restrict(rho);
        for chi in char_table(&grp.g) {
            let restricted = inner_product_g(&grp.g, &res, std::slice::from_ref(&chi))?;
            let induced = inner_product(grp, rho, &induce(grp, &chi))?;
            table.push(ReciprocityEntry { rep: i, chi, restricted, induced });
        }
    }
    Ok(RepSuite { order: grp.order(), dim_square_sum, irreps, table })
}
