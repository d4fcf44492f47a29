//! Group-ring elements (finite-level measures) over a coefficient ring.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use crate::arith::Ring;
use crate::chargroup::{char_table, Elem, FinAbGroup, GroupChar, GroupError, GroupHom, Place, Subgroup};
use crate::nt;
use crate::reps::{ArtinRep, Metabelian};
use crate::tower::Level;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GrpRingError {
    #[error("mismatch: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("coefficient ring lacks {0}")]
    MissingRoots(String),
    #[error("{0} is not invertible in the coefficient ring")]
    NotInvertible(String),
    #[error("coefficient ring is not local: {0}")]
    NonLocal(String),
    #[error("undecidable at the working precision: {0}")]
    Undecidable(String),
    #[error("missing component for {0}")]
    MissingComponent(String),
}

type Result<T> = std::result::Result<T, GrpRingError>;

/// The group a measure lives on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Carrier {
    Abelian(FinAbGroup),
    Metabelian(Metabelian),
}

impl Carrier {
    pub fn order(&self) -> usize {
        match self {
            Carrier::Abelian(g) => g.order() as usize,
            Carrier::Metabelian(m) => m.order() as usize,
        }
    }

    pub fn mul_idx(&self, a: usize, b: usize) -> usize {
        match self {
            Carrier::Abelian(g) => g.mul_idx(a, b),
            Carrier::Metabelian(m) => m.mul_idx(a, b),
        }
    }

    pub fn inv_idx(&self, a: usize) -> usize {
        match self {
            Carrier::Abelian(g) => g.inv_idx(a),
            Carrier::Metabelian(m) => m.inv_idx(a),
        }
    }

    fn abelian(&self) -> Result<&FinAbGroup> {
        match self {
            Carrier::Abelian(g) => Ok(g),
            Carrier::Metabelian(_) => Err(GrpRingError::Mismatch("operation needs an abelian group".into())),
        }
    }

    pub fn descriptor(&self) -> String {
        let orders = |g: &FinAbGroup| g.orders().iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        match self {
            Carrier::Abelian(g) => format!("abelian {}", orders(g)),
            Carrier::Metabelian(m) => {
                let rows: Vec<String> = m
                    .c
                    .matrix()
                    .iter()
                    .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "))
                    .collect();
                format!("semidirect {} c {}", orders(&m.g), rows.join("; "))
            }
        }
    }

    fn elem_text(&self, idx: usize) -> String {
        let coords = |e: &Elem| e.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        match self {
            Carrier::Abelian(g) => coords(&g.elem(idx)),
            Carrier::Metabelian(m) => {
                let (g, s) = m.elem(idx);
                format!("{} | {s}", coords(&g))
            }
        }
    }
}

/// A measure: one coefficient per group element, indexed like the carrier.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure<R: Ring> {
    carrier: Carrier,
    coeffs: Vec<R>,
}

/// Powers of zeta_m realized in the coefficient ring, built once per evaluation.
fn root_table<R: Ring>(proto: &R, m: u64) -> Result<Vec<R>> {
    let z = proto
        .root_of_unity(m, 1)
        .ok_or_else(|| GrpRingError::MissingRoots(format!("the {m}-th roots of unity")))?;
    let mut out = Vec::with_capacity(m as usize);
    let mut cur = proto.one_like();
    for _ in 0..m {
        out.push(cur.clone());
        cur = cur.mul(&z);
    }
    Ok(out)
}

/// Roots for the values of chi, sized by its order; chi(g) is table[value_exp(g) / step].
fn char_roots<R: Ring>(proto: &R, chi: &GroupChar) -> Result<(Vec<R>, u64)> {
    let o = chi.order().max(1);
    Ok((root_table(proto, o)?, chi.modulus() / o))
}

fn det<R: Ring>(m: &[Vec<R>], zero: &R) -> R {
    match m.len() {
        0 => zero.one_like(),
        1 => m[0][0].clone(),
        2 => m[0][0].mul(&m[1][1]).sub(&m[0][1].mul(&m[1][0])),
        n => {
            let mut acc = zero.clone();
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<R>> = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, x)| x.clone()).collect())
                    .collect();
                let t = m[0][j].mul(&det(&minor, zero));
                acc = if j % 2 == 0 { acc.add(&t) } else { acc.sub(&t) };
            }
            acc
        }
    }
}

/// Solves M x = b over a local ring by elimination with unit pivots.
/// Returns `Ok(None)` when some column has no unit pivot (M is not invertible).
fn solve_local<R: Ring>(mut m: Vec<Vec<R>>, mut b: Vec<R>, p: u64) -> Result<Option<Vec<R>>> {
    let n = m.len();
    for col in 0..n {
        let mut piv = None;
        for r in col..n {
            if m[r][col].local_unit(p).map_err(GrpRingError::NonLocal)? {
                piv = Some(r);
                break;
            }
        }
        let Some(pr) = piv else { return Ok(None) };
        m.swap(col, pr);
        b.swap(col, pr);
        let inv = m[col][col].inv().ok_or_else(|| GrpRingError::NotInvertible(m[col][col].to_text()))?;
        for k in col..n {
            m[col][k] = m[col][k].mul(&inv);
        }
        b[col] = b[col].mul(&inv);
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            for k in col..n {
                let t = f.mul(&m[col][k]);
                m[r][k] = m[r][k].sub(&t);
            }
            let t = f.mul(&b[col]);
            b[r] = b[r].sub(&t);
        }
    }
    Ok(Some(b))
}

impl<R: Ring> Measure<R> {
    pub fn zero(carrier: Carrier, proto: &R) -> Self {
        let n = carrier.order();
        Measure { carrier, coeffs: vec![proto.zero_like(); n] }
    }

    pub fn from_coeffs(carrier: Carrier, coeffs: Vec<R>) -> Result<Self> {
        if coeffs.len() != carrier.order() {
            return Err(GrpRingError::Mismatch(format!(
                "{} coefficients for a group of order {}",
                coeffs.len(),
                carrier.order()
            )));
        }
        if let Some(first) = coeffs.first() {
            let tag = first.ring_tag();
            if let Some(bad) = coeffs.iter().find(|c| c.ring_tag() != tag) {
                return Err(GrpRingError::Mismatch(format!("rings {tag} and {}", bad.ring_tag())));
            }
        }
        Ok(Measure { carrier, coeffs })
    }

    /// c * delta_idx.
    pub fn delta(carrier: Carrier, idx: usize, c: R) -> Self {
        let mut m = Measure::zero(carrier, &c);
        m.coeffs[idx] = c;
        m
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn coeff(&self, idx: usize) -> &R {
        &self.coeffs[idx]
    }

    fn proto(&self) -> &R {
        &self.coeffs[0]
    }

    fn same_carrier(&self, o: &Self) -> Result<()> {
        if self.carrier != o.carrier {
            return Err(GrpRingError::Mismatch("measures on different groups".into()));
        }
        if self.proto().ring_tag() != o.proto().ring_tag() {
            return Err(GrpRingError::Mismatch("different coefficient rings".into()));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.same_carrier(o)?;
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.add(b)).collect();
        Ok(Measure { carrier: self.carrier.clone(), coeffs })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.same_carrier(o)?;
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.sub(b)).collect();
        Ok(Measure { carrier: self.carrier.clone(), coeffs })
    }

    pub fn scale(&self, s: &R) -> Self {
        Measure { carrier: self.carrier.clone(), coeffs: self.coeffs.iter().map(|a| a.mul(s)).collect() }
    }

    /// (f * g)(h) = sum over ab = h of f(a) g(b).
    pub fn convolve(&self, o: &Self) -> Result<Self> {
        self.same_carrier(o)?;
        let mut out = vec![self.proto().zero_like(); self.coeffs.len()];
        for (a, fa) in self.coeffs.iter().enumerate() {
            if fa.is_zero() {
                continue;
            }
            for (b, gb) in o.coeffs.iter().enumerate() {
                if gb.is_zero() {
                    continue;
                }
                let h = self.carrier.mul_idx(a, b);
                out[h] = out[h].add(&fa.mul(gb));
            }
        }
        Ok(Measure { carrier: self.carrier.clone(), coeffs: out })
    }

    /// The augmentation sum_g f(g).
    pub fn augmentation(&self) -> R {
        self.coeffs.iter().fold(self.proto().zero_like(), |acc, c| acc.add(c))
    }

    /// sum_g f(g) chi(g).
    pub fn eval_char(&self, chi: &GroupChar) -> Result<R> {
        let g = self.carrier.abelian()?;
        if chi.orders() != g.orders() {
            return Err(GrpRingError::Mismatch("character of another group".into()));
        }
        let (roots, step) = char_roots(self.proto(), chi)?;
        // bucket by value first, one multiplication per root
        let mut buckets = vec![self.proto().zero_like(); roots.len()];
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let t = (chi.value_exp(&g.elem(i)) / step) as usize;
            buckets[t] = buckets[t].add(c);
        }
        Ok(buckets
            .iter()
            .zip(&roots)
            .filter(|(b, _)| !b.is_zero())
            .fold(self.proto().zero_like(), |acc, (b, z)| acc.add(&b.mul(z))))
    }

    /// det(sum_x f(x) rho(x)) for a representation of the semidirect product.
    pub fn eval_rep(&self, rho: &ArtinRep) -> Result<R> {
        let grp = match &self.carrier {
            Carrier::Metabelian(m) => m,
            Carrier::Abelian(_) => return Err(GrpRingError::Mismatch("eval_rep needs the semidirect product".into())),
        };
        let d = rho.dim();
        let zero = self.proto().zero_like();
        let mut acc = vec![vec![zero.clone(); d]; d];
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mx = rho
                .matrix_in(grp, self.proto(), &grp.elem(i))
                .ok_or_else(|| GrpRingError::MissingRoots(format!("values of {rho}")))?;
            for r in 0..d {
                for k in 0..d {
                    acc[r][k] = acc[r][k].add(&c.mul(&mx[r][k]));
                }
            }
        }
        Ok(det(&acc, &zero))
    }

    /// det(sum_g f(g) diag(chi_1(g), ..., chi_k(g))) for a direct sum of characters.
    pub fn eval_char_sum(&self, chars: &[GroupChar]) -> Result<R> {
        let g = self.carrier.abelian()?;
        let zero = self.proto().zero_like();
        let k = chars.len();
        let tables: Vec<(Vec<R>, u64)> = chars.iter().map(|c| char_roots(self.proto(), c)).collect::<Result<_>>()?;
        let mut acc = vec![vec![zero.clone(); k]; k];
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = g.elem(i);
            for (j, chi) in chars.iter().enumerate() {
                let (roots, step) = &tables[j];
                acc[j][j] = acc[j][j].add(&c.mul(&roots[(chi.value_exp(&e) / step) as usize]));
            }
        }
        Ok(det(&acc, &zero))
    }

    /// g -> f(g) chi(g^-1).
    pub fn twist(&self, chi: &GroupChar) -> Result<Self> {
        let g = self.carrier.abelian()?;
        let (roots, step) = char_roots(self.proto(), chi)?;
        let o = roots.len() as u64;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let t = (o - chi.value_exp(&g.elem(i)) / step) % o;
                c.mul(&roots[t as usize])
            })
            .collect();
        Ok(Measure { carrier: self.carrier.clone(), coeffs })
    }

    /// Image measure along a homomorphism of abelian groups.
    pub fn pushforward(&self, h: &GroupHom) -> Result<Self> {
        let g = self.carrier.abelian()?;
        if &h.src != g {
            return Err(GrpRingError::Mismatch("pushforward along a map from another group".into()));
        }
        let mut out = vec![self.proto().zero_like(); h.dst.order() as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            let j = h.dst.index(&h.apply(&g.elem(i)));
            out[j] = out[j].add(c);
        }
        Ok(Measure { carrier: Carrier::Abelian(h.dst.clone()), coeffs: out })
    }

    /// Components comp_theta(h) = sum_delta theta(delta) f(delta, h) for every character
    /// theta of Delta, the group of the first `delta_rank` factors. Characters come in
    /// [`char_table`] order.
    pub fn idempotent_split(&self, delta_rank: usize) -> Result<Vec<(GroupChar, Measure<R>)>> {
        let g = self.carrier.abelian()?;
        let (delta, g1) = split_groups(g, delta_rank)?;
        let nd = delta.order() as usize;
        self.proto()
            .from_int(nd as i64)
            .inv()
            .ok_or_else(|| GrpRingError::NotInvertible(format!("|Delta| = {nd}")))?;
        let roots = root_table(self.proto(), delta.exponent().max(1))?;
        let e = delta.exponent().max(1);
        let mut out = Vec::new();
        for theta in char_table(&delta) {
            let scale = e / theta.modulus();
            let mut comp = vec![self.proto().zero_like(); g1.order() as usize];
            for (i, c) in self.coeffs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let x = g.elem(i);
                let t = theta.value_exp(&x[..delta_rank]) * scale;
                let h = g1.index(&x[delta_rank..]);
                comp[h] = comp[h].add(&c.mul(&roots[t as usize]));
            }
            out.push((theta, Measure { carrier: Carrier::Abelian(g1.clone()), coeffs: comp }));
        }
        Ok(out)
    }

    /// Inverse of [`Measure::idempotent_split`]:
    /// f(delta, h) = |Delta|^-1 sum_theta theta(delta^-1) m_theta(h).
    pub fn assemble(group: &FinAbGroup, delta_rank: usize, comps: &[(GroupChar, Measure<R>)]) -> Result<Self> {
        let (delta, g1) = split_groups(group, delta_rank)?;
        let table = char_table(&delta);
        let proto = comps
            .first()
            .map(|c| c.1.proto().clone())
            .ok_or_else(|| GrpRingError::MissingComponent("every character".into()))?;
        let nd = delta.order() as i64;
        let inv_nd = proto
            .from_int(nd)
            .inv()
            .ok_or_else(|| GrpRingError::NotInvertible(format!("|Delta| = {nd}")))?;
        let e = delta.exponent().max(1);
        let roots = root_table(&proto, e)?;
        let mut coeffs = vec![proto.zero_like(); group.order() as usize];
        for theta in &table {
            let comp = comps
                .iter()
                .find(|(t, _)| t == theta)
                .map(|(_, m)| m)
                .ok_or_else(|| GrpRingError::MissingComponent(theta.to_string()))?;
            if comp.carrier != Carrier::Abelian(g1.clone()) {
                return Err(GrpRingError::Mismatch("component on the wrong group".into()));
            }
            let scale = e / theta.modulus();
            for (i, slot) in coeffs.iter_mut().enumerate() {
                let x = group.elem(i);
                let c = &comp.coeffs[g1.index(&x[delta_rank..])];
                if c.is_zero() {
                    continue;
                }
                let t = (e - theta.value_exp(&x[..delta_rank]) * scale % e) % e;
                *slot = slot.add(&c.mul(&roots[t as usize]));
            }
        }
        let coeffs = coeffs.into_iter().map(|c| c.mul(&inv_nd)).collect();
        Ok(Measure { carrier: Carrier::Abelian(group.clone()), coeffs })
    }

    /// Left-multiplication solve f * x = delta_e with unit pivots.
    fn inverse_by_elimination(&self, p: u64) -> Result<Option<Self>> {
        let n = self.coeffs.len();
        let mut m = vec![vec![self.proto().zero_like(); n]; n];
        for (j, row) in (0..n).map(|j| (j, self.carrier.inv_idx(j))) {
            // column j: f * delta_j, entry i is f(i j^-1)
            for (i, mi) in m.iter_mut().enumerate() {
                mi[j] = self.coeffs[self.carrier.mul_idx(i, row)].clone();
            }
        }
        let mut b = vec![self.proto().zero_like(); n];
        b[0] = self.proto().one_like();
        Ok(solve_local(m, b, p)?.map(|x| Measure { carrier: self.carrier.clone(), coeffs: x }))
    }

    /// Unit test in the group ring over a local coefficient ring with residue
    /// characteristic p. On abelian carriers Delta is the first `delta_rank` factors
    /// (prime to p) and the rest must be a p-group; f is a unit iff every
    /// theta-component has unit augmentation. On the semidirect product the left
    /// multiplication matrix is reduced with unit pivots. Returns the inverse, which
    /// is checked against the unit law.
    pub fn is_unit(&self, p: u64, delta_rank: usize) -> Result<Option<Self>> {
        let inverse = match &self.carrier {
            Carrier::Abelian(g) => {
                let (delta, g1) = split_groups(g, delta_rank)?;
                if delta.order() % p == 0 {
                    return Err(GrpRingError::Mismatch(format!("Delta has order divisible by {p}")));
                }
                if g1.orders().iter().any(|&n| n / p.pow(nt::val_p(n, p)) != 1) {
                    return Err(GrpRingError::Mismatch(format!("the complement of Delta is not a {p}-group")));
                }
                let comps = self.idempotent_split(delta_rank)?;
                let mut inv_comps = Vec::new();
                for (theta, comp) in comps {
                    if !comp.augmentation().local_unit(p).map_err(GrpRingError::NonLocal)? {
                        return Ok(None);
                    }
                    let inv = comp
                        .inverse_by_elimination(p)?
                        .ok_or_else(|| GrpRingError::Undecidable(format!("component {theta} has unit augmentation but no inverse")))?;
                    inv_comps.push((theta, inv));
                }
                Measure::assemble(g, delta_rank, &inv_comps)?
            }
            Carrier::Metabelian(_) => match self.inverse_by_elimination(p)? {
                Some(x) => x,
                None => return Ok(None),
            },
        };
        let unit = Measure::delta(self.carrier.clone(), 0, self.proto().one_like());
        if self.convolve(&inverse)? != unit {
            return Err(GrpRingError::Undecidable("f * f^-1 differs from the identity".into()));
        }
        Ok(Some(inverse))
    }

    /// The measure on G x| <c> with the same coefficients on G and zero off G.
    pub fn extend_trivially(&self, grp: &Metabelian) -> Result<Self> {
        let g = self.carrier.abelian()?;
        if g != &grp.g {
            return Err(GrpRingError::Mismatch("G is not the index-2 subgroup".into()));
        }
        let mut coeffs = self.coeffs.clone();
        coeffs.extend(std::iter::repeat_n(self.proto().zero_like(), self.coeffs.len()));
        Ok(Measure { carrier: Carrier::Metabelian(grp.clone()), coeffs })
    }

    /// Byte-stable text form: group descriptor, ring tag, then the nonzero
    /// coefficients in index order.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "measure v1").unwrap();
        writeln!(s, "group {}", self.carrier.descriptor()).unwrap();
        writeln!(s, "ring {}", self.proto().ring_tag()).unwrap();
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                writeln!(s, "{} : {}", self.carrier.elem_text(i), c.to_text()).unwrap();
            }
        }
        s
    }
}

fn split_groups(g: &FinAbGroup, delta_rank: usize) -> Result<(FinAbGroup, FinAbGroup)> {
    if delta_rank > g.rank() {
        return Err(GrpRingError::Mismatch("delta_rank exceeds the rank".into()));
    }
    let part = |o: &[u64]| if o.is_empty() { FinAbGroup::trivial() } else { FinAbGroup::new(o).unwrap() };
    Ok((part(&g.orders()[..delta_rank]), part(&g.orders()[delta_rank..])))
}

/// The measure with prescribed character values:
/// f(g) = |G|^-1 sum_chi V(chi) chi(g^-1).
pub fn fourier_invert<R: Ring>(g: &FinAbGroup, proto: &R, values: impl Fn(&GroupChar) -> R) -> Result<Measure<R>> {
    let e = g.exponent().max(1);
    let roots = root_table(proto, e)?;
    let n = g.order() as usize;
    let inv_n = proto
        .from_int(n as i64)
        .inv()
        .ok_or_else(|| GrpRingError::NotInvertible(format!("|G| = {n}")))?;
    // only characters with a nonzero value contribute; their products with
    // every root are tabulated once
    let terms: Vec<(GroupChar, Vec<R>)> = char_table(g)
        .into_iter()
        .filter_map(|chi| {
            let v = values(&chi);
            (!v.is_zero()).then(|| {
                let row = roots.iter().map(|z| v.mul(z)).collect();
                (chi, row)
            })
        })
        .collect();
    let mut coeffs = Vec::with_capacity(n);
    for x in g.elements() {
        let mut acc = proto.zero_like();
        for (chi, row) in &terms {
            let t = chi.value_exp(&x) * (e / chi.modulus());
            acc = acc.add(&row[((e - t % e) % e) as usize]);
        }
        coeffs.push(acc.mul(&inv_n));
    }
    Measure::from_coeffs(Carrier::Abelian(g.clone()), coeffs)
}

/// Inputs of [`build_theta_component`].
#[derive(Debug, Clone)]
pub struct ThetaData<'a, R: Ring> {
    /// The character psi*theta of the covering group.
    pub kappa: &'a GroupChar,
    /// The scalar delta.
    pub delta: &'a R,
    /// The element sigma_delta of the covering group.
    pub sigma: &'a [u64],
    /// Name of the label subgroup that sigma_delta must lie in.
    pub kernel_label: &'a str,
    pub omega: &'a R,
    /// Residue characteristic used for the unit check on Omega, when the ring is local.
    pub p: u64,
    /// Surjection from the covering group onto G_1.
    pub pr: &'a GroupHom,
}

/// mu(h) = Omega^-1 delta sum_{pr(y) = h} kappa^-1(y) nu(y sigma),
/// i.e. the integral of f against mu is Omega^-1 times the integral of
/// kappa^-1 (f o pr) against delta * sigma^-1 * nu.
pub fn build_theta_component<R: Ring>(nu: &Measure<R>, d: &ThetaData<'_, R>) -> Result<Measure<R>> {
    let cov = nu.carrier.abelian()?;
    if &d.pr.src != cov || d.kappa.orders() != cov.orders() {
        return Err(GrpRingError::Mismatch("data for another covering group".into()));
    }
    cov.check(d.sigma)?;
    let kernel = cov.label(d.kernel_label)?;
    if !kernel.contains(cov.index(d.sigma)) {
        return Err(GrpRingError::Mismatch(format!("sigma_delta is outside `{}`", d.kernel_label)));
    }
    let omega_bad = || GrpRingError::NotInvertible(format!("Omega = {}", d.omega.to_text()));
    if d.omega.local_unit(d.p) == Ok(false) {
        return Err(omega_bad());
    }
    let omega_inv = d.omega.inv().ok_or_else(omega_bad)?;
    let lead = omega_inv.mul(d.delta);
    let (roots, step) = char_roots(nu.proto(), d.kappa)?;
    let m = roots.len() as u64;
    let sig = cov.index(d.sigma);
    let g1 = &d.pr.dst;
    let mut out = vec![nu.proto().zero_like(); g1.order() as usize];
    for y in 0..cov.order() as usize {
        let c = &nu.coeffs[cov.mul_idx(y, sig)];
        if c.is_zero() {
            continue;
        }
        let ye = cov.elem(y);
        let t = (m - d.kappa.value_exp(&ye) / step) % m;
        let h = g1.index(&d.pr.apply(&ye));
        out[h] = out[h].add(&c.mul(&roots[t as usize]));
    }
    let coeffs = out.into_iter().map(|c| c.mul(&lead)).collect();
    Ok(Measure { carrier: Carrier::Abelian(g1.clone()), coeffs })
}

/// A compatible family of measures along a tower G_1 <- G_2 <- ...
#[derive(Debug, Clone)]
pub struct MeasureTower<R: Ring> {
    pub measures: Vec<Measure<R>>,
    /// projections[i] maps the group of level i+2 onto that of level i+1.
    pub projections: Vec<GroupHom>,
}

impl<R: Ring> MeasureTower<R> {
    /// The first level whose pushforward differs from the level below.
    pub fn first_incompatible(&self) -> Result<Option<usize>> {
        if self.projections.len() + 1 != self.measures.len() {
            return Err(GrpRingError::Mismatch("one projection per level step".into()));
        }
        for (i, pr) in self.projections.iter().enumerate() {
            if self.measures[i + 1].pushforward(pr)? != self.measures[i] {
                return Ok(Some(i + 2));
            }
        }
        Ok(None)
    }
}

/// The rational number as a coefficient in the ring of `proto`.
pub fn scalar<R: Ring>(proto: &R, n: i64, d: i64) -> Result<R> {
    proto
        .from_rational(&BigRational::new(BigInt::from(n), BigInt::from(d)))
        .ok_or_else(|| GrpRingError::NotInvertible(format!("{d}")))
}

/// Finite-level model of the Katz-style construction: the covering group
/// Z/m x G_n (the extra factor standing in for the prime-to-p conductor),
/// the fixed character psi on it, and sigma_delta in the inertia at p.
#[derive(Debug, Clone)]
pub struct KatzModel {
    pub group: FinAbGroup,
    pub delta_rank: usize,
    /// Covering group, labelled `kernel` on the lifted inertia at p.
    pub cover: FinAbGroup,
    /// Projection of the cover onto G_1.
    pub pr: GroupHom,
    /// Projection of the cover onto Delta.
    pub to_delta: GroupHom,
    pub psi: GroupChar,
    pub sigma: Elem,
}

impl KatzModel {
    /// `psi` gives exponents on the cover, `a` selects sigma_a at p.
    pub fn new(level: &Level, p: u64, extra: u64, psi: &[i64], a: u64) -> Result<Self> {
        let g = &level.group;
        let dr = level.delta_rank;
        let r = g.rank();
        let head = FinAbGroup::cyclic(extra);
        let off = head.rank();
        let lift = |e: &[u64]| -> Elem {
            let mut out = vec![0; off];
            out.extend_from_slice(e);
            out
        };
        let plain = head.product(g);
        let u0 = g.inertia(Place::P)?.first().ok_or_else(|| GrpRingError::Mismatch("no inertia at p".into()))?;
        let gens: Vec<Elem> = u0.members().iter().map(|&i| lift(&g.elem(i))).collect();
        let kernel = Subgroup::generated(&plain, &gens)?;
        let cover = plain.with_label("kernel", kernel);
        let select = |dst: &FinAbGroup, range: std::ops::Range<usize>| {
            let rows = range
                .map(|i| (0..off + r).map(|j| (j == off + i) as i64).collect())
                .collect();
            GroupHom::new(&cover, dst, rows)
        };
        let pr = select(&level.g1(), dr..r)?;
        let to_delta = select(&level.delta(), 0..dr)?;
        if psi.len() != cover.rank() {
            return Err(GrpRingError::Mismatch("psi has the wrong rank".into()));
        }
        let sigma = level
            .sigma(p, Place::P, a)
            .ok_or_else(|| GrpRingError::Mismatch(format!("no sigma_{a} at level {}", level.n)))?;
        Ok(KatzModel {
            group: g.clone(),
            delta_rank: dr,
            psi: GroupChar::new(&cover, psi),
            sigma: lift(&sigma),
            cover,
            pr,
            to_delta,
        })
    }

    /// psi * theta as a character of the cover.
    pub fn kappa(&self, theta: &GroupChar) -> GroupChar {
        self.psi.mul(&theta.pullback(&self.to_delta))
    }

    /// Splits chi = theta * chi_1 and returns (theta, eps) with
    /// eps = (psi theta)^-1 (chi_1 o pr), the character the prescription is read at.
    pub fn eps(&self, chi: &GroupChar) -> (GroupChar, GroupChar) {
        let r = self.group.rank();
        let theta = chi.restrict_coords(0..self.delta_rank);
        let chi1 = chi.restrict_coords(self.delta_rank..r);
        let eps = self.kappa(&theta).inv().mul(&chi1.pullback(&self.pr));
        (theta, eps)
    }

    /// assemble_L: one theta-component per character of Delta built from its
    /// covering measure, then glued along the idempotent decomposition.
    pub fn assemble_l<R: Ring>(&self, nus: &[(GroupChar, Measure<R>)], delta: &R, omega: &R, p: u64) -> Result<Measure<R>> {
        let mut comps = Vec::with_capacity(nus.len());
        for (theta, nu) in nus {
            let kappa = self.kappa(theta);
            let data = ThetaData {
                kappa: &kappa,
                delta,
                sigma: &self.sigma,
                kernel_label: "kernel",
                omega,
                p,
                pr: &self.pr,
            };
            comps.push((theta.clone(), build_theta_component(nu, &data)?));
        }
        Measure::assemble(&self.group, self.delta_rank, &comps)
    }

    /// Right-hand side of the evaluation formula at chi:
    /// Omega^-1 delta eps(sigma_delta)^-1 V_theta(eps).
    pub fn expected<R: Ring>(&self, chi: &GroupChar, value: &R, delta: &R, omega: &R) -> Result<R> {
        let (_, eps) = self.eps(chi);
        let shift = eps
            .inv()
            .value_in(delta, &self.sigma)
            .ok_or_else(|| GrpRingError::MissingRoots(format!("values of {eps}")))?;
        let omega_inv = omega.inv().ok_or_else(|| GrpRingError::NotInvertible(omega.to_text()))?;
        Ok(omega_inv.mul(delta).mul(&shift).mul(value))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{CycloNumber, PadicExt, PadicNumber};
    use crate::chargroup::CAction;

    fn cyc(n: i64) -> CycloNumber {
        CycloNumber::from_int(n)
    }

    fn ab(orders: &[u64]) -> Carrier {
        Carrier::Abelian(FinAbGroup::new(orders).unwrap())
    }

    #[test]
    fn square_on_z3() {
        let f = Measure::from_coeffs(ab(&[3]), vec![cyc(1), cyc(1), cyc(0)]).unwrap();
        let sq = f.convolve(&f).unwrap();
        assert_eq!(sq.coeffs(), &[cyc(1), cyc(2), cyc(1)]);
        let e = Measure::delta(ab(&[3]), 0, cyc(1));
        assert_eq!(e.convolve(&f).unwrap(), f);
    }

    #[test]
    fn split_of_the_sign_element() {
        let g = FinAbGroup::new(&[2, 5]).unwrap();
        let sigma = g.index(&[1, 0]);
        let f = Measure::delta(Carrier::Abelian(g.clone()), sigma, cyc(1));
        let comps = f.idempotent_split(1).unwrap();
        assert_eq!(comps[0].1.coeffs()[0], cyc(1));
        assert_eq!(comps[1].1.coeffs()[0], cyc(-1));
        assert_eq!(Measure::assemble(&g, 1, &comps).unwrap(), f);
    }

    #[test]
    fn period_unit_on_c() {
        // a(1+c)/2 + b(1-c)/2 on G x| <c> with G trivial, 5-adic units a, b
        let ext = PadicExt::base(5, 6).unwrap();
        let grp = Metabelian::new(FinAbGroup::trivial(), CAction::identity(&FinAbGroup::trivial()));
        let a = PadicNumber::from_int(&ext, 3);
        let b = PadicNumber::from_int(&ext, 7);
        let half = scalar(&a, 1, 2).unwrap();
        let mk = |a: &PadicNumber, b: &PadicNumber| {
            Measure::from_coeffs(
                Carrier::Metabelian(grp.clone()),
                vec![a.add(b).mul(&half), a.sub(b).mul(&half)],
            )
            .unwrap()
        };
        let l = mk(&a, &b);
        let inv = l.is_unit(5, 0).unwrap().unwrap();
        assert_eq!(inv, mk(&a.inv().unwrap(), &b.inv().unwrap()));
        let five = PadicNumber::from_int(&ext, 5);
        assert!(mk(&five, &b).is_unit(5, 0).unwrap().is_none());
    }

    #[test]
    fn unit_on_abelian_p_group() {
        let ext = PadicExt::base(5, 4).unwrap();
        let g = FinAbGroup::new(&[4, 5]).unwrap();
        let one = PadicNumber::from_int(&ext, 1);
        let f = Measure::delta(Carrier::Abelian(g.clone()), 0, one.clone())
            .add(&Measure::delta(Carrier::Abelian(g.clone()), g.index(&[0, 1]), one.from_int(5)))
            .unwrap();
        let inv = f.is_unit(5, 1).unwrap().unwrap();
        assert_eq!(f.convolve(&inv).unwrap().coeffs()[0], one);
        // 1 - gamma has zero augmentation on the trivial theta-component
        let g2 = Measure::delta(Carrier::Abelian(g.clone()), 0, one.clone())
            .sub(&Measure::delta(Carrier::Abelian(g.clone()), g.index(&[0, 1]), one.clone()))
            .unwrap();
        assert!(g2.is_unit(5, 1).unwrap().is_none());
    }

    #[test]
    fn serialization_is_stable() {
        let f = Measure::from_coeffs(ab(&[3]), vec![cyc(1), cyc(0), CycloNumber::zeta(3)]).unwrap();
        let t = f.to_text();
        assert_eq!(t, f.clone().to_text());
        assert!(t.starts_with("measure v1\ngroup abelian 3\nring cyclo\n"));
        assert_eq!(t.lines().count(), 5);
    }
}
