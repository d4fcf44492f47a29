//! Finite-level descent: value vectors of measures, Galois-orbit descent of
//! coefficients, the Det and ev maps, and an experimental search for
//! O-rational units with prescribed Det.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::arith::{teichmuller, CycloNumber, Ring};
use crate::chargroup::{char_table, FinAbGroup, GaloisAction, GroupChar, GroupError, GroupHom};
use crate::grpring::{fourier_invert, Carrier, GrpRingError, Measure};
use crate::nt;
use crate::reps::{classify_irreps, ArtinRep, Metabelian};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DescentError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Measure(#[from] GrpRingError),
    #[error("torsion exponent {exponent} does not divide p - 1 = {}", p - 1)]
    Torsion { exponent: u64, p: u64 },
    #[error("bad shape: {0}")]
    Shape(String),
    #[error("{0} is not invertible")]
    NotInvertible(String),
    #[error("twist invariance fails at ({rep}, {chi})")]
    NotTwistInvariant { rep: String, chi: String },
    #[error("Det is not invariant under the action at {0}")]
    NotInvariant(String),
    #[error("coefficient {0} is not integral after dividing by |G|")]
    NotIntegral(String),
    #[error("arithmetic: {0}")]
    Arith(String),
}

pub type Result<T> = std::result::Result<T, DescentError>;

/// A value per character (or irrep), kept in a fixed key order.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueVector<K, R> {
    pub entries: Vec<(K, R)>,
}

impl<K: PartialEq, R> ValueVector<K, R> {
    pub fn get(&self, k: &K) -> Option<&R> {
        self.entries.iter().find(|(x, _)| x == k).map(|(_, v)| v)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// rho -> sum_g m_g rho(g) over all characters, in [`char_table`] order.
pub fn hom_description<R: Ring>(f: &Measure<R>) -> Result<ValueVector<GroupChar, R>> {
    let g = match f.carrier() {
        Carrier::Abelian(g) => g,
        Carrier::Metabelian(_) => return Err(DescentError::Shape("hom_description needs an abelian group".into())),
    };
    let entries = char_table(g)
        .into_iter()
        .map(|chi| f.eval_char(&chi).map(|v| (chi, v)))
        .collect::<std::result::Result<_, _>>()?;
    Ok(ValueVector { entries })
}

/// m_g = |G|^-1 sum_rho v(rho) rho(g^-1).
pub fn fourier_invert_vector<R: Ring>(g: &FinAbGroup, v: &ValueVector<GroupChar, R>) -> Result<Measure<R>> {
    let table = char_table(g);
    if v.len() != table.len() || table.iter().any(|c| v.get(c).is_none()) {
        return Err(DescentError::Shape(format!("{} values for {} characters", v.len(), table.len())));
    }
    let proto = v.entries[0].1.clone();
    Ok(fourier_invert(g, &proto, |chi| v.get(chi).expect("checked").clone())?)
}

// ---------------------------------------------------------------------------
// D-model: W(F_q)[zeta_{p^e}] mod p^N, unramified degree f.

/// Splits the coordinates of an abelian group into the prime-to-p torsion part
/// and the p-part; fails unless the torsion exponent divides p - 1.
pub fn split_torsion(g: &FinAbGroup, p: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    let (mut tors, mut pp) = (Vec::new(), Vec::new());
    for (i, &n) in g.orders().iter().enumerate() {
        if n == p.pow(nt::val_p(n, p)) {
            pp.push(i);
        } else if n % p == 0 {
            return Err(DescentError::Shape(format!("cyclic factor of order {n} mixes p and prime-to-p parts")));
        } else {
            tors.push(i);
        }
    }
    let exponent = tors.iter().fold(1, |a, &i| nt::lcm(a, g.orders()[i]));
    if !(p - 1).is_multiple_of(exponent) {
        return Err(DescentError::Torsion { exponent, p });
    }
    Ok((tors, pp))
}

/// Coefficient model for the valuation ring of the unramified closure: an
/// unramified extension of degree f with zeta_{p^e} adjoined, modulo p^N.
/// Elements are stored as f * p^e coordinates along x^i zeta^j (not reduced);
/// [`DModel::reduce`] gives the canonical coordinates with j < phi(p^e).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DModel {
    pub p: u64,
    pub f: usize,
    pub e: u32,
    pub precision: u32,
    modulus: u64,
    pe: usize,
    phi: usize,
    zeta_p1: u64,
}

pub type DVal = Vec<u64>;

impl DModel {
    pub fn new(p: u64, f: usize, e: u32, precision: u32) -> Result<Self> {
        let t = teichmuller(nt::primitive_root(p).ok_or(DescentError::Shape(format!("{p} is not prime")))? as i64, p, precision)
            .map_err(|e| DescentError::Arith(e.to_string()))?;
        if f == 0 {
            return Err(DescentError::Shape("unramified degree must be positive".into()));
        }
        let pe = p.pow(e) as usize;
        Ok(DModel {
            p,
            f,
            e,
            precision,
            modulus: p.pow(precision),
            pe,
            phi: pe - pe / p as usize,
            zeta_p1: t.residue().expect("base field"),
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn len(&self) -> usize {
        self.f * self.pe
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn zero(&self) -> DVal {
        vec![0; self.len()]
    }

    /// c * x^i * zeta_{p^e}^j.
    pub fn monomial(&self, c: i64, i: usize, j: u64) -> DVal {
        let mut v = self.zero();
        v[i + self.f * (j as usize % self.pe)] = c.rem_euclid(self.modulus as i64) as u64;
        v
    }

    /// Teichmuller root of unity of order d | p - 1, raised to k.
    pub fn teich(&self, d: u64, k: u64) -> u64 {
        nt::pow_mod(self.zeta_p1, ((self.p - 1) / d) * (k % d), self.modulus)
    }

    /// Canonical coordinates: zeta^j for j < phi(p^e), using
    /// zeta^(p^(e-1)(p-1)) = -sum_{t < p-1} zeta^(t p^(e-1)).
    pub fn reduce(&self, v: &[u64]) -> DVal {
        let mut c = v.to_vec();
        let m = self.modulus;
        if self.e == 0 {
            return c;
        }
        let step = self.pe / self.p as usize;
        for j in (self.phi..self.pe).rev() {
            for i in 0..self.f {
                let x = c[i + self.f * j];
                if x == 0 {
                    continue;
                }
                c[i + self.f * j] = 0;
                for t in 0..(self.p as usize - 1) {
                    let k = i + self.f * (j - self.phi + t * step);
                    c[k] = (c[k] + m - x) % m;
                }
            }
        }
        c
    }

    pub fn eq(&self, a: &[u64], b: &[u64]) -> bool {
        self.reduce(a) == self.reduce(b)
    }

    /// sigma_a: zeta -> zeta^a, identity on the unramified part.
    pub fn sigma(&self, v: &[u64], a: u64) -> DVal {
        let mut out = self.zero();
        for (idx, &c) in v.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let (i, j) = (idx % self.f, idx / self.f);
            let t = i + self.f * ((j as u64 * a % self.pe as u64) as usize);
            out[t] = (out[t] + c) % self.modulus;
        }
        out
    }

    /// Whether a value lies in L(zeta_{p^m}) = Q_p(zeta_{p^m}): no unramified
    /// directions and only zeta-powers divisible by p^(e-m). Returns the first
    /// offending canonical coordinate (i, j).
    pub fn outside_l(&self, v: &[u64], m: u32, modulus: u64) -> Option<(usize, usize)> {
        let c = self.reduce(v);
        let step = self.pe / self.p.pow(m.min(self.e)) as usize;
        (0..c.len()).find_map(|idx| {
            let (i, j) = (idx % self.f, idx / self.f);
            (!c[idx].is_multiple_of(modulus) && (i > 0 || j % step != 0)).then_some((i, j))
        })
    }
}

/// Layout of an abelian group Delta x P for the D-model transforms.
#[derive(Debug, Clone)]
pub struct Layout {
    pub group: FinAbGroup,
    tors: Vec<usize>,
    pcoords: Vec<usize>,
    /// exponent of the torsion part
    pub d: u64,
    /// p-part exponent p^e
    pub e: u32,
}

impl Layout {
    pub fn new(group: &FinAbGroup, p: u64) -> Result<Self> {
        let (tors, pcoords) = split_torsion(group, p)?;
        let d = tors.iter().fold(1, |a, &i| nt::lcm(a, group.orders()[i]));
        let e = pcoords.iter().map(|&i| nt::val_p(group.orders()[i], p)).max().unwrap_or(0);
        Ok(Layout { group: group.clone(), tors, pcoords, d, e })
    }

    /// Exponent m with the p-part of chi of order p^m.
    pub fn p_order(&self, chi: &GroupChar, p: u64) -> u32 {
        self.pcoords
            .iter()
            .map(|&i| {
                let n = self.group.orders()[i];
                nt::val_p(n / nt::gcd(chi.exps()[i], n), p)
            })
            .max()
            .unwrap_or(0)
    }
}

/// A measure with D-model coefficients, known modulo p^precision.
#[derive(Debug, Clone, PartialEq)]
pub struct DMeasure {
    pub group: FinAbGroup,
    pub coeffs: Vec<DVal>,
    pub precision: u32,
}

/// out(y) = sum_x v(x) chi_x(y)^sign over the group, where x runs over characters
/// (sign -1, inversion) or elements (sign +1, evaluation); both are indexed like
/// the group. Split along Delta and P so the cost is |G| (|Delta| + |P|) per entry.
fn transform(model: &DModel, lay: &Layout, v: &[DVal], sign: i64) -> Vec<DVal> {
    let g = &lay.group;
    let n = g.order() as usize;
    let o = g.orders();
    let pe = model.p.pow(lay.e);
    let scale = (model.pe as u64) / pe;
    let sub = |coords: &[usize]| -> FinAbGroup {
        let ords: Vec<u64> = coords.iter().map(|&i| o[i]).collect();
        if ords.is_empty() { FinAbGroup::trivial() } else { FinAbGroup::new(&ords).expect("orders >= 2") }
    };
    let (dg, pg) = (sub(&lay.tors), sub(&lay.pcoords));
    // pairing tables on each factor
    let table = |h: &FinAbGroup, m: u64| -> Vec<Vec<u64>> {
        let els: Vec<Vec<u64>> = h.elements().collect();
        els.iter()
            .map(|a| {
                els.iter()
                    .map(|b| {
                        a.iter().zip(b).zip(h.orders()).fold(0, |t, ((&x, &y), &q)| (t + x * y % q * (m / q)) % m)
                    })
                    .collect()
            })
            .collect()
    };
    let (td, tp) = (table(&dg, lay.d), table(&pg, pe));
    let split: Vec<(usize, usize)> = (0..n)
        .map(|i| {
            let x = g.elem(i);
            let a: Vec<u64> = lay.tors.iter().map(|&k| x[k]).collect();
            let b: Vec<u64> = lay.pcoords.iter().map(|&k| x[k]).collect();
            (dg.index(&a), pg.index(&b))
        })
        .collect();
    let mut index = vec![vec![0usize; pg.order() as usize]; dg.order() as usize];
    for (i, &(a, b)) in split.iter().enumerate() {
        index[a][b] = i;
    }
    let nonzero = |w: &DVal| -> Vec<(usize, u64)> { w.iter().enumerate().filter(|(_, &c)| c != 0).map(|(k, &c)| (k, c)).collect() };
    let add = |acc: &mut DVal, nz: &[(usize, u64)], s: u64, shift: usize| {
        let m = model.modulus;
        for &(idx, c) in nz {
            let (i, j) = (idx % model.f, idx / model.f);
            let t = i + model.f * ((j + shift) % model.pe);
            acc[t] = ((acc[t] as u128 + c as u128 * s as u128) % m as u128) as u64;
        }
    };
    // step 1: mix the torsion coordinates
    let mut mid = vec![model.zero(); n];
    for b in 0..pg.order() as usize {
        for a_src in 0..dg.order() as usize {
            let src = index[a_src][b];
            let nz = nonzero(&v[src]);
            if nz.is_empty() {
                continue;
            }
            for a_out in 0..dg.order() as usize {
                let t = td[a_src][a_out];
                let t = if sign < 0 { (lay.d - t) % lay.d } else { t };
                add(&mut mid[index[a_out][b]], &nz, model.teich(lay.d, t), 0);
            }
        }
    }
    // step 2: mix the p-coordinates
    let mut res = vec![model.zero(); n];
    for a in 0..dg.order() as usize {
        for b_src in 0..pg.order() as usize {
            let nz = nonzero(&mid[index[a][b_src]]);
            if nz.is_empty() {
                continue;
            }
            for b_out in 0..pg.order() as usize {
                let s = tp[b_src][b_out];
                let s = if sign < 0 { (pe - s) % pe } else { s };
                add(&mut res[index[a][b_out]], &nz, 1, (s * scale) as usize);
            }
        }
    }
    res
}

/// D-model Hom-description of a measure: values in [`char_table`] order.
pub fn d_hom_description(model: &DModel, m: &DMeasure) -> Result<Vec<DVal>> {
    let lay = Layout::new(&m.group, model.p)?;
    Ok(transform(model, &lay, &m.coeffs, 1).iter().map(|v| model.reduce(v)).collect())
}

/// D-model Fourier inversion. Division by the p-part of |G| is exact or an
/// error; the result is known modulo p^(N - v_p|G|).
pub fn d_fourier_invert(model: &DModel, g: &FinAbGroup, v: &[DVal]) -> Result<DMeasure> {
    let lay = Layout::new(g, model.p)?;
    if lay.e > model.e {
        return Err(DescentError::Shape(format!("model has zeta_{{p^{}}}, group needs p^{}", model.e, lay.e)));
    }
    if v.len() != g.order() as usize {
        return Err(DescentError::Shape(format!("{} values for {} characters", v.len(), g.order())));
    }
    let p = model.p;
    let vp = nt::val_p(g.order(), p);
    if vp >= model.precision {
        return Err(DescentError::NotInvertible(format!("|G| = {} at precision {}", g.order(), model.precision)));
    }
    let prime_to_p = g.order() / p.pow(vp);
    let inv = nt::inv_mod(prime_to_p % model.modulus, model.modulus).expect("prime to p");
    let pv = p.pow(vp);
    let raw = transform(model, &lay, v, -1);
    let mut coeffs = Vec::with_capacity(raw.len());
    for (idx, r) in raw.iter().enumerate() {
        let c = model.reduce(r);
        let mut out = Vec::with_capacity(c.len());
        for &x in &c {
            if x % pv != 0 {
                return Err(DescentError::NotIntegral(format!("{:?}", g.elem(idx))));
            }
            out.push(nt::mul_mod(x / pv, inv, model.modulus / pv));
        }
        coeffs.push(out);
    }
    Ok(DMeasure { group: g.clone(), coeffs, precision: model.precision - vp })
}

/// A Galois-equivariant L(rho)-valued vector: on each orbit representative rho_0
/// of order p^m on the p-part, h(rho_0) = |G| sum_j r_j zeta_{p^m}^j, and
/// h(rho_0^a) = sigma_a h(rho_0). The factor |G| keeps the inverse integral.
pub fn equivariant_vector(model: &DModel, g: &FinAbGroup, next: &mut dyn FnMut() -> u64) -> Result<Vec<DVal>> {
    let lay = Layout::new(g, model.p)?;
    let p = model.p;
    let table = char_table(g);
    let action = GaloisAction::inertia_h(g.exponent().max(1), p);
    let mut out: Vec<Option<DVal>> = vec![None; table.len()];
    let order = g.order() as i64;
    for i in 0..table.len() {
        if out[i].is_some() {
            continue;
        }
        let m = lay.p_order(&table[i], p);
        let pm = p.pow(m) as usize;
        let phi = pm - pm / p as usize;
        let step = model.pe / pm.max(1);
        let r: Vec<u64> = (0..phi.max(1)).map(|_| next() % model.modulus).collect();
        for &a in action.residues() {
            let j = g.index(table[i].pow(a as i64).exps());
            if out[j].is_some() {
                continue;
            }
            let mut v = model.zero();
            let scale = order.rem_euclid(model.modulus as i64) as u64;
            for (k, &rk) in r.iter().enumerate() {
                let t = k * step * (a as usize % model.pe) % model.pe;
                let c = &mut v[model.f * t];
                *c = (*c + nt::mul_mod(rk, scale, model.modulus)) % model.modulus;
            }
            out[j] = Some(v);
        }
    }
    Ok(out.into_iter().map(|v| v.expect("every character lies in an orbit")).collect())
}

/// First (character, a) with h(chi^a) != sigma_a h(chi), if any.
pub fn equivariance_witness(model: &DModel, g: &FinAbGroup, v: &[DVal]) -> Option<(GroupChar, u64)> {
    let table = char_table(g);
    let action = GaloisAction::inertia_h(g.exponent().max(1), model.p);
    for (i, chi) in table.iter().enumerate() {
        for &a in action.residues() {
            let j = g.index(chi.pow(a as i64).exps());
            if !model.eq(&v[j], &model.sigma(&v[i], a % model.pe as u64)) {
                return Some((chi.clone(), a));
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixVerdict {
    pub group: Vec<u64>,
    pub precision: u32,
    /// f(rho) in L(rho) for every rho
    pub hypothesis: bool,
    pub hypothesis_witness: Option<String>,
    /// coefficients free of ramified directions (f is a D-measure)
    pub d_measure: bool,
    /// every coefficient in O = Z_p
    pub conclusion: bool,
    pub conclusion_witness: Option<String>,
}

impl FixVerdict {
    pub fn vacuous(&self) -> bool {
        !self.hypothesis
    }

    /// hypothesis (and f over D) implies conclusion
    pub fn holds(&self) -> bool {
        !(self.hypothesis && self.d_measure) || self.conclusion
    }
}

/// Checks the descent statement on one measure: if every value f(rho) lies in
/// L(rho), every coefficient lies in O.
pub fn fix_lemma_check(model: &DModel, f: &DMeasure) -> Result<FixVerdict> {
    let lay = Layout::new(&f.group, model.p)?;
    let prec_mod = model.p.pow(f.precision);
    let vals = d_hom_description(model, f)?;
    let table = char_table(&f.group);
    let mut hyp_w = None;
    for (chi, v) in table.iter().zip(&vals) {
        let m = lay.p_order(chi, model.p);
        if let Some((i, j)) = model.outside_l(v, m, prec_mod) {
            hyp_w = Some(format!("{chi}: coordinate x^{i} zeta^{j} is nonzero, value not in L(zeta_{}^{m})", model.p));
            break;
        }
    }
    let mut d_measure = true;
    let mut concl_w = None;
    for (idx, c) in f.coeffs.iter().enumerate() {
        for (k, &x) in c.iter().enumerate() {
            if k == 0 || x % prec_mod == 0 {
                continue;
            }
            let (i, j) = (k % model.f, k / model.f);
            if j > 0 {
                d_measure = false;
            }
            if concl_w.is_none() {
                concl_w = Some(format!("coefficient at {:?} has coordinate x^{i} zeta^{j} = {x}", f.group.elem(idx)));
            }
        }
    }
    Ok(FixVerdict {
        group: f.group.orders().to_vec(),
        precision: f.precision,
        hypothesis: hyp_w.is_none(),
        hypothesis_witness: hyp_w,
        d_measure,
        conclusion: concl_w.is_none(),
        conclusion_witness: concl_w,
    })
}

// ---------------------------------------------------------------------------
// Det and ev.

/// rho -> det(rho(u)); fails if some value vanishes.
pub fn det_map<R: Ring>(u: &Measure<R>, irreps: &[ArtinRep]) -> Result<ValueVector<ArtinRep, R>> {
    let mut entries = Vec::with_capacity(irreps.len());
    for rho in irreps {
        let v = u.eval_rep(rho)?;
        if v.is_zero() {
            return Err(DescentError::NotInvertible(format!("u: Det vanishes at {rho}")));
        }
        entries.push((rho.clone(), v));
    }
    Ok(ValueVector { entries })
}

/// det(sum_x m_x rho(x) (x)bar^-1) in the group ring of Gamma, the image of the
/// semidirect product under `gamma` (c acting trivially).
pub fn det_lambda<R: Ring>(grp: &Metabelian, gamma: &GroupHom, u: &Measure<R>, rho: &ArtinRep) -> Result<Measure<R>> {
    if gamma.src != grp.g {
        return Err(DescentError::Shape("gamma is defined on another group".into()));
    }
    let proto = u.coeffs()[0].zero_like();
    let dst = Carrier::Abelian(gamma.dst.clone());
    let k = gamma.dst.order() as usize;
    let d = rho.dim();
    let mut acc = vec![vec![vec![proto.clone(); k]; d]; d];
    for (i, c) in u.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let x = grp.elem(i);
        let mx = rho
            .matrix_in(grp, &proto, &x)
            .ok_or_else(|| GrpRingError::MissingRoots(format!("values of {rho}")))?;
        let j = gamma.dst.index(&gamma.dst.inv(&gamma.apply(&x.0)));
        for r in 0..d {
            for s in 0..d {
                acc[r][s][j] = acc[r][s][j].add(&c.mul(&mx[r][s]));
            }
        }
    }
    let ms: Vec<Vec<Measure<R>>> = acc
        .into_iter()
        .map(|row| row.into_iter().map(|cs| Measure::from_coeffs(dst.clone(), cs)).collect())
        .collect::<std::result::Result<_, _>>()?;
    Ok(match d {
        1 => ms[0][0].clone(),
        _ => ms[0][0].convolve(&ms[1][1])?.sub(&ms[0][1].convolve(&ms[1][0])?)?,
    })
}

/// Evaluation at the trivial character of Gamma.
pub fn ev<R: Ring>(mu: &Measure<R>) -> R {
    mu.augmentation()
}

/// The irrep in `irreps` isomorphic to rho (x) (psi o gamma).
pub fn twist_rep(grp: &Metabelian, gamma: &GroupHom, irreps: &[ArtinRep], rho: &ArtinRep, psi: &GroupChar) -> Result<ArtinRep> {
    let lift = psi.pullback(gamma);
    let _ = grp;
    let target = match rho {
        ArtinRep::TypeA { chi, sign } => ArtinRep::TypeA { chi: chi.mul(&lift), sign: *sign },
        ArtinRep::Induced { chi, chi_c } => ArtinRep::Induced { chi: chi.mul(&lift), chi_c: chi_c.mul(&lift) },
    };
    irreps
        .iter()
        .find(|r| same_rep(r, &target))
        .cloned()
        .ok_or_else(|| DescentError::Shape(format!("{target} is not in the irrep list")))
}

fn same_rep(a: &ArtinRep, b: &ArtinRep) -> bool {
    match (a, b) {
        (ArtinRep::Induced { chi: a1, chi_c: a2 }, ArtinRep::Induced { chi: b1, chi_c: b2 }) => {
            (a1 == b1 && a2 == b2) || (a1 == b2 && a2 == b1)
        }
        _ => a == b,
    }
}

/// rho -> det_lambda(u)(rho) for every irrep.
pub fn det_family<R: Ring>(grp: &Metabelian, gamma: &GroupHom, u: &Measure<R>) -> Result<BTreeMap<ArtinRep, Measure<R>>> {
    classify_irreps(grp)
        .into_iter()
        .map(|rho| det_lambda(grp, gamma, u, &rho).map(|m| (rho, m)))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvVerdict {
    pub reps: usize,
    pub gamma_order: u64,
    pub ev_trivial: bool,
    /// first rho with ev(f)(rho) != 1
    pub witness: Option<String>,
    /// ev trivial implies every f(rho) = delta_e
    pub kernel_ok: bool,
    /// f(rho)(chi) = ev(f)(rho (x) chi^-1) for all rho, chi
    pub values_from_ev: bool,
    /// Fourier reconstruction of f(rho) from ev, when |Gamma| is invertible
    pub reconstructed: Option<bool>,
}

impl EvVerdict {
    pub fn pass(&self) -> bool {
        self.kernel_ok && self.values_from_ev && self.reconstructed != Some(false)
    }
}

/// Finite-level injectivity of ev on a twist-invariant family rho -> f(rho) in R[Gamma].
pub fn ev_injectivity_check<R: Ring>(
    grp: &Metabelian,
    gamma: &GroupHom,
    family: &BTreeMap<ArtinRep, Measure<R>>,
) -> Result<EvVerdict> {
    let irreps = classify_irreps(grp);
    for rho in &irreps {
        if !family.contains_key(rho) {
            return Err(DescentError::Shape(format!("family has no value at {rho}")));
        }
    }
    for c in grp.g.elements() {
        if gamma.apply(&grp.c.apply(&c)) != gamma.apply(&c) {
            return Err(DescentError::Shape("c does not act trivially on Gamma".into()));
        }
    }
    let chars = char_table(&gamma.dst);
    // twist invariance: f(rho (x) chi) = f(rho) twisted by chi^-1
    for rho in &irreps {
        for chi in &chars {
            let t = twist_rep(grp, gamma, &irreps, rho, chi)?;
            if family[&t] != family[rho].twist(chi)? {
                return Err(DescentError::NotTwistInvariant { rep: rho.to_string(), chi: chi.to_string() });
            }
        }
    }
    let one = family[&irreps[0]].coeffs()[0].one_like();
    let evs: BTreeMap<&ArtinRep, R> = irreps.iter().map(|r| (r, ev(&family[r]))).collect();
    let witness = irreps.iter().find(|r| evs[r] != one).map(|r| format!("{r}: ev = {}", evs[r].to_text()));
    let ev_trivial = witness.is_none();
    let delta_e = Measure::delta(Carrier::Abelian(gamma.dst.clone()), 0, one.clone());
    let kernel_ok = !ev_trivial || irreps.iter().all(|r| family[r] == delta_e);
    let mut values_from_ev = true;
    let mut reconstructed = Some(true);
    for rho in &irreps {
        let mut vals = Vec::with_capacity(chars.len());
        for chi in &chars {
            let t = twist_rep(grp, gamma, &irreps, rho, &chi.inv())?;
            let direct = family[rho].eval_char(chi)?;
            if direct != evs[&t] {
                values_from_ev = false;
            }
            vals.push((chi.clone(), evs[&t].clone()));
        }
        match fourier_invert_vector(&gamma.dst, &ValueVector { entries: vals }) {
            Ok(m) => {
                if m != family[rho] {
                    reconstructed = Some(false);
                }
            }
            Err(DescentError::Measure(GrpRingError::NotInvertible(_))) => reconstructed = None,
            Err(e) => return Err(e),
        }
    }
    Ok(EvVerdict {
        reps: irreps.len(),
        gamma_order: gamma.dst.order(),
        ev_trivial,
        witness,
        kernel_ok,
        values_from_ev,
        reconstructed,
    })
}

// ---------------------------------------------------------------------------
// Experimental: O-rational units with the same Det.

/// sigma_a on Q(zeta_modulus), standing in for Frobenius on the unramified part.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Frobenius {
    pub a: u64,
    pub modulus: u64,
}

impl Frobenius {
    /// a = p on zeta_{q-1} (q = p^f) and a = 1 on zeta_{p^k}.
    pub fn unramified(p: u64, f: u32, k: u32) -> Self {
        let m1 = p.pow(f) - 1;
        let pk = p.pow(k);
        let mut a = p % m1.max(1);
        while a % pk != 1 % pk {
            a += m1;
        }
        Frobenius { a, modulus: m1 * pk }
    }

    pub fn apply(&self, x: &CycloNumber) -> CycloNumber {
        x.galois(self.a as i64)
    }

    pub fn apply_measure(&self, u: &Measure<CycloNumber>) -> Result<Measure<CycloNumber>> {
        Ok(Measure::from_coeffs(u.carrier().clone(), u.coeffs().iter().map(|c| self.apply(c)).collect())?)
    }

    pub fn is_rational(&self, u: &Measure<CycloNumber>) -> bool {
        u.coeffs().iter().all(|c| self.apply(c) == *c)
    }

    /// The irrep with every character raised to a.
    pub fn on_rep(&self, rho: &ArtinRep) -> ArtinRep {
        let a = self.a as i64;
        match rho {
            ArtinRep::TypeA { chi, sign } => ArtinRep::TypeA { chi: chi.pow(a), sign: *sign },
            ArtinRep::Induced { chi, chi_c } => ArtinRep::Induced { chi: chi.pow(a), chi_c: chi_c.pow(a) },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaylorReport {
    pub experimental: bool,
    pub found: Option<Measure<CycloNumber>>,
    pub strategy: Option<String>,
    pub candidates: usize,
    pub bound: i64,
    /// Det(u') = Det(u) re-checked pointwise on the returned unit
    pub verified: bool,
}

/// Searches for u' with Frobenius-fixed coefficients and Det(u') = Det(u):
/// u itself, the Frobenius average, then sums of at most two deltas with
/// integer coefficients in [-bound, bound]. Failure is "not found", never a
/// counterexample.
pub fn taylor_sampling(grp: &Metabelian, u: &Measure<CycloNumber>, frob: &Frobenius, bound: i64) -> Result<TaylorReport> {
    let irreps = classify_irreps(grp);
    let target = det_map(u, &irreps)?;
    for (rho, v) in &target.entries {
        let moved = irreps
            .iter()
            .find(|r| same_rep(r, &frob.on_rep(rho)))
            .ok_or_else(|| DescentError::Shape(format!("Frobenius image of {rho} is not an irrep")))?;
        if frob.apply(v) != *target.get(moved).expect("listed") {
            return Err(DescentError::NotInvariant(rho.to_string()));
        }
    }
    let matches = |c: &Measure<CycloNumber>| -> Result<bool> {
        for (rho, v) in &target.entries {
            if c.eval_rep(rho)? != *v {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let mut tried = 0;
    let report = |found: Measure<CycloNumber>, strategy: &str, tried: usize| -> Result<TaylorReport> {
        let verified = det_map(&found, &irreps).map(|d| d == target).unwrap_or(false);
        Ok(TaylorReport { experimental: true, found: Some(found), strategy: Some(strategy.into()), candidates: tried, bound, verified })
    };
    tried += 1;
    if frob.is_rational(u) {
        return report(u.clone(), "u is already rational", tried);
    }
    // average over the Frobenius orbit of u
    let mut orbit = vec![u.clone()];
    loop {
        let next = frob.apply_measure(orbit.last().expect("nonempty"))?;
        if next == orbit[0] || orbit.len() > 64 {
            break;
        }
        orbit.push(next);
    }
    let mut avg = orbit[0].clone();
    for m in &orbit[1..] {
        avg = avg.add(m)?;
    }
    let avg = avg.scale(&CycloNumber::from_rational(&crate::arith::rat(1, orbit.len() as i64)));
    tried += 1;
    if frob.is_rational(&avg) && matches(&avg)? {
        return report(avg, "Frobenius average", tried);
    }
    let n = u.carrier().order();
    let zero = CycloNumber::zero();
    let coeffs: Vec<i64> = (-bound..=bound).filter(|&c| c != 0).collect();
    for i in 0..n {
        for &a in &coeffs {
            let mut cs = vec![zero.clone(); n];
            cs[i] = CycloNumber::from_int(a);
            let cand = Measure::from_coeffs(u.carrier().clone(), cs.clone())?;
            tried += 1;
            if matches(&cand)? {
                return report(cand, "single delta", tried);
            }
            for j in (i + 1)..n {
                for &b in &coeffs {
                    let mut cs2 = cs.clone();
                    cs2[j] = CycloNumber::from_int(b);
                    let cand = Measure::from_coeffs(u.carrier().clone(), cs2)?;
                    tried += 1;
                    if matches(&cand)? {
                        return report(cand, "two deltas", tried);
                    }
                }
            }
        }
    }
    Ok(TaylorReport { experimental: true, found: None, strategy: None, candidates: tried, bound, verified: false })
}
