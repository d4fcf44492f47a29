use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, ToPrimitive, Zero};

use super::{ArithError, CycloNumber, Ring};
use crate::nt;

pub const DEFAULT_PRECISION: u32 = 12;

/// Which generator of the residue field's unit group the prime-to-p roots of
/// unity are sent to. This is the "prime above p" made explicit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PrimeChoice {
    /// Coordinates (in the basis 1, x, ..., x^(f-1)) of a generator of F_q^x.
    pub generator: Vec<u64>,
}

/// A finite extension of Q_p: unramified of degree f composed with
/// Q_p(zeta_{p^k}) (Eisenstein polynomial Phi_{p^k}(1+T)), truncated mod p^N.
///
/// Precision N counts p-adic digits: values are taken modulo p^N O, which is
/// the (e N)-th power of the maximal ideal.
#[derive(Clone, PartialEq, Eq)]
pub struct PadicExt {
    p: u64,
    n: u32,
    f: usize,
    k: u32,
    e: usize,
    modulus: u64,
    gpoly: Vec<u64>,
    epoly: Vec<u64>,
    choice: PrimeChoice,
    /// image of zeta_M, M = (q - 1) p^k
    zeta_big: Vec<u64>,
}

impl fmt::Debug for PadicExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.descriptor())
    }
}

fn addm(a: u64, b: u64, m: u64) -> u64 {
    let s = a + b;
    if s >= m {
        s - m
    } else {
        s
    }
}

fn subm(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + m - b
    }
}

fn mulm(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Polynomial remainder over F_p (coefficients low to high).
fn fp_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead_inv = nt::inv_mod(b[db], p).expect("nonzero leading coefficient");
    while r.len() > db {
        let c = mulm(*r.last().unwrap(), lead_inv, p);
        let off = r.len() - 1 - db;
        for (j, &bj) in b.iter().enumerate() {
            r[off + j] = subm(r[off + j], mulm(c, bj, p), p);
        }
        r.pop();
    }
    while r.last() == Some(&0) {
        r.pop();
    }
    r
}

fn fp_irreducible(g: &[u64], p: u64) -> bool {
    let f = g.len() - 1;
    for d in 1..=f / 2 {
        // every monic polynomial of degree d
        let count = p.pow(d as u32);
        for idx in 0..count {
            let mut h = Vec::with_capacity(d + 1);
            let mut t = idx;
            for _ in 0..d {
                h.push(t % p);
                t /= p;
            }
            h.push(1);
            if fp_rem(g, &h, p).is_empty() {
                return false;
            }
        }
    }
    true
}

impl PadicExt {
    pub fn base(p: u64, n: u32) -> Result<Arc<Self>, ArithError> {
        Self::new(p, 1, 0, n, None)
    }

    pub fn unramified(p: u64, f: usize, n: u32) -> Result<Arc<Self>, ArithError> {
        Self::new(p, f, 0, n, None)
    }

    pub fn eisenstein(p: u64, k: u32, n: u32) -> Result<Arc<Self>, ArithError> {
        Self::new(p, 1, k, n, None)
    }

    /// Smallest extension containing zeta_m, m = m' p^k with p not dividing m'.
    pub fn for_conductor(p: u64, m: u64, n: u32, choice: Option<PrimeChoice>) -> Result<Arc<Self>, ArithError> {
        let k = nt::val_p(m, p);
        let mp = m / p.pow(k);
        let f = nt::mult_order(p % mp.max(1), mp.max(1)).unwrap_or(1).max(1) as usize;
        Self::new(p, f, k, n, choice)
    }

    pub fn new(p: u64, f: usize, k: u32, n: u32, choice: Option<PrimeChoice>) -> Result<Arc<Self>, ArithError> {
        if p < 5 || !nt::is_prime(p) {
            return Err(ArithError::Invalid(format!("p = {p} must be a prime >= 5")));
        }
        if n == 0 || f == 0 {
            return Err(ArithError::Invalid("precision and degree must be positive".into()));
        }
        let modulus = (p as u128).checked_pow(n).filter(|&m| m < (1u128 << 63));
        let modulus = modulus.ok_or(ArithError::PrecisionOverflow { p, n })? as u64;
        let gpoly = if f == 1 { vec![0, 1] } else { primitive_poly(p, f) };
        let epoly = eisenstein_poly(p, k, modulus);
        let e = epoly.len() - 1;
        let choice = match choice {
            Some(c) => {
                if c.generator.len() != f {
                    return Err(ArithError::Invalid("prime choice has the wrong degree".into()));
                }
                c
            }
            None if f == 1 => PrimeChoice { generator: vec![nt::primitive_root(p).unwrap()] },
            None => {
                let mut g = vec![0; f];
                g[1] = 1;
                PrimeChoice { generator: g }
            }
        };
        let mut ext = PadicExt { p, n, f, k, e, modulus, gpoly, epoly, choice, zeta_big: Vec::new() };
        let q = p.pow(f as u32);
        // Teichmuller lift of the chosen generator, then times 1 + T
        let mut g = vec![0u64; f * e];
        for (i, &c) in ext.choice.generator.iter().enumerate() {
            g[i] = c % p;
        }
        let gen = PadicNumber { ext: Arc::new(ext.clone()), c: g };
        if nt::gcd(q, 2) == 1 && !ext.choice_is_generator(&gen, q) {
            return Err(ArithError::Invalid("prime choice is not a generator of the residue field".into()));
        }
        let mut omega = gen;
        for _ in 1..n {
            omega = omega.pow_u(q);
        }
        let mut z = omega.c.clone();
        if k > 0 {
            let mut one_t = vec![0u64; f * e];
            one_t[0] = 1;
            one_t[f] = 1;
            let t = PadicNumber { ext: omega.ext.clone(), c: one_t };
            z = omega.mul_raw(&t).c;
        }
        ext.zeta_big = z;
        Ok(Arc::new(ext))
    }

    fn choice_is_generator(&self, g: &PadicNumber, q: u64) -> bool {
        // order of g in F_q^x must be q - 1: check mod p on the T^0 part
        let red = |x: &PadicNumber| -> Vec<u64> { x.c[..self.f].iter().map(|c| c % self.p).collect() };
        let one = {
            let mut v = vec![0; self.f];
            v[0] = 1;
            v
        };
        if red(&g.pow_u(q - 1)) != one || red(g).iter().all(|&c| c == 0) {
            return false;
        }
        nt::factor(q - 1).iter().all(|&(r, _)| red(&g.pow_u((q - 1) / r)) != one)
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn precision(&self) -> u32 {
        self.n
    }
    pub fn degree_unramified(&self) -> usize {
        self.f
    }
    pub fn ramification(&self) -> usize {
        self.e
    }
    pub fn eisenstein_k(&self) -> u32 {
        self.k
    }
    pub fn modulus(&self) -> u64 {
        self.modulus
    }
    pub fn choice(&self) -> &PrimeChoice {
        &self.choice
    }
    /// Order M of the root of unity group the extension is known to contain.
    pub fn roots_order(&self) -> u64 {
        (self.p.pow(self.f as u32) - 1) * self.p.pow(self.k)
    }

    pub fn descriptor(&self) -> String {
        let kind = match (self.f, self.k) {
            (1, 0) => "base".to_string(),
            (f, 0) => format!("unramified({f})"),
            (1, k) => format!("eisenstein({k})"),
            (f, k) => format!("unramified({f})*eisenstein({k})"),
        };
        format!("Q{}:{}:N={}:gen={:?}", self.p, kind, self.n, self.choice.generator)
    }

    fn len(&self) -> usize {
        self.f * self.e
    }
}

fn eisenstein_poly(p: u64, k: u32, modulus: u64) -> Vec<u64> {
    if k == 0 {
        return vec![0, 1];
    }
    // Phi_{p^k}(X) = sum_{i<p} X^{i p^{k-1}}, substitute X = 1 + T
    let step = p.pow(k - 1) as usize;
    let deg = (p as usize - 1) * step;
    let mut out = vec![BigInt::zero(); deg + 1];
    for i in 0..p as usize {
        let d = i * step;
        let mut binom = BigInt::one();
        for j in 0..=d {
            out[j] += &binom;
            binom = binom * BigInt::from(d - j) / BigInt::from(j + 1);
        }
    }
    let m = BigInt::from(modulus);
    out.iter()
        .map(|c| ((c % &m + &m) % &m).to_u64().unwrap())
        .collect()
}

/// Smallest (lexicographic from the constant term) monic polynomial of degree f
/// irreducible mod p whose root generates F_q^x.
fn primitive_poly(p: u64, f: usize) -> Vec<u64> {
    let q = p.pow(f as u32);
    let total = p.pow(f as u32);
    for idx in 0..total {
        let mut g = Vec::with_capacity(f + 1);
        let mut t = idx;
        for _ in 0..f {
            g.push(t % p);
            t /= p;
        }
        g.push(1);
        if g[0] == 0 || !fp_irreducible(&g, p) {
            continue;
        }
        // order of x modulo g
        let pow_x = |e: u64| -> Vec<u64> {
            let mut r = vec![1u64];
            let mut b = vec![0u64, 1];
            let mut e = e;
            while e > 0 {
                if e & 1 == 1 {
                    r = fp_rem(&fp_mul(&r, &b, p), &g, p);
                }
                b = fp_rem(&fp_mul(&b, &b, p), &g, p);
                e >>= 1;
            }
            r
        };
        if nt::factor(q - 1).iter().all(|&(r, _)| pow_x((q - 1) / r) != vec![1]) {
            return g;
        }
    }
    unreachable!("a primitive polynomial exists in every degree")
}

fn fp_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = addm(out[i + j], mulm(x, y, p), p);
        }
    }
    out
}

/// Truncated element of the ring of integers of a [`PadicExt`].
#[derive(Clone)]
pub struct PadicNumber {
    ext: Arc<PadicExt>,
    /// coefficient of x^i T^j at index i + f j, reduced mod p^N
    c: Vec<u64>,
}

impl PadicNumber {
    pub fn zero(ext: &Arc<PadicExt>) -> Self {
        PadicNumber { ext: ext.clone(), c: vec![0; ext.len()] }
    }

    pub fn from_int(ext: &Arc<PadicExt>, n: i64) -> Self {
        let mut z = Self::zero(ext);
        z.c[0] = (n as i128).rem_euclid(ext.modulus as i128) as u64;
        z
    }

    pub fn from_rational(ext: &Arc<PadicExt>, q: &BigRational) -> Result<Self, ArithError> {
        let m = BigInt::from(ext.modulus);
        let d = (q.denom() % &m + &m) % &m;
        let d = d.to_u64().unwrap();
        if d.is_multiple_of(ext.p) {
            return Err(ArithError::NotIntegral(q.to_string(), ext.p));
        }
        let dinv = nt::inv_mod(d, ext.modulus).unwrap();
        let n = ((q.numer() % &m + &m) % &m).to_u64().unwrap();
        let mut z = Self::zero(ext);
        z.c[0] = mulm(n, dinv, ext.modulus);
        Ok(z)
    }

    /// The uniformizer: zeta_{p^k} - 1 in the Eisenstein case, p otherwise.
    pub fn uniformizer(ext: &Arc<PadicExt>) -> Self {
        let mut z = Self::zero(ext);
        if ext.e > 1 {
            z.c[ext.f] = 1;
        } else {
            z.c[0] = ext.p % ext.modulus;
        }
        z
    }

    pub fn ext(&self) -> &Arc<PadicExt> {
        &self.ext
    }

    pub fn coords(&self) -> &[u64] {
        &self.c
    }

    pub fn from_coords(ext: &Arc<PadicExt>, c: Vec<u64>) -> Result<Self, ArithError> {
        if c.len() != ext.len() {
            return Err(ArithError::Invalid("coordinate vector has the wrong length".into()));
        }
        Ok(PadicNumber { ext: ext.clone(), c: c.into_iter().map(|x| x % ext.modulus).collect() })
    }

    /// The residue as an integer mod p^N (base field only).
    pub fn residue(&self) -> Option<u64> {
        (self.ext.len() == 1).then_some(self.c[0])
    }

    /// Valuation in units of the uniformizer; `None` when the value is zero at precision.
    pub fn valuation(&self) -> Option<u64> {
        let (f, e, p) = (self.ext.f, self.ext.e, self.ext.p);
        let mut best: Option<u64> = None;
        for j in 0..e {
            let vj = (0..f)
                .filter(|&i| self.c[i + f * j] != 0)
                .map(|i| nt::val_p(self.c[i + f * j], p) as u64)
                .min();
            if let Some(v) = vj {
                let total = v * e as u64 + j as u64;
                best = Some(best.map_or(total, |b| b.min(total)));
            }
        }
        best
    }

    /// Valuation normalized so that v(p) = 1.
    pub fn valuation_normalized(&self) -> Option<Ratio<i64>> {
        self.valuation().map(|v| Ratio::new(v as i64, self.ext.e as i64))
    }

    pub fn is_unit(&self) -> bool {
        self.valuation() == Some(0)
    }

    fn check(&self, o: &Self) -> Result<(), ArithError> {
        if Arc::ptr_eq(&self.ext, &o.ext) || *self.ext == *o.ext {
            Ok(())
        } else {
            Err(ArithError::ExtensionMismatch(self.ext.descriptor(), o.ext.descriptor()))
        }
    }

    pub fn try_add(&self, o: &Self) -> Result<Self, ArithError> {
        self.check(o)?;
        let m = self.ext.modulus;
        let c = self.c.iter().zip(&o.c).map(|(&a, &b)| addm(a, b, m)).collect();
        Ok(PadicNumber { ext: self.ext.clone(), c })
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self, ArithError> {
        self.check(o)?;
        let m = self.ext.modulus;
        let c = self.c.iter().zip(&o.c).map(|(&a, &b)| subm(a, b, m)).collect();
        Ok(PadicNumber { ext: self.ext.clone(), c })
    }

    pub fn neg(&self) -> Self {
        let m = self.ext.modulus;
        PadicNumber { ext: self.ext.clone(), c: self.c.iter().map(|&a| subm(0, a, m)).collect() }
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self, ArithError> {
        self.check(o)?;
        Ok(self.mul_raw(o))
    }

    fn mul_raw(&self, o: &Self) -> Self {
        let ext = &*self.ext;
        let (f, e, m) = (ext.f, ext.e, ext.modulus as u128);
        if f == 1 && e == 1 {
            let v = (self.c[0] as u128 * o.c[0] as u128 % m) as u64;
            return PadicNumber { ext: self.ext.clone(), c: vec![v] };
        }
        let (fw, ew) = (2 * f - 1, 2 * e - 1);
        let mut prod = vec![0u128; fw * ew];
        for j1 in 0..e {
            for i1 in 0..f {
                let a = self.c[i1 + f * j1] as u128;
                if a == 0 {
                    continue;
                }
                for j2 in 0..e {
                    for i2 in 0..f {
                        let b = o.c[i2 + f * j2] as u128;
                        if b != 0 {
                            let idx = (i1 + i2) + fw * (j1 + j2);
                            prod[idx] = (prod[idx] + a * b % m) % m;
                        }
                    }
                }
            }
        }
        // reduce in T
        for j in (e..ew).rev() {
            for i in 0..fw {
                let c = prod[i + fw * j];
                if c == 0 {
                    continue;
                }
                for t in 0..e {
                    let idx = i + fw * (j - e + t);
                    prod[idx] = (prod[idx] + m - c * ext.epoly[t] as u128 % m) % m;
                }
                prod[i + fw * j] = 0;
            }
        }
        // reduce in x
        for j in 0..e {
            for i in (f..fw).rev() {
                let c = prod[i + fw * j];
                if c == 0 {
                    continue;
                }
                for t in 0..f {
                    let idx = (i - f + t) + fw * j;
                    prod[idx] = (prod[idx] + m - c * ext.gpoly[t] as u128 % m) % m;
                }
                prod[i + fw * j] = 0;
            }
        }
        let mut c = vec![0u64; f * e];
        for j in 0..e {
            for i in 0..f {
                c[i + f * j] = prod[i + fw * j] as u64;
            }
        }
        PadicNumber { ext: self.ext.clone(), c }
    }

    pub fn pow_u(&self, mut e: u64) -> Self {
        let mut r = Self::from_int(&self.ext, 1);
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul_raw(&b);
            }
            b = b.mul_raw(&b);
            e >>= 1;
        }
        r
    }

    /// Inverse of a unit (Newton iteration from the residue-field inverse).
    pub fn try_inv(&self) -> Result<Self, ArithError> {
        if !self.is_unit() {
            return Err(ArithError::NotAUnit(self.to_text()));
        }
        let ext = &self.ext;
        let q = ext.p.pow(ext.f as u32);
        let mut u0 = Self::zero(ext);
        u0.c[..ext.f].copy_from_slice(&self.c[..ext.f]);
        let mut y = u0.pow_u(q - 2);
        let one = Self::from_int(ext, 1);
        let two = Self::from_int(ext, 2);
        for _ in 0..64 {
            let uy = self.mul_raw(&y);
            if uy == one {
                return Ok(y);
            }
            y = y.mul_raw(&two.try_sub(&uy)?);
        }
        Err(ArithError::NotAUnit(self.to_text()))
    }

    pub fn to_text(&self) -> String {
        let parts: Vec<String> = self.c.iter().map(|c| c.to_string()).collect();
        format!("P[{}]({})", self.ext.descriptor(), parts.join(","))
    }

    /// Image of a cyclotomic number under the embedding fixed by the extension's prime choice.
    pub fn embed_cyclo(x: &CycloNumber, ext: &Arc<PadicExt>) -> Result<Self, ArithError> {
        let m = x.conductor();
        let big = ext.roots_order();
        if !big.is_multiple_of(m) {
            return Err(ArithError::Unsupported(format!(
                "{} does not contain the {m}-th roots of unity",
                ext.descriptor()
            )));
        }
        let z = PadicNumber { ext: ext.clone(), c: ext.zeta_big.clone() }.pow_u(big / m);
        let mut acc = Self::zero(ext);
        let mut zp = Self::from_int(ext, 1);
        for c in x.coeffs() {
            if !c.is_zero() {
                let cp = Self::from_rational(ext, &c)?;
                acc = acc.try_add(&cp.mul_raw(&zp))?;
            }
            zp = zp.mul_raw(&z);
        }
        Ok(acc)
    }

    /// zeta_order^exp under the fixed embedding.
    pub fn root(ext: &Arc<PadicExt>, order: u64, exp: i64) -> Result<Self, ArithError> {
        let big = ext.roots_order();
        if order == 0 || !big.is_multiple_of(order) {
            return Err(ArithError::Unsupported(format!(
                "{} does not contain the {order}-th roots of unity",
                ext.descriptor()
            )));
        }
        let e = (exp.rem_euclid(order as i64) as u64) * (big / order);
        Ok(PadicNumber { ext: ext.clone(), c: ext.zeta_big.clone() }.pow_u(e))
    }
}

/// The Teichmuller lift of `a` in Z_p at precision N.
pub fn teichmuller(a: i64, p: u64, n: u32) -> Result<PadicNumber, ArithError> {
    if a.rem_euclid(p as i64) == 0 {
        return Err(ArithError::ZeroResidue(a, p));
    }
    let ext = PadicExt::base(p, n)?;
    let x = PadicNumber::from_int(&ext, a.rem_euclid(p as i64));
    Ok(x.pow_u(p.pow(n - 1)))
}

/// Square root of a unit of Z_p; the root whose residue lies in 1..=(p-1)/2 is returned.
pub fn padic_sqrt(x: &PadicNumber) -> Result<PadicNumber, ArithError> {
    let ext = x.ext.clone();
    if ext.len() != 1 {
        return Err(ArithError::Unsupported("square roots are implemented over Z_p only".into()));
    }
    let (p, m) = (ext.p, ext.modulus);
    let v = x.c[0];
    if v.is_multiple_of(p) {
        return Err(ArithError::ZeroResidue(v as i64, p));
    }
    let r = v % p;
    let s0 = (1..=(p - 1) / 2)
        .find(|s| s * s % p == r)
        .ok_or(ArithError::NonResidue(r as i64, p))?;
    let mut s = s0;
    for _ in 0..64 {
        let sq = mulm(s, s, m);
        if sq == v {
            return Ok(PadicNumber { ext, c: vec![s] });
        }
        let inv2s = nt::inv_mod(mulm(2, s, m), m).unwrap();
        s = subm(s, mulm(subm(sq, v, m), inv2s, m), m);
    }
    unreachable!("Newton iteration converges quadratically")
}

impl PartialEq for PadicNumber {
    fn eq(&self, o: &Self) -> bool {
        (Arc::ptr_eq(&self.ext, &o.ext) || *self.ext == *o.ext) && self.c == o.c
    }
}

impl fmt::Debug for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

impl fmt::Display for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

impl Ring for PadicNumber {
    fn zero_like(&self) -> Self {
        Self::zero(&self.ext)
    }
    fn one_like(&self) -> Self {
        Self::from_int(&self.ext, 1)
    }
    fn add(&self, o: &Self) -> Self {
        self.try_add(o).unwrap_or_else(|e| panic!("{e}"))
    }
    fn sub(&self, o: &Self) -> Self {
        self.try_sub(o).unwrap_or_else(|e| panic!("{e}"))
    }
    fn mul(&self, o: &Self) -> Self {
        self.try_mul(o).unwrap_or_else(|e| panic!("{e}"))
    }
    fn neg(&self) -> Self {
        PadicNumber::neg(self)
    }
    fn is_zero(&self) -> bool {
        self.c.iter().all(|&c| c == 0)
    }
    fn inv(&self) -> Option<Self> {
        self.try_inv().ok()
    }
    fn from_rational(&self, q: &BigRational) -> Option<Self> {
        Self::from_rational(&self.ext, q).ok()
    }
    fn root_of_unity(&self, order: u64, exp: i64) -> Option<Self> {
        Self::root(&self.ext, order, exp).ok()
    }
    fn local_unit(&self, p: u64) -> Result<bool, String> {
        if p != self.ext.p {
            return Err(format!("coefficients are {}-adic, not {p}-adic", self.ext.p));
        }
        Ok(self.is_unit())
    }
    fn ring_tag(&self) -> String {
        format!("padic:{}", self.ext.descriptor())
    }
    fn to_text(&self) -> String {
        PadicNumber::to_text(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn teichmuller_values() {
        assert_eq!(teichmuller(1, 5, 4).unwrap().residue(), Some(1));
        assert_eq!(teichmuller(2, 5, 2).unwrap().residue(), Some(7));
        assert_eq!(teichmuller(4, 5, 2).unwrap().residue(), Some(24));
        assert!(teichmuller(10, 5, 2).is_err());
    }

    #[test]
    fn sqrt_examples() {
        let ext = PadicExt::base(5, 3).unwrap();
        let r = padic_sqrt(&PadicNumber::from_int(&ext, 4)).unwrap();
        assert_eq!(r.residue(), Some(2));
        let ext2 = PadicExt::base(5, 2).unwrap();
        let d = padic_sqrt(&PadicNumber::from_int(&ext2, -11)).unwrap();
        let v = d.residue().unwrap();
        assert_eq!(v * v % 25, 14);
        assert!(v % 5 <= 2);
        assert!(matches!(
            padic_sqrt(&PadicNumber::from_int(&ext2, 2)),
            Err(ArithError::NonResidue(2, 5))
        ));
    }

    #[test]
    fn zeta4_embeds_to_teichmuller_of_two() {
        let ext = PadicExt::base(5, 2).unwrap();
        let z = PadicNumber::embed_cyclo(&CycloNumber::zeta(4), &ext).unwrap();
        assert_eq!(z.residue(), Some(7));
    }

    #[test]
    fn zeta5_is_eisenstein() {
        let ext = PadicExt::eisenstein(5, 1, 6).unwrap();
        let z = PadicNumber::embed_cyclo(&CycloNumber::zeta(5), &ext).unwrap();
        let d = z.try_sub(&PadicNumber::from_int(&ext, 1)).unwrap();
        assert_eq!(d.valuation_normalized(), Some(Ratio::new(1, 4)));
        assert_eq!(z.pow_u(5), PadicNumber::from_int(&ext, 1));
    }

    #[test]
    fn unramified_inverse_and_roots() {
        let ext = PadicExt::unramified(7, 2, 5).unwrap();
        let z = PadicNumber::root(&ext, 48, 1).unwrap();
        assert_eq!(z.pow_u(48), PadicNumber::from_int(&ext, 1));
        assert_ne!(z.pow_u(24), PadicNumber::from_int(&ext, 1));
        let x = z.try_add(&PadicNumber::from_int(&ext, 3)).unwrap();
        if x.is_unit() {
            assert_eq!(x.try_mul(&x.try_inv().unwrap()).unwrap(), PadicNumber::from_int(&ext, 1));
        }
        let half = PadicNumber::from_rational(&ext, &rat(1, 2)).unwrap();
        assert_eq!(half.try_mul(&PadicNumber::from_int(&ext, 2)).unwrap(), PadicNumber::from_int(&ext, 1));
        assert!(PadicNumber::from_rational(&ext, &rat(1, 7)).is_err());
    }

    #[test]
    fn nonunit_inverse_fails_loudly() {
        let ext = PadicExt::base(5, 4).unwrap();
        assert!(PadicNumber::from_int(&ext, 10).try_inv().is_err());
        assert_eq!(PadicNumber::from_int(&ext, 50).valuation(), Some(2));
        assert_eq!(PadicNumber::from_int(&ext, 625).valuation(), None);
    }
}
