//! Gauss sums and local epsilon factors of finite-order characters of Q_p.
//!
//! A [`LocalChar`] of conductor p^n is chi(g^t) = zeta_{phi(p^n)}^{k t}, with g the
//! smallest primitive root mod p^n. Epsilon factors are the finite sums
//!
//! ```text
//! e(chi, psi(s a x), dx_1) = phi(p)^n * sum_{b in (Z/p^n)^x} chi(b) zeta_{p^n}^{s a b}
//! ```
//!
//! where s = +1 for psi(x), s = -1 for psi(-x), a is a unit scaling the additive
//! character and phi(p) is the value of an optional unramified part. At the prime
//! above p where the additive character comes from K, a is the image delta of
//! sqrt(-d_K); there e_p(chi) = e(chi, psi(-delta x), dx_1), and G(chi) = chi(delta) e_p(chi)
//! holds exactly. sigma_delta acts on p-power roots of unity by zeta -> zeta^delta, so
//! chi(sigma_delta) is chi evaluated at delta mod p^n.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::arith::{padic_sqrt, CycloAccumulator, CycloNumber, PadicExt, PadicNumber};
use crate::nt;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EpsilonError {
    #[error("bad character: {0}")]
    BadChar(String),
    #[error("the Gauss sum needs a ramified character")]
    Unramified,
    #[error("unsupported convention `{0}`")]
    Convention(String),
    #[error("{p} is inert in Q(sqrt(-{d}))")]
    Inert { p: u64, d: u64 },
    #[error("inconsistent primes {0} and {1}")]
    PrimeMismatch(u64, u64),
    #[error("arithmetic: {0}")]
    Arith(String),
}

type Result<T> = std::result::Result<T, EpsilonError>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalChar {
    pub p: u64,
    pub n: u32,
    /// Exponent against the smallest primitive root mod p^n.
    pub k: u64,
    /// Value at p of an unramified twist, if any.
    pub unram: Option<CycloNumber>,
}

impl LocalChar {
    pub fn new(p: u64, n: u32, k: u64) -> Result<Self> {
        if p < 3 || !nt::is_prime(p) {
            return Err(EpsilonError::BadChar(format!("{p} is not an odd prime")));
        }
        if n == 0 {
            return Ok(LocalChar { p, n, k: 0, unram: None });
        }
        let phi = (p - 1) * p.pow(n - 1);
        if (p as u128).pow(n) * (p as u128 - 1) > crate::arith::MAX_CONDUCTOR as u128 {
            return Err(EpsilonError::BadChar(format!("values need conductor above {}", crate::arith::MAX_CONDUCTOR)));
        }
        let k = k % phi;
        let exact = if n == 1 { k != 0 } else { !k.is_multiple_of(p) };
        if !exact {
            return Err(EpsilonError::BadChar(format!("{p}:{n}:{k} does not have conductor exponent {n}")));
        }
        Ok(LocalChar { p, n, k, unram: None })
    }

    pub fn trivial(p: u64) -> Self {
        LocalChar { p, n: 0, k: 0, unram: None }
    }

    /// All characters of exact conductor p^n.
    pub fn all(p: u64, n: u32) -> Vec<LocalChar> {
        if n == 0 {
            return vec![LocalChar::trivial(p)];
        }
        let phi = (p - 1) * p.pow(n - 1);
        (0..phi).filter_map(|k| LocalChar::new(p, n, k).ok()).collect()
    }

    pub fn with_unramified(mut self, value: CycloNumber) -> Self {
        self.unram = Some(value);
        self
    }

    pub fn modulus(&self) -> u64 {
        self.p.pow(self.n)
    }

    pub fn phi(&self) -> u64 {
        if self.n == 0 {
            1
        } else {
            (self.p - 1) * self.p.pow(self.n - 1)
        }
    }

    pub fn generator(&self) -> u64 {
        if self.n == 0 {
            1
        } else {
            nt::primitive_root(self.modulus()).expect("p^n has primitive roots")
        }
    }

    /// chi(a) = zeta_phi^e, or `None` when p divides a.
    pub fn value_exp(&self, a: i64) -> Option<u64> {
        if self.n == 0 {
            return Some(0);
        }
        let m = self.modulus();
        let a = a.rem_euclid(m as i64) as u64;
        let t = nt::discrete_log(a, self.generator(), m)?;
        Some((self.k as u128 * t as u128 % self.phi() as u128) as u64)
    }

    pub fn value(&self, a: i64) -> Option<CycloNumber> {
        self.value_exp(a).map(|e| CycloNumber::root(self.phi(), e as i64))
    }

    /// The inverse (complex conjugate) character, with the unramified value inverted.
    pub fn conj(&self) -> LocalChar {
        LocalChar {
            p: self.p,
            n: self.n,
            k: (self.phi() - self.k % self.phi()) % self.phi(),
            unram: self.unram.as_ref().map(|u| u.try_inv().expect("unramified values are nonzero")),
        }
    }

    /// chi(-1) as +1 or -1.
    pub fn parity(&self) -> i64 {
        match self.value_exp(-1) {
            Some(0) => 1,
            _ => -1,
        }
    }

    /// exponent table over (Z/p^n)^x: (b, chi(b) exponent mod phi)
    fn table(&self) -> Vec<(u64, u64)> {
        let m = self.modulus();
        let g = self.generator();
        let phi = self.phi();
        let mut out = Vec::with_capacity(phi as usize);
        let mut b = 1u64;
        for t in 0..phi {
            out.push((b, (self.k as u128 * t as u128 % phi as u128) as u64));
            b = nt::mul_mod(b, g, m);
        }
        out
    }
}

impl fmt::Display for LocalChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.p, self.n, self.k)
    }
}

impl FromStr for LocalChar {
    type Err = EpsilonError;

    /// Descriptor `p:n:k`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || EpsilonError::BadChar(format!("descriptor `{s}` is not p:n:k"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let p = parts[0].trim().parse().map_err(|_| bad())?;
        let n = parts[1].trim().parse().map_err(|_| bad())?;
        let k = parts[2].trim().parse().map_err(|_| bad())?;
        if n == 0 {
            if k != 0 {
                return Err(bad());
            }
            return Ok(LocalChar::trivial(p));
        }
        LocalChar::new(p, n, k)
    }
}

/// Additive character convention psi(s * scale * x).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AddConv {
    /// +1 for psi(x), -1 for psi(-x).
    pub sign: i8,
    /// Unit scaling, taken mod p^n.
    pub scale: u64,
}

impl AddConv {
    pub const PSI: AddConv = AddConv { sign: 1, scale: 1 };
    pub const PSI_NEG: AddConv = AddConv { sign: -1, scale: 1 };

    pub fn parse(tag: &str) -> Result<AddConv> {
        match tag {
            "psi(x)" => Ok(AddConv::PSI),
            "psi(-x)" => Ok(AddConv::PSI_NEG),
            _ => Err(EpsilonError::Convention(tag.into())),
        }
    }

    pub fn flipped(self) -> AddConv {
        AddConv { sign: -self.sign, scale: self.scale }
    }

    pub fn scaled(self, a: u64) -> AddConv {
        AddConv { sign: self.sign, scale: a }
    }
}

/// Haar measure convention. Only the measure giving Z_p volume 1 is implemented.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HaarConv {
    Dx1,
}

impl HaarConv {
    pub fn parse(tag: &str) -> Result<HaarConv> {
        match tag {
            "dx1" | "dx_1" => Ok(HaarConv::Dx1),
            _ => Err(EpsilonError::Convention(tag.into())),
        }
    }
}

/// G(chi) = sum_{a in (Z/p^n)^x} chi(a) zeta_{p^n}^{-a}; the unramified part is ignored.
pub fn gauss_sum(chi: &LocalChar) -> Result<CycloNumber> {
    if chi.n == 0 {
        return Err(EpsilonError::Unramified);
    }
    Ok(char_sum(chi, -1))
}

/// sum_b chi(b) zeta_{p^n}^{t b}
fn char_sum(chi: &LocalChar, t: i64) -> CycloNumber {
    let m = chi.modulus();
    let phi = chi.phi();
    let big = phi * m / nt::gcd(phi, m);
    let mut acc = CycloAccumulator::new(big);
    let tt = t.rem_euclid(m as i64) as u64;
    for (b, e) in chi.table() {
        let add = (tt as u128 * b as u128 % m as u128) as u64;
        let exp = e * (big / phi) + add * (big / m);
        acc.add_root_int(1, (exp % big) as i64);
    }
    acc.finish()
}

/// e(chi, psi(s a x), dx_1); equals 1 for n = 0.
pub fn epsilon_factor(chi: &LocalChar, add: AddConv, haar: HaarConv) -> Result<CycloNumber> {
    let HaarConv::Dx1 = haar;
    if chi.n == 0 {
        return Ok(CycloNumber::one());
    }
    let m = chi.modulus();
    if add.scale.is_multiple_of(chi.p) {
        return Err(EpsilonError::Convention(format!("additive scale {} is not a unit", add.scale)));
    }
    let t = (add.sign as i64 * (add.scale % m) as i64).rem_euclid(m as i64);
    let s = char_sum(chi, t);
    match &chi.unram {
        Some(u) => {
            let mut f = CycloNumber::one();
            for _ in 0..chi.n {
                f = f.try_mul(u).map_err(|e| EpsilonError::Arith(e.to_string()))?;
            }
            s.try_mul(&f).map_err(|e| EpsilonError::Arith(e.to_string()))
        }
        None => Ok(s),
    }
}

/// delta = sqrt(-d_K) in Z_p, reduced mod p^n (residue in 1..=(p-1)/2).
pub fn delta_mod(d_k: u64, p: u64, n: u32) -> Result<u64> {
    if nt::legendre(-(d_k as i64), p) != 1 {
        return Err(EpsilonError::Inert { p, d: d_k });
    }
    let prec = n.max(1);
    let ext = PadicExt::base(p, prec).map_err(|e| EpsilonError::Arith(e.to_string()))?;
    let x = PadicNumber::from_int(&ext, -(d_k as i64));
    let r = padic_sqrt(&x).map_err(|e| EpsilonError::Arith(e.to_string()))?;
    Ok(r.coords()[0] % p.pow(n))
}

/// The convention at the prime p above p: psi(-delta x), dx_1.
pub fn conv_at_p(d_k: u64, p: u64, n: u32) -> Result<AddConv> {
    Ok(AddConv::PSI_NEG.scaled(delta_mod(d_k, p, n.max(1))?))
}

/// At the conjugate prime the additive character is transported along
/// complex conjugation, so in Q_p coordinates it is the same psi(-delta x).
/// This makes e_Pbar(chi^c) = e_P(chi).
pub fn conv_at_pbar(d_k: u64, p: u64, n: u32) -> Result<AddConv> {
    conv_at_p(d_k, p, n)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SigmaDeltaReport {
    pub chi: LocalChar,
    pub d_k: u64,
    pub delta: u64,
    pub gauss: CycloNumber,
    pub chi_delta: CycloNumber,
    pub e_p: CycloNumber,
    pub holds: bool,
}

/// Checks G(chi) = chi(sigma_delta) e_p(chi) in the cyclotomic field.
pub fn verify_sigma_delta(chi: &LocalChar, d_k: u64) -> Result<SigmaDeltaReport> {
    let conv = conv_at_p(d_k, chi.p, chi.n)?;
    let gauss = gauss_sum(chi)?;
    let e_p = epsilon_factor(chi, conv, HaarConv::Dx1)?;
    let chi_delta = chi.value(conv.scale as i64).expect("delta is a unit");
    let rhs = chi_delta.try_mul(&e_p).map_err(|e| EpsilonError::Arith(e.to_string()))?;
    Ok(SigmaDeltaReport { chi: chi.clone(), d_k, delta: conv.scale, holds: gauss == rhs, gauss, chi_delta, e_p })
}

#[derive(Debug, Clone, PartialEq)]
pub struct InductivitySplit {
    pub e_p: CycloNumber,
    pub e_pbar: CycloNumber,
    pub product: CycloNumber,
    pub conductor: u32,
}

/// e_p(rho^) = e_P(chi_P) e_Pbar(chi_Pbar) for the two components at a split prime,
/// with the conductor exponents adding.
pub fn inductivity_split(at_p: &LocalChar, at_pbar: &LocalChar, d_k: u64) -> Result<InductivitySplit> {
    if at_p.p != at_pbar.p {
        return Err(EpsilonError::PrimeMismatch(at_p.p, at_pbar.p));
    }
    let e_p = epsilon_factor(at_p, conv_at_p(d_k, at_p.p, at_p.n)?, HaarConv::Dx1)?;
    let e_pbar = epsilon_factor(at_pbar, conv_at_pbar(d_k, at_pbar.p, at_pbar.n)?, HaarConv::Dx1)?;
    let product = e_p.try_mul(&e_pbar).map_err(|e| EpsilonError::Arith(e.to_string()))?;
    Ok(InductivitySplit { e_p, e_pbar, product, conductor: at_p.n + at_pbar.n })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_gauss_sum_mod_5() {
        let chi = LocalChar::new(5, 1, 2).unwrap();
        let g = gauss_sum(&chi).unwrap();
        assert_eq!(g.try_mul(&g).unwrap(), CycloNumber::from_int(5));
        assert_eq!(gauss_sum(&LocalChar::trivial(5)), Err(EpsilonError::Unramified));
    }

    #[test]
    fn descriptors() {
        let chi: LocalChar = "5:2:3".parse().unwrap();
        assert_eq!(chi.to_string(), "5:2:3");
        assert!("5:2:5".parse::<LocalChar>().is_err());
        assert!("5:1".parse::<LocalChar>().is_err());
        assert_eq!(LocalChar::all(5, 2).len(), 16);
    }

    #[test]
    fn inert_prime_is_rejected() {
        let chi = LocalChar::new(5, 1, 1).unwrap();
        assert_eq!(verify_sigma_delta(&chi, 3).unwrap_err(), EpsilonError::Inert { p: 5, d: 3 });
    }

    #[test]
    fn delta_for_gaussian_integers() {
        assert_eq!(delta_mod(4, 5, 2).unwrap(), 11);
    }

    #[test]
    fn trivial_components() {
        let t = LocalChar::trivial(5);
        let r = inductivity_split(&t, &t, 4).unwrap();
        assert_eq!(r.product, CycloNumber::one());
        assert_eq!(r.conductor, 0);
    }
}
